#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qpfk/config.hpp"
#include "qpfk/continuation.hpp"
#include "qpfk/io.hpp"
#include "qpfk/kernels.hpp"
#include "qpfk/lindstedt.hpp"
#include "qpfk/solver.hpp"

namespace qpfk::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Context {
    RunConfig config;
    fs::path config_dir;
    fs::path out;
    io::Provenance provenance;
};

ExitCode exit_code_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::invalid_argument:
        case ErrorKind::unsupported_resolution:
        case ErrorKind::resolution_mismatch:
        case ErrorKind::symmetry_violation:
            return kValidation;
        case ErrorKind::io:
            return kIo;
        default:
            return kNumerical;
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    return out;
}

ordered_json provenance_json(const io::Provenance& p) {
    return {{"version", p.version}, {"config_hash", p.config_hash}};
}

// NaN and infinities have no JSON spelling; they become null.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

void write_json(const fs::path& path, const ordered_json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

Context load(const std::string& config_path, const std::string& out_dir) {
    Context ctx;
    ctx.config = parse_config(read_file(config_path));
    ctx.config_dir = fs::path(config_path).parent_path();
    ctx.out = out_dir;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + ctx.out.string() + ": " + ec.message());
    ctx.provenance.config_hash = config_hash(ctx.config);
    spdlog::debug("config hash {}", ctx.provenance.config_hash);
    return ctx;
}

TorusFunction read_state(const fs::path& path, const RunConfig& config, double* lambda = nullptr) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open state " + path.string());
    io::CoefficientDump dump = io::read_coefficients(in);
    if (dump.f.dim() != config.d || dump.f.resolution() != config.N) {
        throw Error(ErrorKind::resolution_mismatch, "state " + path.string() + " does not match d and N of the config");
    }
    if (lambda) {
        auto it = dump.header.find("lambda");
        *lambda = it == dump.header.end() ? config.lambda0 : std::stod(it->second);
    }
    dump.f.coeffs()[0] = {};
    return dump.f;
}

fs::path resolve(const Context& ctx, const std::string& path) {
    fs::path p(path);
    if (p.is_relative() && !fs::exists(p)) p = ctx.config_dir / p;
    return p;
}

SolverState initial_state(const Context& ctx) {
    SolverState s;
    s.lambda = ctx.config.lambda0;
    if (ctx.config.initial_state) {
        s.h = read_state(resolve(ctx, *ctx.config.initial_state), ctx.config);
    } else {
        s.h = TorusFunction(ctx.config.d, ctx.config.N);
    }
    return s;
}

SolveOptions solve_options(const RunConfig& config) {
    SolveOptions o;
    o.tol = config.tol;
    o.max_iter = config.max_iter;
    o.m = config.monitor_m();
    return o;
}

void write_state(const Context& ctx, const fs::path& path, const SolverState& state, int iterations) {
    auto out = open_out(path);
    io::write_coefficients(out, state.h, ctx.provenance,
                           {{"lambda", io::format_double(state.lambda)},
                            {"residual_sup", io::format_double(state.residual.sup)},
                            {"iterations", std::to_string(iterations)}});
}

void write_failure(const Context& ctx, const Error& err, const std::vector<HistoryRecord>* history, int iteration) {
    ordered_json doc;
    doc["provenance"] = provenance_json(ctx.provenance);
    doc["kind"] = to_string(err.kind());
    doc["message"] = err.what();
    doc["iteration"] = iteration;
    ordered_json hist = ordered_json::array();
    if (history) {
        for (const auto& h : *history) {
            hist.push_back({{"iteration", h.iteration},
                            {"sup_residual", number(h.sup_residual)},
                            {"Hm_residual", number(h.hm_residual)},
                            {"lambda", number(h.lambda)},
                            {"delta_norm", number(h.delta_norm)}});
        }
    }
    doc["history"] = hist;
    write_json(ctx.out / "failure.json", doc);
}

SolveResult solve_or_record(const Context& ctx, SolverState start, const ForceModel& force,
                            const FrequencyData& freq) {
    try {
        return solve(std::move(start), force, freq, solve_options(ctx.config));
    } catch (const SolveFailure& err) {
        write_failure(ctx, err, &err.history(), err.iteration());
        {
            auto out = open_out(ctx.out / "history.jsonl");
            io::write_history_jsonl(out, err.history(), ctx.provenance);
        }
        throw;
    }
}

int cmd_solve(const Context& ctx) {
    const FrequencyData freq = frequency_of(ctx.config);
    const ForceModel force = force_of(ctx.config);
    spdlog::info("nu_hat = {:.6e} (tau = {}, K_max = {})", freq.nu_hat, freq.tau, freq.k_max);

    const SolveResult result = solve_or_record(ctx, initial_state(ctx), force, freq);
    for (const auto& h : result.history) {
        spdlog::info("iter {:2d}  sup {:.3e}  H^m {:.3e}  lambda {:.6e}", h.iteration, h.sup_residual,
                     h.hm_residual, h.lambda);
    }
    write_state(ctx, ctx.out / "state.dat", result.state, result.state.iteration);
    {
        auto out = open_out(ctx.out / "history.jsonl");
        io::write_history_jsonl(out, result.history, ctx.provenance);
    }
    {
        auto out = open_out(ctx.out / "history.csv");
        io::write_history_csv(out, result.history, ctx.provenance);
    }
    std::cout << "converged in " << result.state.iteration << " iterations: lambda = "
              << io::format_double(result.state.lambda) << ", residual = " << io::format_double(result.state.residual.sup)
              << "\n";
    return kSuccess;
}

int cmd_lindstedt(const Context& ctx) {
    const FrequencyData freq = frequency_of(ctx.config);
    const ForceModel force = force_of(ctx.config);
    const int order = ctx.config.lindstedt.order;
    const LindstedtSeries series = lindstedt_expand(force, freq, ctx.config.N, order);

    fs::create_directories(ctx.out / "series");
    for (int n = 1; n <= order; ++n) {
        auto out = open_out(ctx.out / "series" / ("h_" + std::to_string(n) + ".dat"));
        io::write_coefficients(out, series.h_terms[n - 1], ctx.provenance,
                               {{"order", std::to_string(n)}, {"lambda", io::format_double(series.lambda_terms[n - 1])}});
    }
    {
        auto out = open_out(ctx.out / "lambda_table.csv");
        out << "# version=" << ctx.provenance.version << " config_hash=" << ctx.provenance.config_hash << "\n";
        out << "order,lambda\n";
        for (int n = 1; n <= order; ++n) out << n << "," << io::format_double(series.lambda_terms[n - 1]) << "\n";
    }

    // Residual of the truncation under the force eps U, and its distance to
    // the solver's answer started from the truncation.
    auto out = open_out(ctx.out / "scaling.csv");
    out << "# version=" << ctx.provenance.version << " config_hash=" << ctx.provenance.config_hash << "\n";
    out << "epsilon,residual_sup,residual_ratio,solver_gap,gap_ratio\n";
    double prev_res = NAN, prev_gap = NAN;
    for (double eps : ctx.config.lindstedt.epsilons) {
        const auto [h, lambda] = lindstedt_eval(series, eps);
        const ForceModel scaled = force.scaled(eps);
        const double res = error_functional(h, lambda, scaled, freq).sup;
        double gap = NAN;
        try {
            SolverState start;
            start.h = h;
            start.lambda = lambda;
            const SolveResult solved = solve(std::move(start), scaled, freq, solve_options(ctx.config));
            gap = sobolev_norm(solved.state.h - h, 0.0);
        } catch (const Error& err) {
            spdlog::warn("solver failed at eps = {}: {}", eps, err.what());
        }
        out << io::format_double(eps) << "," << io::format_double(res) << "," << io::format_double(prev_res / res) << ","
            << io::format_double(gap) << "," << io::format_double(prev_gap / gap) << "\n";
        spdlog::info("eps {:.3e}  residual {:.3e}  gap {:.3e}", eps, res, gap);
        prev_res = res;
        prev_gap = gap;
    }
    std::cout << "Lindstedt series to order " << order << ": lambda^1 = " << io::format_double(series.lambda_terms[0])
              << "\n";
    return kSuccess;
}

std::vector<double> ramp_grid(const RampSpec& ramp) {
    if (!(ramp.stop >= ramp.start)) throw Error(ErrorKind::config, "config field 'ramp.stop': must be >= ramp.start");
    std::vector<double> grid;
    const auto count = static_cast<long>(std::floor((ramp.stop - ramp.start) / ramp.step + 1e-9));
    for (long i = 0; i <= count; ++i) grid.push_back(ramp.start + static_cast<double>(i) * ramp.step);
    return grid;
}

void write_records(const Context& ctx, const std::vector<ContinuationRecord>& records) {
    {
        auto out = open_out(ctx.out / "records.jsonl");
        io::write_records_jsonl(out, records, ctx.provenance);
    }
    auto out = open_out(ctx.out / "records.csv");
    io::write_records_csv(out, records, ctx.provenance);
}

void log_records(const std::vector<ContinuationRecord>& records) {
    for (const auto& r : records) {
        if (r.converged) {
            spdlog::info("param {:.6f}  iters {}  H^m {:.4e}  decay {:.4f}  min l {:.4f}", r.param, r.iterations,
                         r.sobolev_m, r.decay.rate, r.min_l);
        } else {
            spdlog::info("param {:.6f}  {}", r.param, r.failure);
        }
    }
}

int cmd_continue(const Context& ctx) {
    const ContinuationRun run = continue_family(ramp_grid(ctx.config.ramp), continuation_of(ctx.config));
    log_records(run.records);
    write_records(ctx, run.records);
    if (run.last_state) write_state(ctx, ctx.out / "last_state.dat", *run.last_state, run.last_state->iteration);
    std::size_t converged = 0;
    for (const auto& r : run.records) converged += r.converged;
    std::cout << converged << " of " << run.records.size() << " parameter points converged; last converged param = "
              << io::format_double(run.last_param) << "\n";
    return kSuccess;
}

int cmd_bisect(const Context& ctx) {
    const ContinuationConfig cc = continuation_of(ctx.config);
    double lower = 0.0, upper = 0.0;
    std::optional<SolverState> warm;
    if (ctx.config.bisect.lower && ctx.config.bisect.upper) {
        lower = *ctx.config.bisect.lower;
        upper = *ctx.config.bisect.upper;
    } else {
        const ContinuationRun run = continue_family(ramp_grid(ctx.config.ramp), cc);
        log_records(run.records);
        write_records(ctx, run.records);
        const auto failed = std::find_if(run.records.begin(), run.records.end(),
                                         [](const ContinuationRecord& r) { return !r.converged; });
        if (failed == run.records.end()) {
            throw Error(ErrorKind::bracket, "the ramp converged everywhere; extend ramp.stop to find a breakdown");
        }
        lower = run.last_param;
        upper = failed->param;
        warm = run.last_state;
    }
    const BreakdownEstimate est = bisect_breakdown(lower, upper, cc, ctx.config.bisect.width_tol, warm);
    ordered_json doc;
    doc["provenance"] = provenance_json(ctx.provenance);
    doc["lower"] = est.lower;
    doc["upper"] = est.upper;
    doc["bracket_width"] = est.bracket_width;
    doc["steps"] = est.steps;
    write_json(ctx.out / "bisect.json", doc);
    std::cout << "breakdown bracket [" << io::format_double(est.lower) << ", " << io::format_double(est.upper)
              << "] after " << est.steps << " bisection steps\n";
    return kSuccess;
}

// Zero-mean random perturbation of the given H^m size.
TorusFunction random_perturbation(const Grid& grid, double m, double size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    TorusFunction p(grid.dim(), grid.resolution());
    std::vector<int> k(grid.dim());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        grid.index_of(i, k);
        // Geometric damping keeps the perturbation smooth.
        const double damp = std::exp(-0.5 * norm1(k));
        p.coeffs()[i] = damp * cplx(normal(rng), normal(rng));
    }
    p.enforce_hermitian();
    p.drop_nyquist();
    p.coeffs()[0] = {};
    p *= size / sobolev_norm(p, m);
    return p;
}

int cmd_verify(const Context& ctx, const std::string& state_path) {
    const FrequencyData freq = frequency_of(ctx.config);
    const ForceModel force = force_of(ctx.config);
    const double m = ctx.config.monitor_m();

    SolverState state;
    std::string source;
    if (!state_path.empty()) {
        double lambda = 0.0;
        TorusFunction h = read_state(state_path, ctx.config, &lambda);
        state = make_state(std::move(h), lambda, force, freq, m);
        source = state_path;
    } else {
        state = solve_or_record(ctx, initial_state(ctx), force, freq).state;
        source = "solved";
    }

    const IdentityReport ids = verify_identities(state.h, state.lambda, force, freq);
    const APosterioriReport post = aposteriori_report(state, force, freq, m);
    const double worst_identity =
        std::max({ids.geometric, ids.decomposition, ids.quasi_newton_equation, ids.w_identity});

    // Local uniqueness: a perturbed start must come back to the same normalized solution.
    double uniqueness_gap = NAN;
    try {
        SolverState perturbed;
        perturbed.h = state.h + random_perturbation(state.h.grid(), m, 1e-4, ctx.config.seed);
        perturbed.lambda = state.lambda;
        const SolveResult again = solve(std::move(perturbed), force, freq, solve_options(ctx.config));
        uniqueness_gap = sobolev_norm(again.state.h - state.h, 0.0);
    } catch (const Error& err) {
        spdlog::warn("re-solve from the perturbed state failed: {}", err.what());
    }

    ordered_json doc;
    doc["provenance"] = provenance_json(ctx.provenance);
    doc["state"] = source;
    doc["lambda"] = state.lambda;
    doc["residual_sup"] = number(state.residual.sup);
    doc["residual_Hm"] = number(state.residual.sobolev_m);
    doc["identities"] = {{"geometric", number(ids.geometric)},
                         {"decomposition", number(ids.decomposition)},
                         {"quasi_newton_equation", number(ids.quasi_newton_equation)},
                         {"w_identity", number(ids.w_identity)},
                         {"max", number(worst_identity)},
                         {"below_1e-10", worst_identity < 1e-10}};
    doc["vanishing_lemma"] = {{"gradient_force", force.is_gradient}, {"abs_lambda", std::abs(state.lambda)}};
    doc["local_uniqueness_gap"] = number(uniqueness_gap);
    const auto& c = post.conditions;
    doc["conditions"] = {{"m", c.m},
                         {"n_plus_sup", number(c.n_plus_sup)},
                         {"n_plus_hm", number(c.n_plus_hm)},
                         {"n_minus_sup", number(c.n_minus_sup)},
                         {"n_minus_hm", number(c.n_minus_hm)},
                         {"c_avg", number(c.c_avg)},
                         {"min_l", number(c.min_l)},
                         {"epsilon_sup", number(c.epsilon_sup)},
                         {"epsilon_hm", number(c.epsilon_hm)},
                         {"nu_hat", number(c.nu_hat)},
                         {"tau", number(c.tau)}};
    doc["decay"] = {{"rate", number(post.decay.rate)},
                    {"status", post.decay.status == DecayStatus::ok
                                   ? "ok"
                                   : (post.decay.status == DecayStatus::undefined ? "undefined" : "non_analytic")},
                    {"shells_used", post.decay.shells_used}};
    doc["verdict"] = to_string(post.verdict);
    doc["reason"] = post.reason;
    write_json(ctx.out / "verify.json", doc);

    std::cout << "verdict: " << to_string(post.verdict) << (post.reason.empty() ? "" : " (" + post.reason + ")")
              << "\nidentity residuals: geometric " << io::format_double(ids.geometric) << ", decomposition "
              << io::format_double(ids.decomposition) << ", quasi-Newton " << io::format_double(ids.quasi_newton_equation)
              << ", W " << io::format_double(ids.w_identity) << "\n";
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Quasi-Newton solver for hull functions of Frenkel-Kontorova models on quasicrystals"};
    app.set_version_flag("--version", std::string(io::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::string log_level = "warn";
    std::string state_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
            ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    };
    auto* solve_cmd = app.add_subcommand("solve", "solve for a hull function and its counterterm");
    auto* lindstedt_cmd = app.add_subcommand("lindstedt", "Lindstedt series and its scaling table");
    auto* continue_cmd = app.add_subcommand("continue", "continue the family along the amplitude ramp");
    auto* bisect_cmd = app.add_subcommand("bisect", "bisect the breakdown threshold");
    auto* verify_cmd = app.add_subcommand("verify", "identity residuals and a-posteriori report");
    for (auto* sub : {solve_cmd, lindstedt_cmd, continue_cmd, bisect_cmd, verify_cmd}) add_common(sub);
    verify_cmd->add_option("--state", state_path, "coefficient dump to verify (solves first when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kSuccess : kValidation;
    }

    auto logger = spdlog::get("qpfk");
    if (!logger) logger = spdlog::stderr_color_st("qpfk");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(log_level));
    spdlog::set_pattern("[%l] %v");
    if (threads > 0) set_thread_count(threads);

    std::optional<Context> ctx;
    try {
        ctx = load(config_path, out_dir);
        if (*solve_cmd) return cmd_solve(*ctx);
        if (*lindstedt_cmd) return cmd_lindstedt(*ctx);
        if (*continue_cmd) return cmd_continue(*ctx);
        if (*bisect_cmd) return cmd_bisect(*ctx);
        return cmd_verify(*ctx, state_path);
    } catch (const Error& err) {
        const ExitCode code = exit_code_of(err.kind());
        std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
        if (code == kNumerical && ctx && !fs::exists(ctx->out / "failure.json")) {
            try {
                write_failure(*ctx, err, nullptr, -1);
            } catch (const Error&) {
                return kIo;
            }
        }
        return code;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kIo;
    }
}

}  // namespace qpfk::cli
