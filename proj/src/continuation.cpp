#include "qpfk/continuation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "qpfk/cohomology.hpp"
#include "qpfk/error.hpp"
#include "qpfk/lindstedt.hpp"

namespace qpfk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Attempt {
    bool converged = false;
    bool breakdown = false;  // converged, but a breakdown signal fired
    SolverState state;
    int iterations = 0;
    double min_l = kNaN;
    std::string failure;
};

struct StepControl {
    double step;
    int quick_successes = 0;
};

double min_l_of(const TorusFunction& h, const FrequencyData& freq) {
    const auto values = synthesize(conjugacy_derivative(h, freq), kDealiasFactor * h.resolution());
    double m = std::numeric_limits<double>::infinity();
    for (double v : values) m = std::min(m, v);
    return m;
}

Attempt attempt_solve(const ContinuationConfig& config, double param, const SolverState& warm) {
    Attempt out;
    const ForceModel force = config.base_force.scaled(param);
    try {
        SolveResult result = solve(warm, force, config.freq, config.solve);
        out.iterations = result.state.iteration;
        out.state = std::move(result.state);
        out.converged = true;
    } catch (const SolveFailure& err) {
        out.iterations = err.iteration();
        out.failure = err.what();
        return out;
    } catch (const Error& err) {
        out.failure = err.what();
        return out;
    }

    out.min_l = min_l_of(out.state.h, config.freq);
    if (out.min_l < config.min_l_floor) {
        out.breakdown = true;
        out.failure = "min l = " + std::to_string(out.min_l) + " below floor";
        return out;
    }
    if (config.sobolev_reference && *config.sobolev_reference > 0.0) {
        const double norm = monitor_norm(out.state.h, config.freq, config.m);
        if (norm > config.sobolev_blowup * std::abs(param) * *config.sobolev_reference) {
            out.breakdown = true;
            out.failure = "Sobolev norm blow-up";
        }
    }
    return out;
}

// Continues a converged state from `from` to `to` in adaptive sub-steps.
Attempt advance(const ContinuationConfig& config, const SolverState& start, double from, double to,
                StepControl& control) {
    const double direction = to >= from ? 1.0 : -1.0;
    double p = from;
    Attempt last;
    last.converged = true;
    last.state = start;
    if (from == to) {
        last = attempt_solve(config, to, start);
        return last;
    }
    while (direction * (to - p) > 0.0) {
        double step = std::min(control.step, direction * (to - p));
        double target = p + direction * step;
        if (direction * (to - target) < 1e-12 * std::max(1.0, std::abs(to))) target = to;

        Attempt a = attempt_solve(config, target, last.state);
        if (a.converged && !a.breakdown) {
            p = target;
            last = std::move(a);
            if (last.iterations <= 3) {
                if (++control.quick_successes >= 3) {
                    control.step = std::min(2.0 * control.step, config.max_step);
                    control.quick_successes = 0;
                }
            } else {
                control.quick_successes = 0;
            }
            continue;
        }
        if (a.breakdown) return a;
        control.quick_successes = 0;
        control.step *= 0.5;
        if (control.step < config.min_step) {
            control.step = config.min_step;
            a.failure += " (step fell below min_step)";
            return a;
        }
    }
    return last;
}

ContinuationRecord record_of(double param, const Attempt& a, const FrequencyData& freq, double m, double seconds) {
    ContinuationRecord rec;
    rec.param = param;
    rec.converged = a.converged && !a.breakdown;
    rec.iterations = a.iterations;
    rec.wall_time = seconds;
    rec.failure = rec.converged ? std::string{} : a.failure;
    if (a.converged) {
        rec.lambda_star = a.state.lambda;
        rec.residual = a.state.residual.sup;
        rec.sobolev_m = monitor_norm(a.state.h, freq, m);
        rec.decay = decay_fit(a.state.h);
        rec.min_l = a.min_l;
    } else {
        rec.lambda_star = kNaN;
        rec.residual = kNaN;
        rec.sobolev_m = kNaN;
        rec.min_l = kNaN;
    }
    return rec;
}

SolverState zero_state(const ContinuationConfig& config) {
    SolverState s;
    s.h = TorusFunction(config.freq.dim(), config.resolution);
    return s;
}

}  // namespace

double default_monitor_exponent(int dim, double tau) { return std::floor(dim / 2.0 + 2.0 * tau) + 1.0; }

double linear_response_norm(const ContinuationConfig& config) {
    if (config.base_force.modes.empty()) return 0.0;
    const LindstedtSeries first = lindstedt_expand(config.base_force, config.freq, config.resolution, 1);
    return monitor_norm(first.h_terms.front(), config.freq, config.m);
}

double monitor_norm(const TorusFunction& h, const FrequencyData& freq, double m) {
    double largest = 0.0;
    for (const auto& c : h.coeffs()) largest = std::max(largest, std::abs(c));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * largest;
    const Grid& grid = h.grid();
    std::vector<int> k(grid.dim());
    double sum = 0.0;
    for (std::size_t flat = 0; flat < h.size(); ++flat) {
        const double mag = std::abs(h.coeffs()[flat]);
        if (mag == 0.0) continue;
        grid.index_of(flat, k);
        double theta = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) theta += k[i] * freq.shift[i];
        const double divisor = std::abs(second_difference_symbol(theta));
        if (mag * divisor <= floor) continue;
        double k2 = 0.0;
        for (int ki : k) k2 += double(ki) * ki;
        sum += mag * mag * std::pow(1.0 + k2, m);
    }
    return std::sqrt(sum);
}

ContinuationRun continue_family(std::span<const double> param_grid, ContinuationConfig config) {
    ContinuationRun run;
    if (param_grid.empty()) return run;
    for (std::size_t i = 1; i + 1 < param_grid.size(); ++i) {
        const double a = param_grid[i] - param_grid[i - 1];
        const double b = param_grid[i + 1] - param_grid[i];
        if (a * b < 0.0) throw Error(ErrorKind::invalid_argument, "parameter grid is not monotone");
    }

    using clock = std::chrono::steady_clock;
    if (!config.sobolev_reference) config.sobolev_reference = linear_response_norm(config);
    StepControl control{config.initial_step};

    auto t0 = clock::now();
    Attempt seed = attempt_solve(config, param_grid[0], zero_state(config));
    if (!seed.converged || seed.breakdown) {
        throw Error(ErrorKind::seed_failure,
                    "first grid point " + std::to_string(param_grid[0]) + " failed: " + seed.failure);
    }
    run.records.push_back(record_of(param_grid[0], seed, config.freq, config.m,
                                    std::chrono::duration<double>(clock::now() - t0).count()));
    SolverState current = std::move(seed.state);
    double current_param = param_grid[0];

    bool failed = false;
    for (std::size_t i = 1; i < param_grid.size(); ++i) {
        const double p = param_grid[i];
        if (failed) {
            ContinuationRecord skipped;
            skipped.param = p;
            skipped.attempted = false;
            skipped.lambda_star = skipped.residual = skipped.sobolev_m = skipped.min_l = kNaN;
            skipped.failure = "not attempted after earlier failure";
            run.records.push_back(skipped);
            continue;
        }
        t0 = clock::now();
        Attempt a = advance(config, current, current_param, p, control);
        const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
        run.records.push_back(record_of(p, a, config.freq, config.m, seconds));
        if (run.records.back().converged) {
            current = std::move(a.state);
            current_param = p;
        } else {
            failed = true;
        }
    }
    run.last_state = std::move(current);
    run.last_param = current_param;
    return run;
}

BreakdownEstimate bisect_breakdown(double lower, double upper, ContinuationConfig config, double width_tol,
                                   std::optional<SolverState> warm) {
    if (!config.sobolev_reference) config.sobolev_reference = linear_response_norm(config);
    if (!(lower < upper)) throw Error(ErrorKind::bracket, "bracket needs lower < upper");
    if (!(width_tol > 0.0)) throw Error(ErrorKind::invalid_argument, "bracket width tolerance must be positive");

    SolverState at_lower;
    if (warm) {
        at_lower = std::move(*warm);
    } else {
        StepControl control{config.initial_step};
        Attempt a = advance(config, zero_state(config), 0.0, lower, control);
        if (!a.converged || a.breakdown) {
            throw Error(ErrorKind::bracket, "family does not converge at the lower end: " + a.failure);
        }
        at_lower = std::move(a.state);
    }
    {
        StepControl control{config.initial_step};
        Attempt a = advance(config, at_lower, lower, upper, control);
        if (a.converged && !a.breakdown) {
            throw Error(ErrorKind::bracket, "family still converges at the upper end " + std::to_string(upper));
        }
    }

    BreakdownEstimate est{lower, upper, upper - lower, 0};
    while (est.upper - est.lower > width_tol) {
        const double mid = 0.5 * (est.lower + est.upper);
        StepControl control{config.initial_step};
        Attempt a = advance(config, at_lower, est.lower, mid, control);
        if (a.converged && !a.breakdown) {
            est.lower = mid;
            at_lower = std::move(a.state);
        } else {
            est.upper = mid;
        }
        ++est.steps;
    }
    est.bracket_width = est.upper - est.lower;
    return est;
}

}  // namespace qpfk
