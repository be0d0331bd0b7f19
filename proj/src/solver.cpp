#include "qpfk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qpfk/kernels.hpp"

namespace qpfk {

namespace {

std::vector<double> negated(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    for (auto& x : out) x = -x;
    return out;
}

double min_on_fine_grid(const TorusFunction& f) {
    const auto values = synthesize(f, kDealiasFactor * f.resolution());
    return *std::min_element(values.begin(), values.end());
}

double max_abs_on_fine_grid(const TorusFunction& f) {
    double s = 0.0;
    for (double v : synthesize(f, kDealiasFactor * f.resolution())) s = std::max(s, std::abs(v));
    return s;
}

void zero_mean(TorusFunction& f) { f.coeffs()[0] = {}; }

std::string io_fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

}  // namespace

void restrict_band(TorusFunction& f, int cutoff) {
    const Grid& grid = f.grid();
    std::vector<int> k(grid.dim());
    auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        grid.index_of(i, k);
        for (int ki : k) {
            if (std::abs(ki) >= cutoff) {
                c[i] = {};
                break;
            }
        }
    }
}

int correction_cutoff(int resolution, double fraction) {
    return std::max(1, static_cast<int>(std::lround(fraction * resolution / 2.0)));
}

double residual_scale(const SolverState& state, const ForceModel& force) {
    double u = 0.0;
    for (const auto& mode : force.modes) u += std::abs(mode.amplitude);
    return u + std::abs(state.lambda) + 4.0 * sup_norm(state.h);
}

SolverState make_state(TorusFunction h, double lambda, const ForceModel& force, const FrequencyData& freq, double m) {
    SolverState state;
    state.residual = error_functional(h, lambda, force, freq, m);
    state.h = std::move(h);
    state.lambda = lambda;
    return state;
}

TorusFunction conjugacy_derivative(const TorusFunction& h, const FrequencyData& freq) {
    TorusFunction l = dalpha(h, freq.alpha);
    l.add_constant(1.0);
    return l;
}

ConditionReport condition_numbers(const TorusFunction& h, const FrequencyData& freq, double m) {
    const TorusFunction l = conjugacy_derivative(h, freq);
    ConditionReport report;
    report.m = m;
    report.nu_hat = freq.nu_hat;
    report.tau = freq.tau;
    report.min_l = min_on_fine_grid(l);
    if (!(report.min_l > kDegeneracyFloor)) throw DegenerateConjugacy(report.min_l);

    report.n_plus_sup = max_abs_on_fine_grid(l);
    report.n_plus_hm = sobolev_norm(l, m);
    const TorusFunction inv_l = pointwise([](double x) { return 1.0 / x; }, l);
    report.n_minus_sup = 1.0 / report.min_l;
    report.n_minus_hm = sobolev_norm(inv_l, m);
    const TorusFunction l_back = shift(l, negated(freq.shift));
    const TorusFunction q = pointwise([](double a, double b) { return 1.0 / (a * b); }, l, l_back);
    report.c_avg = std::abs(mean(q));
    return report;
}

StepOutput approximate_inverse(const TorusFunction& h, const TorusFunction& e, const FrequencyData& freq,
                               const NoiseControl& noise) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    StepOutput out;
    StepInternals& in = out.internals;
    in.e = e;

    // Every product is formed on the dealiased grid. l and its backward
    // shift enter four of them, so their values are synthesized once.
    const int dim = h.dim();
    const int n = h.resolution();
    const int fine = kDealiasFactor * n;
    in.l = conjugacy_derivative(h, freq);
    const auto l_vals = synthesize(in.l, fine);
    const double min_l = *std::min_element(l_vals.begin(), l_vals.end());
    if (!(min_l > kDegeneracyFloor)) throw DegenerateConjugacy(min_l);
    double max_l = 0.0;
    for (double v : l_vals) max_l = std::max(max_l, std::abs(v));

    std::vector<double> work = synthesize(e, fine);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= l_vals[i];
    in.f = analyze_to_band(work, dim, fine, n);
    out.delta_lambda = -mean(in.f);
    // l (e + delta_lambda) = f + delta_lambda l, and l lies in the band.
    in.b = in.f + out.delta_lambda * in.l;

    CohomologyOptions first;
    first.reference_scale = sobolev_norm(in.l, 0.0) * sobolev_norm(e, 0.0);
    first.noise_floor = noise.factor * eps * noise.scale * max_l;
    auto w0 = solve_first_difference(in.b, freq, Direction::forward, first);
    in.w0 = std::move(w0.phi);
    in.removed_mean_b = w0.removed_mean;

    // q = 1 / (l . l o T_{-shift}); W_bar makes <W q> vanish.
    const auto l_back_vals = synthesize(shift(in.l, negated(freq.shift)), fine);
    std::vector<double> q_vals(l_vals.size());
    for (std::size_t i = 0; i < q_vals.size(); ++i) q_vals[i] = 1.0 / (l_vals[i] * l_back_vals[i]);
    const TorusFunction q = analyze_to_band(q_vals, dim, fine, n);
    work = synthesize(in.w0, fine);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= q_vals[i];
    TorusFunction a = analyze_to_band(work, dim, fine, n);
    in.w_bar = -mean(a) / mean(q);
    in.w = in.w0;
    in.w.add_constant(in.w_bar);

    CohomologyOptions second;
    second.reference_scale = sobolev_norm(a, 0.0) + std::abs(in.w_bar) * sobolev_norm(q, 0.0);
    a += in.w_bar * q;
    second.noise_floor = noise.factor * eps * max_abs_on_fine_grid(a);
    auto beta = solve_first_difference(a, freq, Direction::backward, second);
    in.beta_tilde = std::move(beta.phi);
    in.removed_mean_a = beta.removed_mean;

    work = synthesize(in.beta_tilde, fine);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= l_vals[i];
    TorusFunction beta_l = analyze_to_band(work, dim, fine, n);
    in.beta_bar = -mean(beta_l) / mean(in.l);
    out.delta_h = std::move(beta_l);
    out.delta_h += in.beta_bar * in.l;
    zero_mean(out.delta_h);
    return out;
}

StepOutput quasi_newton_step(const SolverState& state, const ForceModel& force, const FrequencyData& freq,
                             const NoiseControl& noise) {
    const EquilibriumError err = error_functional(state.h, state.lambda, force, freq);
    return approximate_inverse(state.h, err.values, freq, noise);
}

SolveResult solve(SolverState initial, const ForceModel& force, const FrequencyData& freq,
                  const SolveOptions& options) {
    SolveResult result;
    SolverState state = make_state(std::move(initial.h), initial.lambda, force, freq, options.m);
    result.history.push_back({0, state.residual.sup, state.residual.sobolev_m, state.lambda, 0.0});
    const double initial_residual = state.residual.sup;
    const int cutoff = correction_cutoff(state.h.resolution(), options.correction_fraction);

    auto fail = [&](ErrorKind kind, const std::string& why, int iteration) {
        throw SolveFailure(kind, why, result.history, iteration);
    };

    for (int n = 1; state.residual.sup > options.tol; ++n) {
        if (n > options.max_iter) {
            fail(ErrorKind::divergence,
                 "no convergence after " + std::to_string(options.max_iter) + " iterations (residual " +
                     io_fmt(state.residual.sup) + ")",
                 n - 1);
        }
        StepOutput step;
        try {
            step = quasi_newton_step(state, force, freq, {options.noise_factor, residual_scale(state, force)});
        } catch (const DegenerateConjugacy& err) {
            fail(ErrorKind::degenerate_conjugacy, err.what() + std::string(" at iteration ") + std::to_string(n), n);
        }
        restrict_band(step.delta_h, cutoff);
        TorusFunction h = state.h + step.delta_h;
        zero_mean(h);
        const double delta_norm = sobolev_norm(step.delta_h, 0.0);
        state = make_state(std::move(h), state.lambda + step.delta_lambda, force, freq, options.m);
        state.iteration = n;
        result.history.push_back({n, state.residual.sup, state.residual.sobolev_m, state.lambda, delta_norm});

        const double r = state.residual.sup;
        if (!std::isfinite(r) || r > options.blowup_factor * std::max(initial_residual, options.tol)) {
            fail(ErrorKind::divergence, "residual blew up to " + io_fmt(r), n);
        }
    }
    result.state = std::move(state);
    return result;
}

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::certifiable_shape: return "certifiable-shape";
        case Verdict::flagged: return "flagged";
        case Verdict::degenerate: return "degenerate";
    }
    return "unknown";
}

APosterioriReport aposteriori_report(const SolverState& state, const ForceModel& force, const FrequencyData& freq,
                                     double m, const APosterioriOptions& options) {
    APosterioriReport report;
    const EquilibriumError err = error_functional(state.h, state.lambda, force, freq, m);
    report.decay = decay_fit(state.h);
    try {
        report.conditions = condition_numbers(state.h, freq, m);
    } catch (const DegenerateConjugacy& err_l) {
        report.conditions.m = m;
        report.conditions.min_l = err_l.min_l();
        report.conditions.nu_hat = freq.nu_hat;
        report.conditions.tau = freq.tau;
        report.conditions.n_minus_sup = std::numeric_limits<double>::infinity();
        report.conditions.epsilon_sup = err.sup;
        report.conditions.epsilon_hm = err.sobolev_m;
        report.verdict = Verdict::degenerate;
        report.reason = "l = 1 + dalpha h vanishes";
        return report;
    }
    report.conditions.epsilon_sup = err.sup;
    report.conditions.epsilon_hm = err.sobolev_m;

    std::vector<std::string> reasons;
    if (!(err.sup <= options.epsilon_threshold)) reasons.push_back("residual above threshold");
    if (report.conditions.min_l < options.min_l_warning) reasons.push_back("min l below warning level");
    if (!(freq.nu_hat > 0.0)) reasons.push_back("no Diophantine estimate");
    if (report.decay.status == DecayStatus::non_analytic) reasons.push_back("Fourier coefficients do not decay");

    report.verdict = reasons.empty() ? Verdict::certifiable_shape : Verdict::flagged;
    for (std::size_t i = 0; i < reasons.size(); ++i) report.reason += (i ? "; " : "") + reasons[i];
    return report;
}

IdentityReport verify_identities(const TorusFunction& h, double lambda, const ForceModel& force,
                                 const FrequencyData& freq) {
    const EquilibriumError err = error_functional(h, lambda, force, freq);
    const StepOutput step = approximate_inverse(h, err.values, freq);
    const TorusFunction& e = err.values;
    const TorusFunction& l = step.internals.l;
    const TorusFunction& delta = step.delta_h;
    const double dl = step.delta_lambda;

    IdentityReport report;
    report.e_sup = err.sup;
    report.l_sup = max_abs_on_fine_grid(l);

    const TorusFunction de_delta = linearized_error(h, delta, force, freq);
    const TorusFunction de_l = linearized_error(h, l, force, freq);
    report.geometric = sup_norm(pointwise(
        [dl](double lv, double a, double d, double b, double ev) { return lv * a - d * b + lv * (ev + dl); }, l,
        de_delta, delta, de_l, e));

    const auto fwd = freq.shift;
    const auto back = negated(freq.shift);
    const TorusFunction d_fwd = shift(delta, fwd);
    const TorusFunction d_back = shift(delta, back);
    const TorusFunction l_fwd = shift(l, fwd);
    const TorusFunction l_back = shift(l, back);
    report.quasi_newton_equation = sup_norm(pointwise(
        [dl](double lv, double dp, double dm, double d, double lp, double lm, double ev) {
            return lv * dp + lv * dm - d * (lp + lm) + (ev + dl) * lv;
        },
        l, d_fwd, d_back, delta, l_fwd, l_back, e));

    report.w_identity = sup_norm(step.internals.w - pointwise([](double dm, double lv, double d, double lm) {
                                                       return dm * lv - d * lm;
                                                   },
                                                   d_back, l, delta, l_back));

    // E[h + delta, lambda + dl] = e' delta / l + R with R the Taylor remainder of U along delta.
    TorusFunction h_new = h + delta;
    const EquilibriumError err_new = error_functional(h_new, lambda + dl, force, freq);
    const int fine = kDealiasFactor * h.resolution();
    const Grid grid(h.dim(), fine);
    const auto h_vals = synthesize(h, fine);
    const auto hn_vals = synthesize(h_new, fine);
    const auto d_vals = synthesize(delta, fine);
    const auto l_vals = synthesize(l, fine);
    const auto ep_vals = synthesize(dalpha(e, freq.alpha), fine);
    const auto terms = force.compose_terms();
    const auto dterms = force.derivative().compose_terms();
    std::vector<double> u_new(grid.size()), u_old(grid.size()), du_old(grid.size()), rhs(grid.size());
    kernels::compose_force(default_exec(), grid, terms, hn_vals, u_new);
    kernels::compose_force(default_exec(), grid, terms, h_vals, u_old);
    kernels::compose_force(default_exec(), grid, dterms, h_vals, du_old);
    kernels::for_each_point(default_exec(), rhs.size(), [&](std::size_t i) {
        const double remainder = u_new[i] - u_old[i] - du_old[i] * d_vals[i];
        rhs[i] = ep_vals[i] * d_vals[i] / l_vals[i] + remainder;
    });
    report.decomposition = sup_norm(err_new.values - analyze_to_band(rhs, h.dim(), fine, h.resolution()));
    return report;
}

}  // namespace qpfk
