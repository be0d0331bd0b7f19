#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpfk/error.hpp"
#include "qpfk/solver.hpp"
#include "support.hpp"

using namespace qpfk;

namespace {

ForceModel no_force() { return build_force(ForceSpec{test::kAlpha, std::nullopt, std::nullopt}); }

SolverState zero_state(int n, double lambda = 0.0) {
    SolverState s;
    s.h = TorusFunction(2, n);
    s.lambda = lambda;
    return s;
}

}  // namespace

TEST_CASE("step on the trivial family is exact") {
    const FrequencyData freq = test::golden_frequency();
    const double c = 0.7;
    const StepOutput step = quasi_newton_step(make_state(TorusFunction(2, 16), c, no_force(), freq), no_force(), freq);
    const StepInternals& in = step.internals;
    CHECK(sup_norm(in.l - TorusFunction::constant(2, 16, 1.0)) == 0.0);
    CHECK(sup_norm(in.f - TorusFunction::constant(2, 16, c)) < 1e-16);
    CHECK(step.delta_lambda == doctest::Approx(-c).epsilon(1e-15));
    CHECK(sup_norm(in.b) < 1e-16);
    CHECK(sup_norm(in.w) < 1e-16);
    CHECK(sup_norm(step.delta_h) == 0.0);

    const SolveResult r = solve(zero_state(16, c), no_force(), freq);
    CHECK(r.state.iteration == 1);
    CHECK(std::abs(r.state.lambda) < 1e-15);
    CHECK(r.state.residual.sup < 1e-14);
    CHECK(r.history.size() == 2);
}

TEST_CASE("an exact solution has a zero step") {
    const FrequencyData freq = test::golden_frequency();
    const StepOutput step = quasi_newton_step(make_state(TorusFunction(2, 16), 0.0, no_force(), freq), no_force(), freq);
    CHECK(sup_norm(step.delta_h) == 0.0);
    CHECK(step.delta_lambda == 0.0);
}

TEST_CASE("approximate inverse is linear in e") {
    const FrequencyData freq = test::golden_frequency();
    const TorusFunction h = test::random_function(2, 32, 3, 0.005);
    const TorusFunction e1 = test::random_function(2, 32, 4, 1.0, 0.5, false);
    const TorusFunction e2 = test::random_function(2, 32, 5, 1.0, 0.5, false);
    const StepOutput s1 = approximate_inverse(h, e1, freq);
    const StepOutput s2 = approximate_inverse(h, e2, freq);
    const StepOutput s12 = approximate_inverse(h, e1 + 2.0 * e2, freq);
    CHECK(sobolev_norm(s12.delta_h - s1.delta_h - 2.0 * s2.delta_h, 0.0) < 1e-12 * sobolev_norm(s12.delta_h, 0.0));
    CHECK(s12.delta_lambda == doctest::Approx(s1.delta_lambda + 2.0 * s2.delta_lambda).epsilon(1e-12));
}

TEST_CASE("condition numbers") {
    const FrequencyData freq = test::golden_frequency();
    const ConditionReport trivial = condition_numbers(TorusFunction(2, 16), freq, 10.0);
    CHECK(trivial.n_plus_sup == doctest::Approx(1.0));
    CHECK(trivial.n_minus_sup == doctest::Approx(1.0));
    CHECK(trivial.c_avg == doctest::Approx(1.0));
    CHECK(trivial.min_l == doctest::Approx(1.0));

    // h = eps sin(2 pi s_1) / (2 pi) gives l = 1 + eps cos(2 pi s_1).
    for (double eps : {0.2, 0.9}) {
        TorusFunction h(2, 16);
        h.set_mode(std::vector<int>{1, 0}, cplx(0.0, -eps / (4.0 * std::numbers::pi)));
        CHECK(std::abs(condition_numbers(h, freq, 10.0).min_l - (1.0 - eps)) < 1e-12);
    }
    TorusFunction steep(2, 16);
    steep.set_mode(std::vector<int>{1, 0}, cplx(0.0, -1.5 / (4.0 * std::numbers::pi)));
    CHECK_THROWS_AS(condition_numbers(steep, freq, 10.0), DegenerateConjugacy);

    SolverState s = make_state(steep, 0.0, no_force(), freq);
    const APosterioriReport bad = aposteriori_report(s, no_force(), freq, 10.0);
    CHECK(bad.verdict == Verdict::degenerate);

    const APosterioriReport good = aposteriori_report(make_state(TorusFunction(2, 16), 0.0, no_force(), freq),
                                                      no_force(), freq, 10.0);
    CHECK(good.verdict == Verdict::certifiable_shape);
    CHECK(good.conditions.epsilon_sup == 0.0);
}

TEST_CASE("identities on random states") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel force = test::example_force(0.05);
    for (int trial = 0; trial < 5; ++trial) {
        const TorusFunction h = test::random_function(2, 64, 70 + trial, 0.01, 2.0);
        const IdentityReport r = verify_identities(h, 0.01 * trial, force, freq);
        CHECK(r.geometric <= 1e-10 * r.l_sup * r.e_sup);
        CHECK(r.quasi_newton_equation <= 1e-10 * r.e_sup);
        CHECK(r.w_identity <= 1e-10);
        CHECK(r.decomposition <= 1e-10);
    }
    const IdentityReport exact = verify_identities(TorusFunction(2, 16), 0.0, no_force(), freq);
    CHECK(exact.geometric == 0.0);
    CHECK(exact.decomposition == 0.0);
}

TEST_CASE("gradient force: convergence, vanishing counterterm, uniqueness") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel force = test::example_force(0.01);
    SolveOptions options;
    options.m = 10.0;
    const SolveResult r = solve(zero_state(128), force, freq, options);
    CHECK(r.state.residual.sup <= options.tol);
    CHECK(r.state.iteration <= 8);
    CHECK(std::abs(r.state.lambda) <= 1e-10);
    CHECK(r.state.h.coeffs()[0] == cplx{});

    // A different start reaches the same normalized solution.
    SolverState other = zero_state(128, 1e-3);
    other.h = test::random_function(2, 128, 12, 1e-4, 2.0);
    const SolveResult again = solve(std::move(other), force, freq, options);
    CHECK(sobolev_norm(again.state.h - r.state.h, 0.0) < 1e-9);
}

TEST_CASE("non-gradient force keeps its counterterm") {
    const FrequencyData freq = test::golden_frequency();
    const std::vector<ForceMode> modes{{{0, 0}, 0.4}, {{1, 0}, 0.005}, {{-1, 0}, 0.005}};
    const ForceModel force = build_force(ForceSpec{test::kAlpha, modes, std::nullopt});
    const SolveResult r = solve(zero_state(64), force, freq);
    CHECK(r.state.lambda == doctest::Approx(-0.4).epsilon(1e-3));
}

TEST_CASE("divergence carries its history") {
    const FrequencyData freq = test::golden_frequency();
    SolveOptions options;
    options.max_iter = 6;
    try {
        (void)solve(zero_state(64), test::example_force(0.2), freq, options);
        FAIL("solve converged for a large force");
    } catch (const SolveFailure& err) {
        CHECK((err.kind() == ErrorKind::divergence || err.kind() == ErrorKind::degenerate_conjugacy));
        CHECK(!err.history().empty());
        CHECK(err.history().front().iteration == 0);
    }
}

TEST_CASE("band restriction") {
    TorusFunction f = test::random_function(2, 16, 2, 1.0, 0.0);
    restrict_band(f, 4);
    std::vector<int> k(2);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.grid().index_of(i, k);
        if (std::abs(k[0]) >= 4 || std::abs(k[1]) >= 4) CHECK(f.coeffs()[i] == cplx{});
    }
    CHECK(f.coeff(std::vector<int>{3, -3}) != cplx{});
    CHECK(correction_cutoff(128, 0.5) == 32);
    CHECK(correction_cutoff(128, 1.0) == 64);
}
