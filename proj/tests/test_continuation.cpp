#include <doctest.h>

#include <cmath>

#include "qpfk/continuation.hpp"
#include "qpfk/error.hpp"
#include "support.hpp"

using namespace qpfk;

namespace {

ContinuationConfig small_config(const ForceModel& force, int n = 64) {
    ContinuationConfig c;
    c.base_force = force;
    c.freq = test::golden_frequency();
    c.resolution = n;
    c.m = 10.0;
    c.solve.m = c.m;
    c.solve.tol = 1e-11;
    c.initial_step = 0.0025;
    c.min_step = 1e-4;
    return c;
}

}  // namespace

TEST_CASE("monitor exponent") {
    CHECK(default_monitor_exponent(2, 4.0) == 10.0);
    CHECK(default_monitor_exponent(2, 3.5) == 9.0);
    CHECK(default_monitor_exponent(3, 4.0) == 10.0);
}

TEST_CASE("trivial family") {
    const ForceModel none = build_force(ForceSpec{test::kAlpha, std::nullopt, std::nullopt});
    const std::vector<double> grid{0.0, 0.5, 1.0, 1.5};
    const ContinuationRun run = continue_family(grid, small_config(none, 16));
    REQUIRE(run.records.size() == grid.size());
    for (const auto& r : run.records) {
        CHECK(r.converged);
        CHECK(r.sobolev_m == 0.0);
    }
    CHECK(run.last_param == 1.5);
}

TEST_CASE("small ramp: completeness, monotone norms, warm starts") {
    const ForceModel force = test::example_force(1.0);
    const ContinuationConfig config = small_config(force);
    const std::vector<double> grid{0.0, 0.0025, 0.005, 0.0075, 0.01};
    const ContinuationRun run = continue_family(grid, config);
    REQUIRE(run.records.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = run.records[i];
        CHECK(r.param == grid[i]);
        CHECK(r.converged);
        CHECK(r.residual <= config.solve.tol);
        CHECK(std::abs(r.lambda_star) <= 1e-10);
        if (i > 0) CHECK(r.sobolev_m >= run.records[i - 1].sobolev_m);
        if (i > 0) {
            SolverState zero;
            zero.h = TorusFunction(2, config.resolution);
            const SolveResult cold = solve(zero, force.scaled(grid[i]), config.freq, config.solve);
            CHECK(r.iterations <= cold.state.iteration);
        }
    }
}

TEST_CASE("continuation errors") {
    const ForceModel force = test::example_force(1.0);
    const std::vector<double> zigzag{0.0, 0.01, 0.005};
    CHECK_THROWS_AS(continue_family(zigzag, small_config(force)), Error);

    const std::vector<double> hopeless{0.5};
    try {
        (void)continue_family(hopeless, small_config(force));
        FAIL("seed accepted");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::seed_failure);
    }

    try {
        (void)bisect_breakdown(0.01, 0.01, small_config(force), 1e-3);
        FAIL("degenerate bracket accepted");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::bracket);
    }
    try {
        (void)bisect_breakdown(0.0, 0.005, small_config(force), 1e-3);
        FAIL("converging upper end accepted");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::bracket);
    }
}

TEST_CASE("failure stops the ramp and later points are recorded") {
    const ForceModel force = test::example_force(1.0);
    const std::vector<double> grid{0.0, 0.01, 0.2, 0.3};
    ContinuationConfig config = small_config(force);
    config.min_step = 0.02;
    const ContinuationRun run = continue_family(grid, config);
    REQUIRE(run.records.size() == 4);
    CHECK(run.records[1].converged);
    CHECK_FALSE(run.records[2].converged);
    CHECK_FALSE(run.records[2].failure.empty());
    CHECK_FALSE(run.records[3].attempted);
    CHECK(run.last_param == 0.01);
}
