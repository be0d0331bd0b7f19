#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpfk/error.hpp"
#include "qpfk/model.hpp"
#include "support.hpp"

using namespace qpfk;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::vector<int> e1{1, 0}, e2{0, 1}, me1{-1, 0}, me2{0, -1};
}  // namespace

TEST_CASE("two-sine potential gives the chain-rule force") {
    const double a = 0.3, b = 0.7;
    const ForceModel force = build_force(two_sine_potential(test::kAlpha, a, b));
    CHECK(force.is_gradient);
    const TorusFunction u = force.as_function(16);
    // U = 2 pi a cos(2 pi s_1) + 2 pi sqrt(2) b cos(2 pi s_2)
    CHECK(std::abs(u.coeff(e1) - kTwoPi * a / 2.0) < 1e-15);
    CHECK(std::abs(u.coeff(me1) - kTwoPi * a / 2.0) < 1e-15);
    CHECK(std::abs(u.coeff(e2) - kTwoPi * std::numbers::sqrt2 * b / 2.0) < 1e-14);
    CHECK(std::abs(u.coeff(me2) - kTwoPi * std::numbers::sqrt2 * b / 2.0) < 1e-14);
    CHECK(sup_norm(u) == doctest::Approx(kTwoPi * (a + std::numbers::sqrt2 * b)));
}

TEST_CASE("force spec flags and validation") {
    const ForceModel empty = build_force(ForceSpec{test::kAlpha, std::nullopt, std::nullopt});
    CHECK(empty.is_gradient);
    CHECK(empty.modes.empty());
    CHECK(sup_norm(empty.as_function(8)) == 0.0);

    const std::vector<ForceMode> cosine{{e1, 0.5}, {me1, 0.5}};
    CHECK_FALSE(build_force(ForceSpec{test::kAlpha, cosine, std::nullopt}).is_gradient);

    const std::vector<ForceMode> lopsided{{e1, cplx(0.5, 0.1)}};
    try {
        (void)build_force(ForceSpec{test::kAlpha, lopsided, std::nullopt});
        FAIL("non-Hermitian modes accepted");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::symmetry_violation);
    }
    CHECK_THROWS_AS(build_force(ForceSpec{test::kAlpha, cosine, cosine}), Error);

    const std::vector<ForceMode> wide{{{8, 0}, 0.5}, {{-8, 0}, 0.5}};
    const ForceModel far = build_force(ForceSpec{test::kAlpha, wide, std::nullopt});
    CHECK_THROWS_AS(far.as_function(16), Error);
}

TEST_CASE("scaled and derivative") {
    const ForceModel f = test::example_force(1.0);
    const TorusFunction u = f.as_function(16);
    CHECK(test::max_abs_diff(f.scaled(0.25).as_function(16), 0.25 * u) < 1e-16);
    CHECK(test::max_abs_diff(f.derivative().as_function(16), dalpha(u, test::kAlpha)) < 1e-14);
}

TEST_CASE("force composition") {
    const ForceModel force = test::example_force(1.0);
    SUBCASE("zero displacement samples U itself") {
        CHECK(test::max_abs_diff(eval_force_along(TorusFunction(2, 16), force), force.as_function(16)) < 1e-15);
    }
    SUBCASE("zero force") {
        const ForceModel none = build_force(ForceSpec{test::kAlpha, std::nullopt, std::nullopt});
        CHECK(sup_norm(eval_force_along(test::random_function(2, 16, 1, 0.1), none)) == 0.0);
    }
    SUBCASE("constant displacement is a phase shift") {
        const std::vector<ForceMode> single{{e2, cplx(0.2, 0.1)}, {me2, cplx(0.2, -0.1)}};
        const ForceModel one = build_force(ForceSpec{test::kAlpha, single, std::nullopt});
        const double c = 0.37;
        const TorusFunction out = eval_force_along(TorusFunction::constant(2, 16, c), one);
        const cplx expected = cplx(0.2, 0.1) * std::exp(cplx(0.0, kTwoPi * std::numbers::sqrt2 * c));
        CHECK(std::abs(out.coeff(e2) - expected) < 1e-13);
        CHECK(std::abs(out.coeff(me2) - std::conj(expected)) < 1e-13);
    }
}

TEST_CASE("error functional") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel none = build_force(ForceSpec{test::kAlpha, std::nullopt, std::nullopt});
    const TorusFunction zero(2, 16);

    CHECK(error_functional(zero, 0.0, none, freq).sup == 0.0);
    const EquilibriumError c = error_functional(zero, 0.3, none, freq);
    CHECK(std::abs(c.values.coeffs()[0] - 0.3) < 1e-16);
    CHECK(c.sup == doctest::Approx(0.3));

    const TorusFunction h = test::random_function(2, 16, 8, 0.01);
    const TorusFunction e = error_functional(h, 0.0, none, freq).values;
    std::vector<int> k(2);
    double worst = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        h.grid().index_of(i, k);
        const double theta = k[0] * freq.shift[0] + k[1] * freq.shift[1];
        worst = std::max(worst, std::abs(e.coeffs()[i] - 2.0 * (std::cos(kTwoPi * theta) - 1.0) * h.coeffs()[i]));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("linearized error matches a central difference") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel force = test::example_force(0.5);
    const TorusFunction h = test::random_function(2, 16, 41, 0.01);
    const TorusFunction d = test::random_function(2, 16, 42, 1.0);
    const double t = 1e-5;
    const TorusFunction fd = (1.0 / (2.0 * t)) * (error_functional(h + t * d, 0.0, force, freq).values -
                                                  error_functional(h - t * d, 0.0, force, freq).values);
    CHECK(test::max_abs_diff(fd, linearized_error(h, d, force, freq)) < 1e-8);
}
