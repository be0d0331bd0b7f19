#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpfk/kernels.hpp"
#include "qpfk/lindstedt.hpp"
#include "support.hpp"

using namespace qpfk;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("first-order counterterm is minus the force average") {
    const FrequencyData freq = test::golden_frequency();
    const std::vector<ForceMode> modes{{{0, 0}, 0.4}, {{1, 0}, 0.5}, {{-1, 0}, 0.5}};
    const ForceModel force = build_force(ForceSpec{test::kAlpha, modes, std::nullopt});
    const LindstedtSeries s = lindstedt_expand(force, freq, 16, 3);
    CHECK(s.lambda_terms[0] == doctest::Approx(-0.4).epsilon(1e-14));
    for (const auto& h : s.h_terms) CHECK(h.coeffs()[0] == cplx{});
}

TEST_CASE("zero force has a zero series") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel none = build_force(ForceSpec{test::kAlpha, std::nullopt, std::nullopt});
    const LindstedtSeries s = lindstedt_expand(none, freq, 16, 4);
    for (int n = 0; n < 4; ++n) {
        CHECK(s.lambda_terms[n] == 0.0);
        CHECK(sup_norm(s.h_terms[n]) == 0.0);
    }
}

TEST_CASE("order-two term against a hand Taylor expansion") {
    // U = cos(2 pi s_1): the eps^2 remainder is -(2 pi) sin(2 pi s_1) h^1(s),
    // and h^2 solves the second-difference equation against it.
    const FrequencyData freq = test::golden_frequency();
    const std::vector<ForceMode> modes{{{1, 0}, 0.5}, {{-1, 0}, 0.5}};
    const ForceModel force = build_force(ForceSpec{test::kAlpha, modes, std::nullopt});
    const LindstedtSeries s = lindstedt_expand(force, freq, 16, 2);

    // h^1 = -U / (2 (cos(2 pi omega alpha_1) - 1)) on the single mode.
    const double d1 = 2.0 * (std::cos(kTwoPi * freq.shift[0]) - 1.0);
    const std::vector<int> e1{1, 0};
    CHECK(std::abs(s.h_terms[0].coeff(e1) - cplx(-0.5 / d1)) < 1e-14);

    const auto h1 = synthesize(s.h_terms[0], 32);
    const auto r2 = synthesize(s.remainders[1], 32);
    for (int j : {0, 37, 700}) {
        const double s1 = (j / 32) / 32.0;
        const double expected = -kTwoPi * std::sin(kTwoPi * s1) * h1[j];
        CHECK(r2[j] == doctest::Approx(expected).epsilon(1e-12));
    }
    // sin * cos generates only the (2, 0) mode, whose divisor fixes h^2.
    const std::vector<int> e2{2, 0};
    const double d2 = 2.0 * (std::cos(kTwoPi * 2.0 * freq.shift[0]) - 1.0);
    CHECK(std::abs(s.h_terms[1].coeff(e2) - (-s.remainders[1].coeff(e2) / d2)) < 1e-14);
    CHECK(s.lambda_terms[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("evaluation") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel force = test::example_force(1.0);
    const LindstedtSeries s = lindstedt_expand(force, freq, 32, 3);
    const auto [h0, l0] = lindstedt_eval(s, 0.0);
    CHECK(sup_norm(h0) == 0.0);
    CHECK(l0 == 0.0);

    const LindstedtSeries one = lindstedt_expand(force, freq, 32, 1);
    const auto [h1, l1] = lindstedt_eval(one, 0.01);
    CHECK(test::max_abs_diff(h1, 0.01 * one.h_terms[0]) < 1e-18);
    CHECK(l1 == doctest::Approx(0.01 * one.lambda_terms[0]));
}

TEST_CASE("truncation residual scales like eps^4") {
    const FrequencyData freq = test::golden_frequency();
    const ForceModel force = test::example_force(1.0);
    const LindstedtSeries s = lindstedt_expand(force, freq, 64, 3);
    double previous = 0.0;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        const auto [h, lambda] = lindstedt_eval(s, eps);
        const double res = error_functional(h, lambda, force.scaled(eps), freq).sup;
        if (previous > 0.0) {
            CHECK(previous / res > 8.0);
            CHECK(previous / res < 32.0);
        }
        previous = res;
    }
}
