#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qpfk/cohomology.hpp"
#include "qpfk/model.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk::test {

inline const std::vector<double> kAlpha{1.0, std::numbers::sqrt2};
inline const double kOmega = (std::sqrt(5.0) - 1.0) / 2.0;

inline FrequencyData golden_frequency(int k_max = 64) { return diophantine_estimate(kAlpha, kOmega, 4.0, k_max); }

// Potential whose force is amplitude * (cos 2 pi s_1 + cos 2 pi s_2).
inline ForceModel example_force(double amplitude) {
    const double a = amplitude / (2.0 * std::numbers::pi);
    return build_force(two_sine_potential(kAlpha, a, a / std::numbers::sqrt2));
}

// Zero-mean real function with |c_k| ~ scale * exp(-decay |k|_1), Nyquist dropped.
inline TorusFunction random_function(int dim, int n, std::uint64_t seed, double scale = 1.0, double decay = 0.5,
                                     bool zero_mean = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TorusFunction f(dim, n);
    std::vector<int> k(dim);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.grid().index_of(i, k);
        f.coeffs()[i] = scale * std::exp(-decay * norm1(k)) * cplx(u(rng), u(rng));
    }
    f.enforce_hermitian();
    f.drop_nyquist();
    if (zero_mean) f.coeffs()[0] = {};
    return f;
}

inline double max_abs_diff(const TorusFunction& a, const TorusFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
    return m;
}

}  // namespace qpfk::test
