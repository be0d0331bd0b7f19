#pragma once

#include <vector>

#include "qpfk/lattice.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk {

// Frequency of the hull function: direction alpha on T^d, rotation omega,
// and the shift omega*alpha (reduced mod 1) together with a Diophantine
// estimate dist(shift.k, Z) |k|_1^tau >= nu_hat over 0 < |k|_1 <= k_max.
struct FrequencyData {
    std::vector<double> alpha;
    double omega = 0.0;
    std::vector<double> shift;
    double tau = 0.0;
    double nu_hat = 0.0;
    int k_max = 0;
    LatticeIndex minimizer;

    int dim() const noexcept { return static_cast<int>(alpha.size()); }

    // Shift data only (no Diophantine estimate); nu_hat stays 0.
    static FrequencyData make(std::vector<double> alpha, double omega);
};

// dist(x, Z) in [0, 1/2]
double distance_to_integers(double x) noexcept;

// Thrown as NearResonance (ErrorKind::near_resonance) when nu_hat < 1e-12.
FrequencyData diophantine_estimate(std::vector<double> alpha, double omega, double tau, int k_max);

enum class Direction { forward, backward };

// exp(2 pi i theta) - 1, computed from the fractional part of theta so that
// tiny divisors keep their relative accuracy.
cplx first_difference_symbol(double theta) noexcept;
// 2 (cos(2 pi theta) - 1)
double second_difference_symbol(double theta) noexcept;

struct CohomologyOptions {
    double mean_tol = 1e-10;
    double divisor_floor = 1e-13;
    // The mean of eta is compared against mean_tol * max(||eta||_{H^0}, reference_scale).
    // Callers whose right side is built by cancelling a mean pass the size of
    // the cancelled terms here.
    double reference_scale = 0.0;
    // Right-side coefficients with |eta_k| <= noise_floor are treated as
    // round-off and give phi_k = 0 instead of being amplified by the divisor.
    double noise_floor = 0.0;
};

struct CohomologySolution {
    TorusFunction phi;
    double removed_mean = 0.0;
};

// Zero-mean phi with phi o T_{+shift} - phi = eta (forward) or
// phi o T_{-shift} - phi = eta (backward).
CohomologySolution solve_first_difference(const TorusFunction& eta, const FrequencyData& freq, Direction direction,
                                          const CohomologyOptions& options = {});

// Zero-mean phi with phi o T_shift + phi o T_{-shift} - 2 phi = eta.
CohomologySolution solve_second_difference(const TorusFunction& eta, const FrequencyData& freq,
                                           const CohomologyOptions& options = {});

// psi o T_shift + psi o T_{-shift} - 2 psi, applied in coefficient space.
TorusFunction second_difference(const TorusFunction& psi, const FrequencyData& freq);

}  // namespace qpfk
