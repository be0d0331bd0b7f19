#pragma once

#include <optional>
#include <vector>

#include "qpfk/cohomology.hpp"
#include "qpfk/kernels.hpp"
#include "qpfk/lattice.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk {

struct ForceMode {
    LatticeIndex k;
    cplx amplitude;
};

struct ForceSpec {
    std::vector<double> alpha;
    std::optional<std::vector<ForceMode>> u_modes;
    std::optional<std::vector<ForceMode>> v_modes;
};

// Trigonometric-polynomial force U on T^d. When it derives from a potential
// V, U_k = 2 pi i (k.alpha) V_k for every mode.
struct ForceModel {
    std::vector<ForceMode> modes;
    bool is_gradient = false;
    std::vector<ForceMode> potential_modes;
    std::vector<double> alpha;

    int dim() const noexcept { return static_cast<int>(alpha.size()); }
    // Same force with every amplitude multiplied by s.
    ForceModel scaled(double s) const;
    // (alpha . grad) U, which is again a trigonometric polynomial.
    ForceModel derivative() const;
    std::vector<kernels::ComposeTerm> compose_terms() const;
    // U itself on the given band.
    TorusFunction as_function(int resolution) const;
};

ForceModel build_force(const ForceSpec& spec);

// V(s) = a sin(2 pi s_1) + b sin(2 pi s_2), extended by zero to higher d.
// With alpha = (1, sqrt 2) this is the potential a sin(2 pi theta) + b sin(2 pi sqrt(2) theta).
ForceSpec two_sine_potential(std::vector<double> alpha, double a, double b);

// U(s + alpha h(s)), band-limited to h's resolution.
TorusFunction eval_force_along(const TorusFunction& h, const ForceModel& force);

struct EquilibriumError {
    TorusFunction values;
    double sup = 0.0;
    double sobolev_m = 0.0;
    double m = 0.0;
};

// h o T_shift + h o T_{-shift} - 2 h + U(s + alpha h) + lambda
EquilibriumError error_functional(const TorusFunction& h, double lambda, const ForceModel& force,
                                  const FrequencyData& freq, double m = 0.0);

// Derivative of the error functional in h along delta:
// delta o T_shift + delta o T_{-shift} - 2 delta + (dalpha U)(s + alpha h) delta
TorusFunction linearized_error(const TorusFunction& h, const TorusFunction& delta, const ForceModel& force,
                               const FrequencyData& freq);

}  // namespace qpfk
