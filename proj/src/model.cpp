#include "qpfk/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qpfk/error.hpp"

namespace qpfk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const int> k, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * v[i];
    return s;
}

void validate_modes(const std::vector<ForceMode>& modes, int dim, const char* name) {
    std::map<LatticeIndex, cplx> by_index;
    double scale = 0.0;
    for (const auto& mode : modes) {
        if (static_cast<int>(mode.k.size()) != dim) {
            throw Error(ErrorKind::invalid_argument, std::string(name) + ": mode index has wrong dimension");
        }
        if (!by_index.emplace(mode.k, mode.amplitude).second) {
            throw Error(ErrorKind::invalid_argument, std::string(name) + ": duplicate mode index");
        }
        scale = std::max(scale, std::abs(mode.amplitude));
    }
    const double tol = 1e-14 * std::max(scale, 1e-300);
    for (const auto& [k, amp] : by_index) {
        LatticeIndex neg(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) neg[i] = -k[i];
        const auto it = by_index.find(neg);
        const cplx partner = it == by_index.end() ? cplx{} : it->second;
        if (std::abs(partner - std::conj(amp)) > tol) {
            throw Error(ErrorKind::symmetry_violation,
                        std::string(name) + ": modes are not Hermitian-symmetric (force would not be real)");
        }
    }
}

std::vector<double> synthesize_fine(const TorusFunction& h) { return synthesize(h, kDealiasFactor * h.resolution()); }

void require_in_band(const ForceModel& force, const Grid& band) {
    for (const auto& mode : force.modes) {
        if (!band.in_band(mode.k)) {
            throw Error(ErrorKind::unsupported_resolution, "force mode lies outside the band |k_i| < N/2");
        }
    }
}

}  // namespace

ForceModel ForceModel::scaled(double s) const {
    ForceModel out = *this;
    for (auto& mode : out.modes) mode.amplitude *= s;
    for (auto& mode : out.potential_modes) mode.amplitude *= s;
    return out;
}

ForceModel ForceModel::derivative() const {
    ForceModel out;
    out.alpha = alpha;
    for (const auto& mode : modes) {
        out.modes.push_back({mode.k, mode.amplitude * cplx(0.0, kTwoPi * dot(mode.k, alpha))});
    }
    return out;
}

std::vector<kernels::ComposeTerm> ForceModel::compose_terms() const {
    std::vector<kernels::ComposeTerm> terms;
    terms.reserve(modes.size());
    for (const auto& mode : modes) {
        if (mode.amplitude == cplx{}) continue;
        terms.push_back({mode.k, mode.amplitude, dot(mode.k, alpha)});
    }
    return terms;
}

TorusFunction ForceModel::as_function(int resolution) const {
    TorusFunction f(dim(), resolution);
    require_in_band(*this, f.grid());
    for (const auto& mode : modes) f.coeffs()[f.grid().flat_of(mode.k)] += mode.amplitude;
    return f;
}

ForceModel build_force(const ForceSpec& spec) {
    const int dim = static_cast<int>(spec.alpha.size());
    if (dim < 2) throw Error(ErrorKind::invalid_argument, "alpha must have at least two components");
    if (spec.u_modes && spec.v_modes) {
        throw Error(ErrorKind::invalid_argument, "supply either U modes or V modes, not both");
    }

    ForceModel force;
    force.alpha = spec.alpha;
    if (spec.u_modes) {
        validate_modes(*spec.u_modes, dim, "U_modes");
        force.modes = *spec.u_modes;
        force.is_gradient = false;
        return force;
    }
    const std::vector<ForceMode> potential = spec.v_modes ? *spec.v_modes : std::vector<ForceMode>{};
    validate_modes(potential, dim, "V_modes");
    force.potential_modes = potential;
    force.is_gradient = true;
    for (const auto& mode : potential) {
        force.modes.push_back({mode.k, cplx(0.0, kTwoPi * dot(mode.k, spec.alpha)) * mode.amplitude});
    }
    return force;
}

ForceSpec two_sine_potential(std::vector<double> alpha, double a, double b) {
    const int dim = static_cast<int>(alpha.size());
    auto unit = [dim](int axis, int sign) {
        LatticeIndex k(dim, 0);
        k[axis] = sign;
        return k;
    };
    // a sin(2 pi x) = (a / 2i) e^{2 pi i x} - (a / 2i) e^{-2 pi i x}
    std::vector<ForceMode> v;
    for (auto [axis, amp] : {std::pair{0, a}, std::pair{1, b}}) {
        if (amp == 0.0) continue;
        v.push_back({unit(axis, 1), cplx(0.0, -amp / 2.0)});
        v.push_back({unit(axis, -1), cplx(0.0, amp / 2.0)});
    }
    return ForceSpec{std::move(alpha), std::nullopt, std::move(v)};
}

TorusFunction eval_force_along(const TorusFunction& h, const ForceModel& force) {
    if (force.dim() != h.dim()) throw Error(ErrorKind::invalid_argument, "force and h differ in dimension");
    require_in_band(force, h.grid());
    const int fine = kDealiasFactor * h.resolution();
    const Grid grid(h.dim(), fine);
    const auto values = synthesize_fine(h);
    std::vector<double> out(values.size());
    const auto terms = force.compose_terms();
    kernels::compose_force(default_exec(), grid, terms, values, out);
    return analyze_to_band(out, h.dim(), fine, h.resolution());
}

EquilibriumError error_functional(const TorusFunction& h, double lambda, const ForceModel& force,
                                  const FrequencyData& freq, double m) {
    EquilibriumError err;
    err.values = second_difference(h, freq);
    err.values += eval_force_along(h, force);
    err.values.add_constant(lambda);
    err.sup = sup_norm(err.values);
    err.m = m;
    err.sobolev_m = sobolev_norm(err.values, m);
    return err;
}

TorusFunction linearized_error(const TorusFunction& h, const TorusFunction& delta, const ForceModel& force,
                               const FrequencyData& freq) {
    if (!(h.grid() == delta.grid())) throw Error(ErrorKind::resolution_mismatch, "h and delta differ in resolution");
    require_in_band(force, h.grid());
    const int fine = kDealiasFactor * h.resolution();
    const Grid grid(h.dim(), fine);
    const auto h_values = synthesize_fine(h);
    const auto d_values = synthesize_fine(delta);
    std::vector<double> slope(h_values.size());
    const auto terms = force.derivative().compose_terms();
    kernels::compose_force(default_exec(), grid, terms, h_values, slope);
    kernels::for_each_point(default_exec(), slope.size(), [&](std::size_t i) { slope[i] *= d_values[i]; });

    TorusFunction out = second_difference(delta, freq);
    out += analyze_to_band(slope, h.dim(), fine, h.resolution());
    return out;
}

}  // namespace qpfk
