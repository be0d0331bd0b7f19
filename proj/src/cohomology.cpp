#include "qpfk/cohomology.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "qpfk/error.hpp"

namespace qpfk {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dims(const TorusFunction& f, const FrequencyData& freq) {
    if (f.dim() != freq.dim() || static_cast<int>(freq.shift.size()) != f.dim()) {
        throw Error(ErrorKind::invalid_argument, "frequency dimension does not match the function");
    }
}

// Visits every k with 0 < |k|_1 <= k_max whose first non-zero entry is
// positive (one representative of each +-k pair).
void for_each_half_lattice(int dim, int k_max, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> k(dim, 0);
    std::function<void(int, int, bool)> rec = [&](int axis, int budget, bool leading_zero) {
        if (axis == dim) {
            if (!leading_zero) visit(k);
            return;
        }
        const int lo = leading_zero ? 0 : -budget;
        for (int v = lo; v <= budget; ++v) {
            k[axis] = v;
            rec(axis + 1, budget - std::abs(v), leading_zero && v == 0);
        }
        k[axis] = 0;
    };
    rec(0, k_max, true);
}

void check_mean(const TorusFunction& eta, const CohomologyOptions& options) {
    const double avg = mean(eta);
    const double scale = std::max(sobolev_norm(eta, 0.0), options.reference_scale);
    if (std::abs(avg) > options.mean_tol * scale) {
        throw Error(ErrorKind::solvability_violation,
                    "right side has non-zero average " + std::to_string(avg) + " (relative tolerance " +
                        std::to_string(options.mean_tol) + ")");
    }
}

}  // namespace

double distance_to_integers(double x) noexcept { return std::abs(x - std::nearbyint(x)); }

cplx first_difference_symbol(double theta) noexcept {
    const double frac = theta - std::nearbyint(theta);
    // exp(2 pi i t) - 1 = 2 i sin(pi t) exp(i pi t)
    const double s = std::sin(kPi * frac);
    return cplx(0.0, 2.0 * s) * cplx(std::cos(kPi * frac), std::sin(kPi * frac));
}

double second_difference_symbol(double theta) noexcept {
    const double s = std::sin(kPi * (theta - std::nearbyint(theta)));
    return -4.0 * s * s;
}

FrequencyData FrequencyData::make(std::vector<double> alpha, double omega) {
    FrequencyData freq;
    freq.omega = omega;
    freq.shift.resize(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double s = omega * alpha[i];
        freq.shift[i] = s - std::floor(s);
    }
    freq.alpha = std::move(alpha);
    return freq;
}

FrequencyData diophantine_estimate(std::vector<double> alpha, double omega, double tau, int k_max) {
    const int dim = static_cast<int>(alpha.size());
    if (dim < 2) throw Error(ErrorKind::invalid_argument, "alpha must have at least two components");
    if (k_max < 1) throw Error(ErrorKind::invalid_argument, "K_max must be at least 1");
    if (!(tau > dim)) throw Error(ErrorKind::invalid_argument, "tau must exceed the dimension");

    FrequencyData freq = FrequencyData::make(std::move(alpha), omega);
    freq.tau = tau;
    freq.k_max = k_max;

    double best = std::numeric_limits<double>::infinity();
    double worst_alpha = std::numeric_limits<double>::infinity();
    std::vector<int> best_k;
    for_each_half_lattice(dim, k_max, [&](const std::vector<int>& k) {
        double x = 0.0;
        double a = 0.0;
        for (int i = 0; i < dim; ++i) {
            x += k[i] * freq.shift[i];
            a += k[i] * freq.alpha[i];
        }
        const double n1 = norm1(k);
        const double value = distance_to_integers(x) * std::pow(n1, tau);
        if (value < best) {
            best = value;
            best_k = k;
        }
        worst_alpha = std::min(worst_alpha, std::abs(a) / n1);
    });
    freq.nu_hat = best;
    freq.minimizer = best_k;

    if (!(worst_alpha > 1e-14)) {
        throw Error(ErrorKind::near_resonance, "alpha.k vanishes for some 0 < |k| <= K_max; alpha is not irrational");
    }
    if (!(best >= 1e-12)) {
        std::string where;
        for (std::size_t i = 0; i < best_k.size(); ++i) where += (i ? "," : "") + std::to_string(best_k[i]);
        throw Error(ErrorKind::near_resonance, "omega*alpha is near-resonant: nu_hat = " + std::to_string(best) +
                                                   " at k = (" + where + ")");
    }
    return freq;
}

CohomologySolution solve_first_difference(const TorusFunction& eta, const FrequencyData& freq, Direction direction,
                                          const CohomologyOptions& options) {
    check_dims(eta, freq);
    check_mean(eta, options);

    const Grid& grid = eta.grid();
    const auto theta = grid.dot_table(freq.shift);
    const double sign = direction == Direction::forward ? 1.0 : -1.0;

    CohomologySolution out{TorusFunction(grid.dim(), grid.resolution()), mean(eta)};
    auto phi = out.phi.coeffs();
    const auto c = eta.coeffs();
    std::vector<int> k(grid.dim());
    for (std::size_t flat = 1; flat < c.size(); ++flat) {
        if (grid.on_nyquist(flat)) continue;
        const cplx divisor = first_difference_symbol(sign * theta[flat]);
        if (std::abs(divisor) < options.divisor_floor) {
            grid.index_of(flat, k);
            throw SmallDivisorBreach(k, std::abs(divisor));
        }
        if (std::abs(c[flat]) > options.noise_floor) phi[flat] = c[flat] / divisor;
    }
    out.phi.enforce_hermitian();
    return out;
}

CohomologySolution solve_second_difference(const TorusFunction& eta, const FrequencyData& freq,
                                           const CohomologyOptions& options) {
    check_dims(eta, freq);
    check_mean(eta, options);

    const Grid& grid = eta.grid();
    const auto theta = grid.dot_table(freq.shift);
    CohomologySolution out{TorusFunction(grid.dim(), grid.resolution()), mean(eta)};
    auto phi = out.phi.coeffs();
    const auto c = eta.coeffs();
    std::vector<int> k(grid.dim());
    for (std::size_t flat = 1; flat < c.size(); ++flat) {
        if (grid.on_nyquist(flat)) continue;
        const double divisor = second_difference_symbol(theta[flat]);
        if (std::abs(divisor) < options.divisor_floor) {
            grid.index_of(flat, k);
            throw SmallDivisorBreach(k, std::abs(divisor));
        }
        if (std::abs(c[flat]) > options.noise_floor) phi[flat] = c[flat] / divisor;
    }
    out.phi.enforce_hermitian();
    return out;
}

TorusFunction second_difference(const TorusFunction& psi, const FrequencyData& freq) {
    check_dims(psi, freq);
    const auto theta = psi.grid().dot_table(freq.shift);
    TorusFunction out = psi;
    auto c = out.coeffs();
    for (std::size_t flat = 0; flat < c.size(); ++flat) c[flat] *= second_difference_symbol(theta[flat]);
    return out;
}

}  // namespace qpfk
