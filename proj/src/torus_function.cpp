#include "qpfk/torus_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "qpfk/error.hpp"
#include "qpfk/kernels.hpp"

namespace qpfk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHermitianTol = 1e-12;

// c_k <- (c_k + conj(c_{-k})) / 2 for every k.
void symmetrize(const Grid& grid, std::span<cplx> c) {
    for (std::size_t flat = 0; flat < c.size(); ++flat) {
        const std::size_t neg = grid.negated(flat);
        if (neg < flat) continue;
        if (neg == flat) {
            c[flat] = cplx(c[flat].real(), 0.0);
            continue;
        }
        const cplx avg = 0.5 * (c[flat] + std::conj(c[neg]));
        c[flat] = avg;
        c[neg] = std::conj(avg);
    }
}

void require_same_grid(const TorusFunction& a, const TorusFunction& b, const char* what) {
    if (!(a.grid() == b.grid())) {
        throw Error(ErrorKind::resolution_mismatch, std::string(what) + ": operands have different resolutions");
    }
}

// exp(2 pi i x), with x reduced to [-1/2, 1/2] first.
cplx unit_phase(double x) {
    const double frac = x - std::nearbyint(x);
    return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

}  // namespace

TorusFunction::TorusFunction(int dim, int resolution) : grid_(dim, resolution), coeffs_(grid_.size()) {}

TorusFunction::TorusFunction(Grid grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) {
        throw Error(ErrorKind::resolution_mismatch, "coefficient count does not match the grid");
    }
}

TorusFunction TorusFunction::constant(int dim, int resolution, double value) {
    TorusFunction f(dim, resolution);
    f.coeffs_[0] = value;
    return f;
}

cplx TorusFunction::coeff(std::span<const int> k) const {
    if (static_cast<int>(k.size()) != dim()) throw Error(ErrorKind::invalid_argument, "index has wrong dimension");
    for (int ki : k) {
        if (ki < -resolution() / 2 || ki >= resolution() / 2) return {};
    }
    return coeffs_[grid_.flat_of(k)];
}

void TorusFunction::set_mode(std::span<const int> k, cplx value) {
    if (static_cast<int>(k.size()) != dim() || !grid_.in_band(k)) {
        throw Error(ErrorKind::invalid_argument, "mode outside the band |k_i| < N/2");
    }
    const std::size_t flat = grid_.flat_of(k);
    const std::size_t neg = grid_.negated(flat);
    if (neg == flat) {
        coeffs_[flat] = cplx(value.real(), 0.0);
    } else {
        coeffs_[flat] = value;
        coeffs_[neg] = std::conj(value);
    }
}

double TorusFunction::hermitian_defect() const {
    double defect = 0.0;
    for (std::size_t flat = 0; flat < coeffs_.size(); ++flat) {
        defect = std::max(defect, std::abs(coeffs_[grid_.negated(flat)] - std::conj(coeffs_[flat])));
    }
    return defect;
}

void TorusFunction::enforce_hermitian() { symmetrize(grid_, coeffs_); }

void TorusFunction::drop_nyquist() {
    for (std::size_t flat = 0; flat < coeffs_.size(); ++flat) {
        if (grid_.on_nyquist(flat)) coeffs_[flat] = {};
    }
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& other) {
    require_same_grid(*this, other, "add");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& other) {
    require_same_grid(*this, other, "subtract");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

TorusFunction& TorusFunction::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

TorusFunction& TorusFunction::add_constant(double c) {
    coeffs_[0] += c;
    return *this;
}

TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
TorusFunction operator*(double s, TorusFunction f) { return f *= s; }

std::vector<double> synthesize(const TorusFunction& f) { return synthesize(f, f.resolution()); }

std::vector<double> synthesize(const TorusFunction& f, int grid_resolution) {
    const Grid& band = f.grid();
    if (grid_resolution < band.resolution()) {
        throw Error(ErrorKind::unsupported_resolution, "cannot synthesize on a grid coarser than the band");
    }
    const Grid fine(band.dim(), grid_resolution);

    double scale = 0.0;
    for (const auto& c : f.coeffs()) scale = std::max(scale, std::abs(c));
    if (f.hermitian_defect() > kHermitianTol * std::max(scale, 1e-300)) {
        throw Error(ErrorKind::symmetry_violation, "coefficients are not Hermitian-symmetric");
    }

    std::vector<cplx> buffer(fine.size());
    const int dim = band.dim();
    const int half = band.resolution() / 2;
    std::vector<int> k(dim);
    std::vector<int> target(dim);
    std::vector<int> nyquist_axes;
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        const cplx c = f.coeffs()[flat];
        if (c == cplx{}) continue;
        band.index_of(flat, k);
        nyquist_axes.clear();
        for (int axis = 0; axis < dim; ++axis) {
            if (k[axis] == -half) nyquist_axes.push_back(axis);
        }
        if (grid_resolution == band.resolution() || nyquist_axes.empty()) {
            buffer[fine.flat_of(k)] += c;
            continue;
        }
        // A Nyquist coefficient stands for a cosine; split it evenly over +-N/2.
        const std::size_t copies = std::size_t{1} << nyquist_axes.size();
        const double weight = 1.0 / static_cast<double>(copies);
        for (std::size_t mask = 0; mask < copies; ++mask) {
            target = k;
            for (std::size_t j = 0; j < nyquist_axes.size(); ++j) {
                if (mask & (std::size_t{1} << j)) target[nyquist_axes[j]] = half;
            }
            buffer[fine.flat_of(target)] += weight * c;
        }
    }
    detail::fft_backward(buffer, dim, grid_resolution);
    std::vector<double> values(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); ++i) values[i] = buffer[i].real();
    return values;
}

TorusFunction analyze(std::span<const double> values, int dim, int resolution) {
    Grid grid(dim, resolution);
    if (values.size() != grid.size()) {
        throw Error(ErrorKind::resolution_mismatch, "analyze: value count does not match N^d");
    }
    std::vector<cplx> buffer(values.begin(), values.end());
    detail::fft_forward(buffer, dim, resolution);
    const double inv = 1.0 / static_cast<double>(grid.size());
    for (auto& c : buffer) c *= inv;
    symmetrize(grid, buffer);
    return TorusFunction(grid, std::move(buffer));
}

TorusFunction analyze_to_band(std::span<const double> values, int dim, int fine_resolution, int band_resolution) {
    const Grid fine(dim, fine_resolution);
    const Grid band(dim, band_resolution);
    if (values.size() != fine.size()) {
        throw Error(ErrorKind::resolution_mismatch, "analyze_to_band: value count does not match M^d");
    }
    if (band_resolution > fine_resolution) {
        throw Error(ErrorKind::unsupported_resolution, "band wider than the sampling grid");
    }
    std::vector<cplx> buffer(values.begin(), values.end());
    detail::fft_forward(buffer, dim, fine_resolution);
    const double inv = 1.0 / static_cast<double>(fine.size());

    std::vector<cplx> coeffs(band.size());
    std::vector<int> k(dim);
    for (std::size_t flat = 0; flat < band.size(); ++flat) {
        if (band.on_nyquist(flat)) continue;
        band.index_of(flat, k);
        coeffs[flat] = buffer[fine.flat_of(k)] * inv;
    }
    symmetrize(band, coeffs);
    return TorusFunction(band, std::move(coeffs));
}

TorusFunction shift(const TorusFunction& f, std::span<const double> t) {
    if (static_cast<int>(t.size()) != f.dim()) throw Error(ErrorKind::invalid_argument, "shift vector has wrong size");
    const auto phase = f.grid().dot_table(t);
    TorusFunction out = f;
    auto c = out.coeffs();
    for (std::size_t flat = 0; flat < c.size(); ++flat) {
        c[flat] = f.grid().on_nyquist(flat) ? cplx{} : c[flat] * unit_phase(phase[flat]);
    }
    out.enforce_hermitian();
    return out;
}

TorusFunction dalpha(const TorusFunction& f, std::span<const double> alpha) {
    if (static_cast<int>(alpha.size()) != f.dim()) throw Error(ErrorKind::invalid_argument, "alpha has wrong size");
    const auto k_alpha = f.grid().dot_table(alpha);
    TorusFunction out = f;
    auto c = out.coeffs();
    for (std::size_t flat = 0; flat < c.size(); ++flat) {
        c[flat] = f.grid().on_nyquist(flat) ? cplx{} : c[flat] * cplx(0.0, kTwoPi * k_alpha[flat]);
    }
    c[0] = {};
    return out;
}

TorusFunction multiply(const TorusFunction& f, const TorusFunction& g) {
    require_same_grid(f, g, "multiply");
    return pointwise([](double a, double b) { return a * b; }, f, g);
}

double mean(const TorusFunction& f) { return f.coeffs()[0].real(); }

double sup_norm(const TorusFunction& f) {
    double s = 0.0;
    for (double v : synthesize(f)) s = std::max(s, std::abs(v));
    return s;
}

double sobolev_norm(const TorusFunction& f, double r) {
    const Grid& grid = f.grid();
    std::vector<int> k(grid.dim());
    double sum = 0.0;
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        const double mag2 = std::norm(f.coeffs()[flat]);
        if (mag2 == 0.0) continue;
        grid.index_of(flat, k);
        sum += mag2 * std::pow(1.0 + norm2_squared(k), r);
    }
    return std::sqrt(sum);
}

DecayFit decay_fit(const TorusFunction& f) {
    const Grid& grid = f.grid();
    const auto shell_of = grid.norm1_table();
    const int max_shell = *std::max_element(shell_of.begin(), shell_of.end());
    std::vector<double> shell_max(static_cast<std::size_t>(max_shell) + 1, 0.0);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        auto& m = shell_max[shell_of[flat]];
        m = std::max(m, std::abs(f.coeffs()[flat]));
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (int s = 1; s <= max_shell; ++s) {
        if (shell_max[s] <= 1e-14) continue;
        const double y = std::log(shell_max[s]);
        sx += s;
        sy += y;
        sxx += static_cast<double>(s) * s;
        sxy += s * y;
        ++used;
    }
    DecayFit fit;
    fit.shells_used = used;
    if (used < 3) return fit;
    const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    fit.rate = -slope / kTwoPi;
    fit.status = fit.rate >= 0.0 ? DecayStatus::ok : DecayStatus::non_analytic;
    return fit;
}

double NormReport::sobolev_at(double r) const {
    for (const auto& [exponent, value] : sobolev) {
        if (exponent == r) return value;
    }
    throw Error(ErrorKind::invalid_argument, "Sobolev exponent was not requested");
}

NormReport norms(const TorusFunction& f, std::span<const double> r_list) {
    NormReport report;
    report.sup_norm = sup_norm(f);
    for (double r : r_list) report.sobolev.emplace_back(r, sobolev_norm(f, r));
    report.decay = decay_fit(f);
    return report;
}

}  // namespace qpfk
