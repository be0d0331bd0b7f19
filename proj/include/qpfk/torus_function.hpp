#pragma once

#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qpfk/lattice.hpp"

namespace qpfk {

using cplx = std::complex<double>;

// Nonlinear evaluations (products, quotients, force composition) run on a
// grid this many times finer per axis than the coefficient band and are
// truncated back afterwards.
inline constexpr int kDealiasFactor = 2;

// Truncated Fourier series f(s) = sum_k c_k exp(2 pi i k.s) of a real
// function on T^d. Coefficients are stored in FFT layout on a Grid.
class TorusFunction {
  public:
    TorusFunction() = default;
    TorusFunction(int dim, int resolution);
    TorusFunction(Grid grid, std::vector<cplx> coeffs);

    static TorusFunction constant(int dim, int resolution, double value);

    const Grid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }
    int resolution() const noexcept { return grid_.resolution(); }
    std::size_t size() const noexcept { return coeffs_.size(); }

    std::span<const cplx> coeffs() const noexcept { return coeffs_; }
    std::span<cplx> coeffs() noexcept { return coeffs_; }

    // Zero outside the represented range.
    cplx coeff(std::span<const int> k) const;
    // Sets c_k = value and c_{-k} = conj(value).
    void set_mode(std::span<const int> k, cplx value);

    // max_k |c_{-k} - conj(c_k)|
    double hermitian_defect() const;
    void enforce_hermitian();
    // Zeroes every coefficient with some k_i == -N/2.
    void drop_nyquist();

    TorusFunction& operator+=(const TorusFunction& other);
    TorusFunction& operator-=(const TorusFunction& other);
    TorusFunction& operator*=(double s);
    TorusFunction& add_constant(double c);

  private:
    Grid grid_;
    std::vector<cplx> coeffs_;
};

TorusFunction operator+(TorusFunction a, const TorusFunction& b);
TorusFunction operator-(TorusFunction a, const TorusFunction& b);
TorusFunction operator*(double s, TorusFunction f);

// Real values on the uniform grid s_j = j / M, with M the function's own
// resolution or a finer one (zero padding). Throws on Hermitian defects.
std::vector<double> synthesize(const TorusFunction& f);
std::vector<double> synthesize(const TorusFunction& f, int grid_resolution);

// Coefficients of grid data; keeps the Nyquist modes so that
// synthesize(analyze(v)) reproduces v.
TorusFunction analyze(std::span<const double> values, int dim, int resolution);
// Coefficients of fine-grid data restricted to the band |k_i| < band_resolution / 2.
TorusFunction analyze_to_band(std::span<const double> values, int dim, int fine_resolution, int band_resolution);

// f o T_t, i.e. c_k -> c_k exp(2 pi i k.t).
TorusFunction shift(const TorusFunction& f, std::span<const double> t);
// (alpha . grad) f
TorusFunction dalpha(const TorusFunction& f, std::span<const double> alpha);
TorusFunction multiply(const TorusFunction& f, const TorusFunction& g);
double mean(const TorusFunction& f);

double sup_norm(const TorusFunction& f);
// sqrt(sum_k |c_k|^2 (1 + |k|^2)^r), Euclidean |k|.
double sobolev_norm(const TorusFunction& f, double r);

enum class DecayStatus { ok, undefined, non_analytic };

struct DecayFit {
    DecayStatus status = DecayStatus::undefined;
    double rate = 0.0;       // estimate of rho in |c_k| ~ exp(-2 pi |k|_1 rho)
    int shells_used = 0;
};

// Least-squares fit of log max_{|k|_1 = s} |c_k| against s >= 1 over the
// shells whose maximum exceeds 1e-14.
DecayFit decay_fit(const TorusFunction& f);

struct NormReport {
    double sup_norm = 0.0;
    std::vector<std::pair<double, double>> sobolev;  // (r, ||f||_{H^r})
    DecayFit decay;

    double sobolev_at(double r) const;
};

NormReport norms(const TorusFunction& f, std::span<const double> r_list);

}  // namespace qpfk
