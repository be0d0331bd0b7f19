#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qpfk/error.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk {

// Serial runs the reference kernels; parallel runs the OpenMP kernels.
// Both produce identical results for any thread count up to round-off in
// the reference formulas, and parallel output is bitwise independent of
// the thread count (no cross-point reductions happen inside a kernel).
enum class Exec { serial, parallel };

Exec default_exec() noexcept;
void set_default_exec(Exec exec) noexcept;
void set_thread_count(int threads);
int thread_count();

namespace kernels {

template <class Fn>
void for_each_point(Exec exec, std::size_t n, Fn&& fn) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
    }
}

// One trigonometric term a exp(2 pi i k.s) of a force, together with the
// rate k.alpha at which a displacement along alpha advances its phase.
struct ComposeTerm {
    std::vector<int> k;
    cplx amplitude;
    double k_alpha = 0.0;
};

// out_j = Re sum_m a_m exp(2 pi i (k_m . s_j + (k_m . alpha) h_j)) on the
// grid s_j = j / M.
void compose_force_serial(const Grid& grid, std::span<const ComposeTerm> terms, std::span<const double> h,
                          std::span<double> out);
void compose_force_parallel(const Grid& grid, std::span<const ComposeTerm> terms, std::span<const double> h,
                            std::span<double> out);
void compose_force(Exec exec, const Grid& grid, std::span<const ComposeTerm> terms, std::span<const double> h,
                   std::span<double> out);

// Coefficient of eps^order in sum_m a_m exp(2 pi i (k_m . s_j + (k_m . alpha) H_j(eps)))
// where H(eps) = sum_{q >= 1} eps^q jets[q - 1]. Only jets up to `order` matter.
void compose_force_jet_serial(const Grid& grid, std::span<const ComposeTerm> terms,
                              std::span<const std::vector<double>> jets, int order, std::span<double> out);
void compose_force_jet_parallel(const Grid& grid, std::span<const ComposeTerm> terms,
                                std::span<const std::vector<double>> jets, int order, std::span<double> out);
void compose_force_jet(Exec exec, const Grid& grid, std::span<const ComposeTerm> terms,
                       std::span<const std::vector<double>> jets, int order, std::span<double> out);

}  // namespace kernels

// Applies fn pointwise to the values of the inputs on the dealiasing grid
// and returns the band-limited coefficients of the result.
template <class Fn, class... Fs>
TorusFunction pointwise(Fn&& fn, const TorusFunction& first, const Fs&... rest) {
    const Grid& band = first.grid();
    if (!((rest.grid() == band) && ...)) {
        throw Error(ErrorKind::resolution_mismatch, "pointwise: inputs live on different grids");
    }
    const int fine = kDealiasFactor * band.resolution();
    const std::array<std::vector<double>, 1 + sizeof...(Fs)> values{synthesize(first, fine),
                                                                   synthesize(rest, fine)...};
    std::vector<double> out(values[0].size());
    kernels::for_each_point(default_exec(), out.size(), [&](std::size_t i) {
        out[i] = [&]<std::size_t... I>(std::index_sequence<I...>) {
            return fn(values[I][i]...);
        }(std::make_index_sequence<1 + sizeof...(Fs)>{});
    });
    return analyze_to_band(out, band.dim(), fine, band.resolution());
}

}  // namespace qpfk
