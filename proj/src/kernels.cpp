#include "qpfk/kernels.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpfk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::atomic<Exec> g_exec{Exec::parallel};

void check_sizes(const Grid& grid, std::span<const double> h, std::span<double> out) {
    if (h.size() != grid.size() || out.size() != grid.size()) {
        throw Error(ErrorKind::resolution_mismatch, "kernel buffers do not match the grid");
    }
}

// Grid position of every axis for a flat offset (position, not wave number).
inline void positions_of(std::size_t flat, int dim, int n, int* pos) {
    for (int axis = dim - 1; axis >= 0; --axis) {
        pos[axis] = static_cast<int>(flat % n);
        flat /= n;
    }
}

inline cplx reduced_phase(double x) {
    const double frac = x - std::nearbyint(x);
    return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

// exp(2 pi i r / M) for r in [0, M).
std::vector<cplx> root_table(int m) {
    std::vector<cplx> table(m);
    for (int r = 0; r < m; ++r) table[r] = std::polar(1.0, kTwoPi * r / m);
    return table;
}

// Integer phase index (k . j) mod M of each term at a point.
inline int phase_index(const std::vector<int>& k, const int* pos, int m) {
    long long acc = 0;
    for (std::size_t axis = 0; axis < k.size(); ++axis) acc += static_cast<long long>(k[axis]) * pos[axis];
    acc %= m;
    return static_cast<int>(acc < 0 ? acc + m : acc);
}

}  // namespace

Exec default_exec() noexcept { return g_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec exec) noexcept { g_exec.store(exec, std::memory_order_relaxed); }

void set_thread_count(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace kernels {

void compose_force_serial(const Grid& grid, std::span<const ComposeTerm> terms, std::span<const double> h,
                          std::span<double> out) {
    check_sizes(grid, h, out);
    const int dim = grid.dim();
    const int m = grid.resolution();
    std::vector<int> pos(dim);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        positions_of(j, dim, m, pos.data());
        double value = 0.0;
        for (const auto& term : terms) {
            double k_dot_s = 0.0;
            for (int axis = 0; axis < dim; ++axis) k_dot_s += term.k[axis] * (static_cast<double>(pos[axis]) / m);
            value += (term.amplitude * std::polar(1.0, kTwoPi * (k_dot_s + term.k_alpha * h[j]))).real();
        }
        out[j] = value;
    }
}

void compose_force_parallel(const Grid& grid, std::span<const ComposeTerm> terms, std::span<const double> h,
                            std::span<double> out) {
    check_sizes(grid, h, out);
    const int dim = grid.dim();
    const int m = grid.resolution();
    const auto roots = root_table(m);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel
    {
        std::vector<int> pos(dim);
#pragma omp for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            positions_of(static_cast<std::size_t>(j), dim, m, pos.data());
            double value = 0.0;
            for (const auto& term : terms) {
                const cplx carrier = roots[phase_index(term.k, pos.data(), m)];
                value += (term.amplitude * carrier * reduced_phase(term.k_alpha * h[j])).real();
            }
            out[j] = value;
        }
    }
}

void compose_force(Exec exec, const Grid& grid, std::span<const ComposeTerm> terms, std::span<const double> h,
                   std::span<double> out) {
    if (exec == Exec::parallel) {
        compose_force_parallel(grid, terms, h, out);
    } else {
        compose_force_serial(grid, terms, h, out);
    }
}

namespace {

void check_jets(const Grid& grid, std::span<const std::vector<double>> jets, int order, std::span<double> out) {
    if (order < 0 || static_cast<int>(jets.size()) < order) {
        throw Error(ErrorKind::invalid_argument, "jet kernel needs one jet per order");
    }
    for (int q = 0; q < order; ++q) {
        if (jets[q].size() != grid.size()) throw Error(ErrorKind::resolution_mismatch, "jet has wrong size");
    }
    if (out.size() != grid.size()) throw Error(ErrorKind::resolution_mismatch, "jet output has wrong size");
}

}  // namespace

// Reference: exp(X) = sum_j X^j / j! with truncated jet products.
void compose_force_jet_serial(const Grid& grid, std::span<const ComposeTerm> terms,
                              std::span<const std::vector<double>> jets, int order, std::span<double> out) {
    check_jets(grid, jets, order, out);
    const int dim = grid.dim();
    const int m = grid.resolution();
    std::vector<int> pos(dim);
    std::vector<cplx> x(order + 1), power(order + 1), next(order + 1), sum(order + 1);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        positions_of(j, dim, m, pos.data());
        double value = 0.0;
        for (const auto& term : terms) {
            x[0] = 0.0;
            for (int q = 1; q <= order; ++q) x[q] = cplx(0.0, kTwoPi * term.k_alpha * jets[q - 1][j]);
            std::fill(sum.begin(), sum.end(), cplx{});
            std::fill(power.begin(), power.end(), cplx{});
            power[0] = 1.0;
            double factorial = 1.0;
            for (int p = 0; p <= order; ++p) {
                if (p > 0) factorial *= p;
                for (int q = 0; q <= order; ++q) sum[q] += power[q] / factorial;
                // power <- power * x, truncated
                std::fill(next.begin(), next.end(), cplx{});
                for (int a = 0; a <= order; ++a) {
                    for (int b = 1; a + b <= order; ++b) next[a + b] += power[a] * x[b];
                }
                power.swap(next);
            }
            double k_dot_s = 0.0;
            for (int axis = 0; axis < dim; ++axis) k_dot_s += term.k[axis] * (static_cast<double>(pos[axis]) / m);
            value += (term.amplitude * std::polar(1.0, kTwoPi * k_dot_s) * sum[order]).real();
        }
        out[j] = value;
    }
}

// y = exp(x) with x_0 = 0: y_0 = 1, y_n = (1/n) sum_{q=1}^{n} q x_q y_{n-q}.
void compose_force_jet_parallel(const Grid& grid, std::span<const ComposeTerm> terms,
                                std::span<const std::vector<double>> jets, int order, std::span<double> out) {
    check_jets(grid, jets, order, out);
    const int dim = grid.dim();
    const int m = grid.resolution();
    const auto roots = root_table(m);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel
    {
        std::vector<int> pos(dim);
        std::vector<double> x(order + 1);  // imaginary parts; x is purely imaginary
        std::vector<cplx> y(order + 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            positions_of(static_cast<std::size_t>(j), dim, m, pos.data());
            double value = 0.0;
            for (const auto& term : terms) {
                for (int q = 1; q <= order; ++q) x[q] = kTwoPi * term.k_alpha * jets[q - 1][static_cast<std::size_t>(j)];
                y[0] = 1.0;
                for (int p = 1; p <= order; ++p) {
                    cplx acc{};
                    for (int q = 1; q <= p; ++q) acc += static_cast<double>(q) * cplx(0.0, x[q]) * y[p - q];
                    y[p] = acc / static_cast<double>(p);
                }
                const cplx carrier = roots[phase_index(term.k, pos.data(), m)];
                value += (term.amplitude * carrier * y[order]).real();
            }
            out[static_cast<std::size_t>(j)] = value;
        }
    }
}

void compose_force_jet(Exec exec, const Grid& grid, std::span<const ComposeTerm> terms,
                       std::span<const std::vector<double>> jets, int order, std::span<double> out) {
    if (exec == Exec::parallel) {
        compose_force_jet_parallel(grid, terms, jets, order, out);
    } else {
        compose_force_jet_serial(grid, terms, jets, order, out);
    }
}

}  // namespace kernels

}  // namespace qpfk
