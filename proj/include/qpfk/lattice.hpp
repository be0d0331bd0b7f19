#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qpfk {

// Multi-index k in Z^d.
using LatticeIndex = std::vector<int>;

// Sum of |k_i|. Used for Diophantine estimates and decay shells.
int norm1(std::span<const int> k);
double norm2_squared(std::span<const int> k);

// Uniform N^d grid in FFT (row-major, last axis fastest) layout. The wave
// number stored at position j on an axis is j for j < N/2 and j - N
// otherwise, so every axis spans [-N/2, N/2).
class Grid {
  public:
    Grid() = default;
    Grid(int dim, int resolution);

    int dim() const noexcept { return dim_; }
    int resolution() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }

    int wavenumber(int position) const noexcept { return position < n_ / 2 ? position : position - n_; }
    int position(int wavenumber) const noexcept { return wavenumber >= 0 ? wavenumber : wavenumber + n_; }

    // Decomposes a flat offset into per-axis wave numbers.
    void index_of(std::size_t flat, std::span<int> k) const noexcept;
    // Flat offset of wave number k; caller guarantees every |k_i| < N/2 or k_i == -N/2.
    std::size_t flat_of(std::span<const int> k) const noexcept;
    // Flat offset of -k (mod N on each axis).
    std::size_t negated(std::size_t flat) const noexcept;

    // True when some axis sits on the Nyquist wave number -N/2.
    bool on_nyquist(std::size_t flat) const noexcept;
    // True when every |k_i| < N/2.
    bool in_band(std::span<const int> k) const noexcept;

    // Per-point dot products k.v for all flat offsets, accumulated axis by axis.
    std::vector<double> dot_table(std::span<const double> v) const;
    // Per-point sums of |k_i|.
    std::vector<int> norm1_table() const;

    bool operator==(const Grid& other) const noexcept = default;

  private:
    int dim_ = 0;
    int n_ = 0;
    std::size_t size_ = 0;
};

bool is_power_of_two(int n) noexcept;

}  // namespace qpfk
