#include "qpfk/lattice.hpp"

#include <cmath>
#include <cstdlib>

#include "qpfk/error.hpp"

namespace qpfk {

int norm1(std::span<const int> k) {
    int s = 0;
    for (int ki : k) s += std::abs(ki);
    return s;
}

double norm2_squared(std::span<const int> k) {
    double s = 0.0;
    for (int ki : k) s += static_cast<double>(ki) * ki;
    return s;
}

bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(int dim, int resolution) : dim_(dim), n_(resolution) {
    if (dim < 1) throw Error(ErrorKind::invalid_argument, "grid dimension must be positive");
    if (resolution < 2 || !is_power_of_two(resolution)) {
        throw Error(ErrorKind::unsupported_resolution,
                    "resolution must be an even power of two, got " + std::to_string(resolution));
    }
    size_ = 1;
    for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(resolution);
}

void Grid::index_of(std::size_t flat, std::span<int> k) const noexcept {
    for (int axis = dim_ - 1; axis >= 0; --axis) {
        k[axis] = wavenumber(static_cast<int>(flat % n_));
        flat /= n_;
    }
}

std::size_t Grid::flat_of(std::span<const int> k) const noexcept {
    std::size_t flat = 0;
    for (int axis = 0; axis < dim_; ++axis) flat = flat * n_ + static_cast<std::size_t>(position(k[axis]));
    return flat;
}

std::size_t Grid::negated(std::size_t flat) const noexcept {
    std::size_t out = 0;
    std::size_t stride = 1;
    for (int axis = dim_ - 1; axis >= 0; --axis) {
        const auto p = flat % n_;
        flat /= n_;
        out += ((n_ - p) % n_) * stride;
        stride *= n_;
    }
    return out;
}

bool Grid::on_nyquist(std::size_t flat) const noexcept {
    const auto half = static_cast<std::size_t>(n_ / 2);
    for (int axis = 0; axis < dim_; ++axis) {
        if (flat % n_ == half) return true;
        flat /= n_;
    }
    return false;
}

bool Grid::in_band(std::span<const int> k) const noexcept {
    if (static_cast<int>(k.size()) != dim_) return false;
    for (int ki : k) {
        if (std::abs(ki) >= n_ / 2) return false;
    }
    return true;
}

std::vector<double> Grid::dot_table(std::span<const double> v) const {
    std::vector<double> out(size_, 0.0);
    std::size_t stride = size_;
    for (int axis = 0; axis < dim_; ++axis) {
        stride /= n_;
        for (std::size_t flat = 0; flat < size_; ++flat) {
            const int p = static_cast<int>((flat / stride) % n_);
            out[flat] += wavenumber(p) * v[axis];
        }
    }
    return out;
}

std::vector<int> Grid::norm1_table() const {
    std::vector<int> out(size_, 0);
    std::size_t stride = size_;
    for (int axis = 0; axis < dim_; ++axis) {
        stride /= n_;
        for (std::size_t flat = 0; flat < size_; ++flat) {
            const int p = static_cast<int>((flat / stride) % n_);
            out[flat] += std::abs(wavenumber(p));
        }
    }
    return out;
}

}  // namespace qpfk
