#pragma once

#include <complex>
#include <span>

namespace qpfk::detail {

// In-place unnormalized d-dimensional DFT on an N^d row-major array.
// forward: sum_j x_j exp(-2 pi i k.j / N); backward uses exp(+...).
void fft_forward(std::span<std::complex<double>> data, int dim, int n);
void fft_backward(std::span<std::complex<double>> data, int dim, int n);

}  // namespace qpfk::detail
