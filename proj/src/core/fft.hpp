#pragma once

#include <complex>
#include <vector>

namespace vpk {

using cvec = std::vector<std::complex<double>>;

/// Forward DFT, X_k = sum_j x_j exp(-2*pi*i*j*k/n). In place.
void fft_forward(cvec& x);

/// Inverse DFT including the 1/n factor. In place.
void fft_inverse(cvec& x);

/// Batched forward/inverse DFT over rows of a contiguous n_rows x n matrix.
void fft_forward_rows(std::complex<double>* data, std::size_t n_rows, std::size_t n);
void fft_inverse_rows(std::complex<double>* data, std::size_t n_rows, std::size_t n);

/// Smallest FFTW-friendly size (2^a 3^b 5^c) >= n.
std::size_t next_fast_size(std::size_t n);

} // namespace vpk
