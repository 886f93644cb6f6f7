#pragma once

#include <complex>

namespace msort {

/// In-place 2D complex FFT of an n x n row-major array. The inverse
/// transform is scaled by 1/n^2. Plans are cached per size; safe to call
/// from multiple threads on distinct buffers.
void fft2_inplace(int n, std::complex<double>* data, bool inverse);

}  // namespace msort
