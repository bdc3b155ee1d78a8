#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bkw {

// In-place iterative radix-2 FFT; n must be a power of two.
// sign = -1 gives the forward transform with kernel exp(-2 i pi jk / n).
void fft_pow2(std::vector<std::complex<double>>& v, int sign);

// Arbitrary-length DFT via Bluestein's chirp-z when n is not a power of two.
// Computes X[k] = sum_j x[j] exp(sign * 2 i pi jk / n).
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x, int sign);

// Multi-dimensional DFT of side q over n axes: input f has q^n entries in
// mixed-radix order (index = a_0 + q a_1 + ... + q^{n-1} a_{n-1}).
// Output t[s] = sum_a f[a] exp(sign * 2 i pi <a, s> / q).
void dft_multi(std::vector<std::complex<double>>& f, std::size_t q, std::size_t n, int sign);

} // namespace bkw
