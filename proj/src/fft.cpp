#include "bkw/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace bkw {

void fft_pow2(std::vector<std::complex<double>>& v, int sign) {
    const std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::runtime_error("fft_pow2: size not a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = v[i + k];
                std::complex<double> t = v[i + k + len / 2] * w;
                v[i + k] = u + t;
                v[i + k + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x, int sign) {
    const std::size_t n = x.size();
    if (n == 0) throw std::runtime_error("dft: empty input");
    if ((n & (n - 1)) == 0) {
        auto v = x;
        fft_pow2(v, sign);
        return v;
    }
    // Bluestein: jk = (j^2 + k^2 - (j-k)^2) / 2.
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    std::vector<std::complex<double>> a(m, {0.0, 0.0}), b(m, {0.0, 0.0});
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the angle argument bounded.
        std::size_t j2 = (j * j) % (2 * n);
        double ang = sign * M_PI * static_cast<double>(j2) / static_cast<double>(n);
        chirp[j] = {std::cos(ang), std::sin(ang)};
    }
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);
    fft_pow2(a, -1);
    fft_pow2(b, -1);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft_pow2(a, +1);
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k] / static_cast<double>(m);
    return out;
}

void dft_multi(std::vector<std::complex<double>>& f, std::size_t q, std::size_t n, int sign) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= q;
    if (f.size() != total) throw std::runtime_error("dft_multi: size mismatch");
    std::vector<std::complex<double>> line(q);
    std::size_t stride = 1;
    for (std::size_t axis = 0; axis < n; ++axis) {
        std::size_t block = stride * q;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t j = 0; j < q; ++j) line[j] = f[base + off + j * stride];
                auto out = dft(line, sign);
                for (std::size_t j = 0; j < q; ++j) f[base + off + j * stride] = out[j];
            }
        }
        stride = block;
    }
}

} // namespace bkw
