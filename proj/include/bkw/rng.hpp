#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bkw {

// Identifies a reproducible random stream. Identical specs reproduce
// identical draws bit-for-bit on every platform: the engine is the
// fully-specified std::mt19937_64 and all distributions below are
// hand-rolled (the std:: distribution adapters are implementation-defined).
struct RngSpec {
    std::uint64_t seed = 0;
    std::string algorithm = "mt19937_64";
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), spec_{seed, "mt19937_64"} {}
    explicit Rng(const RngSpec& spec) : Rng(spec.seed) {
        if (spec.algorithm != "mt19937_64")
            throw std::runtime_error("unknown rng algorithm: " + spec.algorithm);
    }

    const RngSpec& spec() const { return spec_; }

    std::uint64_t u64() { return engine_(); }

    // Unbiased uniform draw in [0, n) by masked rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::runtime_error("below(0)");
        if ((n & (n - 1)) == 0) return u64() & (n - 1);
        std::uint64_t mask = ~0ULL >> __builtin_clzll(n | 1);
        for (;;) {
            std::uint64_t v = u64() & mask;
            if (v < n) return v;
        }
    }

    std::int64_t uniform_mod_signed(std::int64_t q) {
        // signed representative in (-q/2, q/2]
        std::int64_t v = static_cast<std::int64_t>(below(static_cast<std::uint64_t>(q)));
        return v <= q / 2 ? v : v - q;
    }

    // Uniform in [0, 1) with 53 bits.
    double real01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real01() < p; }

    // Standard normal via Box-Muller; deterministic given the stream.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do { u1 = real01(); } while (u1 <= 0.0);
        u2 = real01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Derives an independent child stream; used to parallelize generation.
    Rng split(std::uint64_t chunk) const {
        return Rng(splitmix64(spec_.seed ^ splitmix64(chunk + 0x6a09e667f3bcc909ULL)));
    }

private:
    std::mt19937_64 engine_;
    RngSpec spec_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Discrete Gaussian over Z with mass proportional to exp(-pi x^2 / s^2)
// (the rho_s parameter convention), truncated at 12 standard deviations.
// The stddev of this law is s / sqrt(2 pi) up to truncation.
std::int64_t dgauss_rho(double s, Rng& rng);

// Discrete Gaussian over Z with mass proportional to exp(-x^2 / (2 sigma^2)),
// i.e. sigma given as a standard deviation. Equivalent to dgauss_rho with
// s = sigma * sqrt(2 pi).
std::int64_t dgauss_stddev(double sigma, Rng& rng);

// Discrete Gaussian over the coset Z - c (support {z - c : z in Z}), returned
// as the integer z; mass proportional to exp(-pi (z - c)^2 / s^2).
std::int64_t dgauss_coset_rho(double c, double s, Rng& rng);

// Same, bounded support |z| <= bound (box-truncated); mass exp(-(z-c)^2/(2 sigma^2)).
std::int64_t dgauss_box_stddev(double c, double sigma, std::int64_t bound, Rng& rng);

} // namespace bkw
