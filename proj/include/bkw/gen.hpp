#pragma once

#include "bkw/model.hpp"
#include "bkw/rng.hpp"

#include <functional>
#include <optional>

namespace bkw {

// Draws one error value from the noise model.
double sample_noise(const NoiseModel& noise, std::int64_t q, Rng& rng);

// Draws a secret vector respecting the secret model.
std::vector<std::int64_t> sample_secret(const LweParams& params, Rng& rng);

// m samples with a uniform mod q and b = <a, s> + e mod q.
SampleList sample_lwe(const LweParams& params, std::span<const std::int64_t> s,
                      std::size_t m, Rng& rng);

// m fully uniform pairs.
SampleList sample_uniform(const LweParams& params, std::size_t m, Rng& rng);

// Outcome of the secret-error switch: an invertible matrix assembled from the
// consumed samples' vectorial parts, the rounded scalar vector, and the
// transform mapping fresh samples into the switched instance whose secret is
// the rounded error of the consumed samples.
struct SwitchedInstance {
    std::size_t n = 0;
    std::int64_t q = 2;
    std::vector<std::int64_t> A;        // row-major n x n, rows are consumed a-vectors
    std::vector<std::int64_t> A_inv;    // A^{-1} mod q
    std::vector<std::int64_t> b;        // rounded noisy dot products, mod q
    std::size_t consumed = 0;           // samples eaten from the front

    // (a', b') -> (-A^{-T} a', b' - <A^{-T} a', b>)
    Sample transform(std::span<const std::int64_t> a_prime, double b_prime) const;
    SampleList transform(const SampleList& fresh) const;

    // s = A^{-1} (b - e) mod q, given the recovered switched secret e.
    std::vector<std::int64_t> recover_secret(std::span<const std::int64_t> e) const;
};

// Consumes samples from the front of `samples` until an invertible matrix is
// found. For prime q the first n independent rows are located by elimination
// with at most n + k_extra candidates; otherwise a best-effort search tests
// unit determinants mod q over at most 4 n max(1, log log q) candidates.
SwitchedInstance secret_error_switch(const SampleList& samples, std::size_t k_extra, Rng& rng);

// Maps each sample (a, b) to a modulus-p instance: every coordinate of the new
// vectorial part is an integer Gaussian of parameter varsigma centered at
// (p/q) a_i, and the scalar becomes (p/q) b. Requires p >= q and
// varsigma >= sqrt(n) p / q.
SampleList modulus_switch(const SampleList& samples, std::int64_t p, double varsigma, Rng& rng);

// Sample expander: from (A, b = A s + e) with A an m x n matrix mod prime q,
// emits `count` samples (A^T x + y, <x, b>), x ~ D_{Z,sigma}^m, y ~ D_{Z,sigma}^n
// (rho-parameter convention). The new error is <x, e> - <y, s>.
SampleList expand_samples(const std::vector<std::vector<std::int64_t>>& A,
                          std::span<const std::int64_t> b, std::int64_t q,
                          double sigma, std::size_t count, Rng& rng);

bool is_prime_u64(std::uint64_t n);

} // namespace bkw
