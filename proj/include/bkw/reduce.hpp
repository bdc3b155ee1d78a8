#pragma once

#include "bkw/model.hpp"
#include "bkw/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bkw {

// Per-block quantizer: rounds every coordinate of the block to the nearest
// multiple of D, ties toward +infinity. D = 1 is the lossless (zero-forcing)
// quantizer.
struct Quantizer {
    double D = 1.0;
    std::size_t d_lo = 0;
    std::size_t d_hi = 0;
};

enum class PlanMode { General, SmallModulus, Lpn };

struct ReductionPlan {
    double x = 0.0;                    // rate parameter
    std::size_t k = 0;                 // step count
    std::vector<std::size_t> d;        // block boundaries, d[0] = 0, d[k] = n
    std::vector<double> D;             // quantization coefficients, length k
    double m = 0.0;                    // input sample budget
    double predicted_final_bias = 0.0;
    double predicted_cost_bits = 0.0;

    void validate(std::size_t n, std::int64_t q) const;
};

// Proven parametrization (the auxiliary-lemma recursion): k from the closed
// form, D_i = q / (B k 2^{(k-i)/2}), x solved so that d_k = n, m = n 2^k 2^{nx}.
// SmallModulus prepends lossless blocks; Lpn uses equal blocks with D = 1.
ReductionPlan plan(const LweParams& params, std::span<const std::int64_t> B, PlanMode mode);

// One quantized reduction step (the pair-once table algorithm): samples whose
// rounded signed coordinates on [d_lo, d_hi) agree are subtracted. Each input
// is used at most once. |out| <= floor(|in| / 2).
struct ReducePair {
    std::uint32_t i, j;   // output = sample(i) - sample(j), after sign flips below
    std::int8_t sign_i = 1, sign_j = 1;
};
using ReduceTrace = std::vector<ReducePair>;

SampleList reduce_step(const SampleList& list, double D, std::size_t d_lo, std::size_t d_hi,
                       unsigned threads = 1, ReduceTrace* trace = nullptr);

// Greedy variant: also quantizes each sample's negation, enumerates candidate
// differences within each bucket (capped), and keeps the `keep` smallest by L2
// norm over [d_lo, d_hi). Output independence flag is cleared.
SampleList reduce_step_greedy(const SampleList& list, double D, std::size_t d_lo, std::size_t d_hi,
                              std::size_t keep, std::size_t bucket_cap = 256,
                              ReduceTrace* trace = nullptr);

// L2 variant (rejection-sampled Gaussian pairing). Requires D | q. Accepted
// samples have block coordinates whose paired reconstruction follows
// D_{Z, sigma * D}; the output error parameter follows
// alpha'^2 = 2 alpha^2 + 2 pi sum (s_j sigma D / q)^2.
struct L2Stats {
    std::vector<std::int64_t> reconstructed; // accepted per-coordinate values D u + (a mod D)
    std::size_t attempts = 0;
    std::size_t accepted_pairs = 0;
    bool starved = false;   // main-loop guard failed before the attempt budget
};

SampleList reduce_step_l2(const SampleList& list, std::int64_t D, std::size_t d_lo, std::size_t d_hi,
                          double sigma, Rng& rng, L2Stats* stats = nullptr);

// Radius R such that the chi-square CDF of R^2 (dim even, unit coordinate
// variance) equals `proportion`; closed form 1 - exp(-x/2) sum (x/2)^i / i!
// inverted by bisection to 1e-9.
double predict_chi2_radius(std::size_t dim, double proportion);

// Chi-square CDF at x for even dim (the closed form above); exposed for the
// norm-prediction model.
double chi2_cdf_even(std::size_t dim, double x);

} // namespace bkw
