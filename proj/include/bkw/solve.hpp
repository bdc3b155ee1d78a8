#pragma once

#include "bkw/model.hpp"
#include "bkw/reduce.hpp"
#include "bkw/rng.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace bkw {

struct Verdict {
    enum class Decision { Lwe, Uniform };
    Decision decision = Decision::Uniform;
    double statistic = 0.0;   // x = (1/m) sum cos(2 pi b_i / q)
    double threshold = 0.0;   // decision line b/2
    std::size_t samples = 0;

    bool is_lwe() const { return decision == Decision::Lwe; }
};

struct RecoveredSecret {
    std::vector<std::int64_t> s;
    double score = 0.0;         // real part of the winning Fourier coefficient (normalized)
    double runner_up_gap = 0.0; // score - second best
};

// Computes x = (1/m) sum cos(2 pi b_i / q) and decides Lwe iff x >= bias_floor / 2.
Verdict distinguish(std::span<const double> b_values, std::int64_t q, double bias_floor);

// Algorithm: accumulate f[a] += exp(2 i pi b / q), n-dimensional DFT of side q,
// argmax of the real part. Errors out if q^dim exceeds `cell_cap`.
RecoveredSecret find_secret_fft(const SampleList& list, std::size_t cell_cap = (1u << 30));

// Step diagnostics emitted by the pipelines (JSON-lines in the CLI).
struct StepDiag {
    std::size_t step = 0;
    std::size_t size = 0;
    double bias_re = 0.0;
    double bias_pred = 0.0;
    double ms = 0.0;
};

struct SolveOptions {
    bool greedy = false;          // use the minimum-difference selection
    std::size_t keep = 0;         // greedy keep count; 0 = keep current list size
    std::size_t bucket_cap = 256; // greedy candidate enumeration cap
    std::size_t fft_cell_cap = (1u << 30);
    unsigned threads = 1;
    std::function<void(const StepDiag&)> on_step;
};

enum class Finisher { Distinguish, FindSecretOnLastBlock };

using SolveResult = std::variant<Verdict, RecoveredSecret>;

// Applies the plan's reduce steps and the finisher. With the FindSecret
// finisher, blocks are recovered last-to-first: each round reduces all earlier
// blocks, recovers the trailing block by FFT, back-substitutes into the input
// samples and recurses on the remaining coordinates.
SolveResult solve_lwe(const SampleList& list, const ReductionPlan& plan, Finisher finisher,
                      const SolveOptions& opts = {});

// Self-contained LWE solver for bounded secrets: direct FFT when q^n fits,
// otherwise an automatic block plan (uniform small D sized so the
// quantization bias stays mild) driven through the FindSecret finisher.
// Returns the recovered secret mod q.
std::vector<std::int64_t> solve_lwe_bounded(const SampleList& list, std::int64_t B_bound,
                                            std::size_t fft_cell_cap = (1u << 20));

// ---------------------------------------------------------------------------
// dimension-1 solver
// ---------------------------------------------------------------------------

struct Dim1Options {
    std::size_t max_rounds = 12;
    std::int64_t fft_radius_cap = 1 << 22; // per refinement round
    double bias_floor = 0.05;              // stop refining below this working bias
};

// Samples are (a, b) with a a signed residue and b real mod q. The stream
// returns std::nullopt when exhausted.
using Dim1Stream = std::function<std::optional<std::pair<std::int64_t, double>>()>;

// Iteratively pairs samples into shrinking balls, then locates the secret by
// Fourier transform over regularly spaced candidates, refining scale by scale.
std::int64_t solve_dim1(Dim1Stream stream, std::int64_t q, double alpha, Rng& rng,
                        const Dim1Options& opts = {});

// ---------------------------------------------------------------------------
// LPN (q = 2), bit-packed
// ---------------------------------------------------------------------------

// Packed LPN sample list for n <= 64.
struct LpnList {
    std::size_t n = 0;
    std::vector<std::uint64_t> a;
    std::vector<std::uint8_t> b;

    std::size_t size() const { return a.size(); }
    void push(std::uint64_t av, int bv) {
        a.push_back(av);
        b.push_back(static_cast<std::uint8_t>(bv & 1));
    }
};

LpnList sample_lpn(std::size_t n, std::uint64_t secret, double p, std::size_t m, Rng& rng);
LpnList sample_lpn_uniform(std::size_t n, std::size_t m, Rng& rng);

// XOR-collision reduction on bit block [bit_lo, bit_hi); pair-once discipline.
LpnList lpn_reduce(const LpnList& list, std::size_t bit_lo, std::size_t bit_hi);

// Runs the Lpn-mode plan and distinguishes with bias floor (1-2p)^(2^k).
Verdict solve_lpn_decision(double p, const LpnList& list);

// Fresh-sample source for the sparse solver; returns false when exhausted.
using LpnSource = std::function<bool(std::uint64_t& a, int& b)>;

struct SparseLpnResult {
    std::uint64_t secret = 0;
    std::size_t trials = 0;
};

// Repeats secret-error switching over 34n fresh samples and tests whether the
// switched secret is zero; reconstructs the original secret on success.
SparseLpnResult solve_lpn_sparse(std::size_t n, double p, LpnSource source, Rng& rng);

} // namespace bkw
