#pragma once

#include "bkw/model.hpp"
#include "bkw/rng.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <iosfwd>
#include <optional>

namespace bkw {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact Gram-Schmidt data plus double-precision views used by the samplers.
struct Gso {
    std::vector<std::vector<Rat>> bstar; // orthogonalized columns
    std::vector<Rat> norm2;              // |b*_j|^2, exact
    std::vector<std::vector<Rat>> mu;    // mu[j][i] for i < j
    std::vector<double> norm_d;          // ||b*_j|| as double
    std::vector<std::vector<double>> mu_d;
    double max_norm = 0.0;               // ||B~||
};

// Integer basis with rows >= cols (columns are the basis vectors) and cached
// exact Gram-Schmidt data.
class LatticeBasis {
public:
    LatticeBasis() = default;
    LatticeBasis(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Int& at(std::size_t r, std::size_t c) { gso_.reset(); return m_[r * cols_ + c]; }
    const Int& at(std::size_t r, std::size_t c) const { return m_[r * cols_ + c]; }

    static LatticeBasis identity(std::size_t n);

    const Gso& gso() const;

    // B z for integer coefficients.
    std::vector<Int> apply(std::span<const Int> z) const;
    std::vector<Rat> apply_rat(std::span<const Rat> z) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> m_;
    mutable std::optional<Gso> gso_;
};

// Exact Gram-Schmidt of the columns; throws on dependent columns.
const Gso& gram_schmidt(const LatticeBasis& B);

// Nearest-plane: coefficients c with per-direction residual <= ||b*_j|| / 2.
std::vector<Int> babai_nearest_plane(const LatticeBasis& B, std::span<const Rat> target);

// Randomized nearest plane (Klein) from D_{Lambda, sigma} (rho-parameter
// convention). Requires sigma >= floor_factor * sqrt(log2 n) * ||B~||.
struct LatticeGaussianOptions {
    double floor_factor = 2.0;
};
std::vector<Int> sample_lattice_gaussian(const LatticeBasis& B, double sigma, Rng& rng,
                                         const LatticeGaussianOptions& opts = {});

// Banaszczyk tail masses: exp(-n (t^2 - 2 ln t - 1)/2) and the weaker
// exp(-n (t-1)^2 / 2).
struct TailBound {
    double main;
    double weak;
};
TailBound gaussian_tail_bound(std::size_t n, double t);

// ---------------------------------------------------------------------------
// BDD
// ---------------------------------------------------------------------------

struct BddInstance {
    LatticeBasis basis;
    std::vector<Rat> target;              // point x
    std::int64_t B_bound = 1;             // coordinate bound on s (infinity norm)
    double beta = 2.0;                    // gap parameter
    bool promise_checked = false;         // promise |As - x| <= lambda_1/beta not checkable
};

struct BddSamples {
    SampleList list;
    bool sigma_certified = false; // eta_epsilon sufficient condition verified
};

// Emits `count` samples (A^T y mod q, <y, x> mod q) with y ~ D_{Lambda*, sigma}.
// A^T y equals the dual coefficient vector, so the vectorial part is exact.
BddSamples bdd_to_lwe_samples(const BddInstance& inst, std::int64_t q, double sigma,
                              std::size_t count, Rng& rng);

// Sufficient sigma (rho convention) for the dual sampler from the Banaszczyk
// bound; an upper-bound certificate only.
double sufficient_dual_sigma(const LatticeBasis& basis, std::int64_t q);

// LWE-solver callback: given samples and the coordinate bound, return s mod q.
using LweSolverHandle =
    std::function<std::vector<std::int64_t>(const SampleList&, std::int64_t B_bound)>;

struct SolveBddOptions {
    double t = 2.0;              // tail parameter of the descent schedule
    std::size_t samples_per_call = 4096;
    std::size_t max_scales = 0;  // 0: n^2 per the schedule
    std::size_t rng_seed = 1;
};

// Descent lambda-schedule l (1 - 1/n)^i; per scale, mod-q recovery rounds
// followed by a Babai finish; returns the best candidate over all scales.
std::vector<Int> solve_bdd(const BddInstance& inst, std::int64_t q, const LweSolverHandle& solver,
                           const SolveBddOptions& opts = {});

// ---------------------------------------------------------------------------
// UniqueSVP / GapSVP
// ---------------------------------------------------------------------------

using BddHandle = std::function<std::optional<std::vector<Int>>(
    const LatticeBasis&, const std::vector<Rat>& target, std::int64_t B_bound)>;

// For each index i and residue r in [1, p): scale column i by a prime p in
// [beta, 2 beta], target r a_i, call BDD; at most n p calls.
std::vector<Int> unique_svp(const LatticeBasis& basis, std::int64_t B, double beta,
                            const BddHandle& bdd);

enum class GapVerdict { SmallVectorExists, LambdaLarge };

struct GapSvpOptions {
    std::size_t max_trials = 1 << 16; // budget for K
    unsigned threads = 1;
};

// K trials of: x from the box-truncated Gaussian, e uniform in the ball of
// radius 1/d, check BDD(A x + e) == x.
GapVerdict gap_svp_test(const LatticeBasis& basis, std::int64_t R, double d, double sigma,
                        const BddHandle& bdd, Rng& rng, const GapSvpOptions& opts = {});

// Number of trials the test requires for the given parameters.
double gap_svp_required_trials(std::size_t n, std::int64_t R, double d, double sigma,
                               std::int64_t box_bound);

// ---------------------------------------------------------------------------
// subset sum
// ---------------------------------------------------------------------------

// Embedding [[I],[C a]], b = (1/2, ..., 1/2, C t); planted distance is
// exactly sqrt(n)/2.
BddInstance subset_sum_embed(std::span<const Int> a, const Int& t, const Int& C);

// V_n (r + sqrt(n)/2)^n with V_n = pi^{n/2} / Gamma(n/2 + 1).
double ball_point_bound(std::size_t n, double r);

struct SubsetSumConfig {
    std::int64_t q = 257;          // modulus of the LWE pipeline (>= 2^n desk-scale)
    double c = 0.45;               // embedding constant, must stay below sqrt(2/pi/e)
    std::size_t samples_per_call = 1 << 15;
    std::size_t rng_seed = 1;
    LweSolverHandle solver;        // defaults to the BKW pipeline when empty
};

// Embeds, runs BDD backed by the LWE solver, verifies <a, s> = t exactly.
std::vector<int> solve_subset_sum(std::span<const Int> a, const Int& t,
                                  const SubsetSumConfig& cfg);

// ---------------------------------------------------------------------------
// basis file format: first line n, then n lines of n integers (columns),
// optional target line prefixed "t:" with rationals p/q. Bit-exact round-trip.
// ---------------------------------------------------------------------------

void write_basis(std::ostream& os, const LatticeBasis& B, const std::vector<Rat>* target = nullptr);
LatticeBasis read_basis(std::istream& is, std::vector<Rat>* target = nullptr);

} // namespace bkw
