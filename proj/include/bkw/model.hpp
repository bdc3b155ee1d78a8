#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace bkw {

// ---------------------------------------------------------------------------
// Noise and secret models
// ---------------------------------------------------------------------------

struct DiscreteGaussian { double sigma; };   // stddev in absolute units
struct RoundedGaussian  { double sigma; };   // round of a continuous N(0, sigma)
struct Bernoulli        { double p; };       // only valid for q = 2
struct BoundedUniform   { std::int64_t radius; }; // uniform on [-radius, radius]
struct Exact            {};                  // noise-free

using NoiseModel = std::variant<DiscreteGaussian, RoundedGaussian, Bernoulli, BoundedUniform, Exact>;

struct SecretUniform {};
struct SecretBinary  {};
struct SecretBoundedPerCoordinate { std::vector<std::int64_t> B; }; // per-coordinate |s_i| <= B_i
struct SecretRoundedNoise {};   // secret follows the rounded error distribution

using SecretModel = std::variant<SecretUniform, SecretBinary, SecretBoundedPerCoordinate, SecretRoundedNoise>;

struct LweParams {
    std::size_t n = 0;           // dimension
    std::int64_t q = 2;          // modulus
    NoiseModel noise = Exact{};
    SecretModel secret = SecretUniform{};
    double epsilon = 0.0;        // distortion bound

    void validate() const {
        if (q < 2) throw std::runtime_error("LweParams: q < 2");
        if (epsilon < 0.0 || epsilon > 1.0) throw std::runtime_error("LweParams: epsilon out of [0,1]");
        if (const auto* b = std::get_if<Bernoulli>(&noise)) {
            if (q != 2) throw std::runtime_error("LweParams: Bernoulli noise requires q = 2");
            if (b->p < 0.0 || b->p > 0.5) throw std::runtime_error("LweParams: Bernoulli p out of [0,1/2]");
        }
        if (const auto* g = std::get_if<DiscreteGaussian>(&noise))
            if (g->sigma < 0.0) throw std::runtime_error("LweParams: sigma < 0");
        if (const auto* g = std::get_if<RoundedGaussian>(&noise))
            if (g->sigma < 0.0) throw std::runtime_error("LweParams: sigma < 0");
        if (const auto* s = std::get_if<SecretBoundedPerCoordinate>(&secret)) {
            if (s->B.size() != n) throw std::runtime_error("LweParams: bound vector length != n");
            for (auto b : s->B)
                if (b < 1) throw std::runtime_error("LweParams: secret bound < 1");
        }
    }
};

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

// Residues are canonicalized to [0, q); the scalar part b lives in [0, q) as a
// real number (the lattice reductions produce non-integer scalars).
struct Sample {
    std::vector<std::int64_t> a;
    double b = 0.0;
};

inline std::int64_t mod_q(std::int64_t x, std::int64_t q) {
    std::int64_t r = x % q;
    return r < 0 ? r + q : r;
}

inline double mod_q_real(double x, std::int64_t q) {
    double r = std::fmod(x, static_cast<double>(q));
    return r < 0.0 ? r + static_cast<double>(q) : r;
}

// Signed representative in (-q/2, q/2].
inline std::int64_t signed_rep(std::int64_t x, std::int64_t q) {
    return 2 * x > q ? x - q : x;
}

// Homogeneous list of samples over a fixed (dim, q). Residues are stored in a
// flat row-major int32 array to keep 2^22-sample experiments in memory.
class SampleList {
public:
    SampleList() = default;
    SampleList(std::size_t dim, std::int64_t q) : dim_(dim), q_(q) {
        if (q < 2) throw std::runtime_error("SampleList: q < 2");
        if (q > INT32_MAX) throw std::runtime_error("SampleList: q exceeds residue storage (int32)");
    }

    std::size_t dim() const { return dim_; }
    std::int64_t q() const { return q_; }
    std::size_t size() const { return b_.size(); }
    bool empty() const { return b_.empty(); }

    std::uint32_t depth = 0;     // reduction steps applied
    bool independent = true;     // false once greedy heuristics are used

    void reserve(std::size_t m) {
        coords_.reserve(m * dim_);
        b_.reserve(m);
    }

    void push(std::span<const std::int64_t> a, double b) {
        if (a.size() != dim_) throw std::runtime_error("SampleList: dimension mismatch");
        for (std::int64_t v : a) coords_.push_back(static_cast<std::int32_t>(mod_q(v, q_)));
        b_.push_back(mod_q_real(b, q_));
    }

    // Raw push: caller guarantees canonical residues.
    void push_raw(const std::int32_t* a, double b) {
        coords_.insert(coords_.end(), a, a + dim_);
        b_.push_back(b);
    }

    std::span<const std::int32_t> a(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<std::int32_t> a_mut(std::size_t i) {
        return {coords_.data() + i * dim_, dim_};
    }
    double b(std::size_t i) const { return b_[i]; }
    double& b_mut(std::size_t i) { return b_[i]; }
    const std::vector<double>& b_values() const { return b_; }

    Sample sample(std::size_t i) const {
        Sample s;
        auto av = a(i);
        s.a.assign(av.begin(), av.end());
        s.b = b_[i];
        return s;
    }

    // Drops trailing coordinates (used after block-wise back-substitution).
    SampleList truncated(std::size_t new_dim) const {
        if (new_dim > dim_) throw std::runtime_error("SampleList: truncate grows dim");
        SampleList out(new_dim, q_);
        out.depth = depth;
        out.independent = independent;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i)
            out.push_raw(coords_.data() + i * dim_, b_[i]);
        return out;
    }

private:
    std::size_t dim_ = 0;
    std::int64_t q_ = 2;
    std::vector<std::int32_t> coords_;
    std::vector<double> b_;
};

// ---------------------------------------------------------------------------
// Bias arithmetic
// ---------------------------------------------------------------------------

// Bias of a mod-q Gaussian of standard deviation q * sigma_over_q.
inline double bias_of_gaussian(double sigma_over_q) {
    if (sigma_over_q < 0.0) throw std::runtime_error("bias_of_gaussian: negative argument");
    return std::exp(-2.0 * M_PI * M_PI * sigma_over_q * sigma_over_q);
}

// (1/m) sum exp(2 i pi x_j / q). Chunked summation keeps the result stable to
// ~1e-9 relative when parallelized.
std::complex<double> empirical_bias(std::span<const double> values, std::int64_t q,
                                    unsigned threads = 1);

// beta = sqrt(n/2) / alpha, with alpha the bias-calibrated noise parameter.
inline double beta_of(double alpha, std::size_t n) {
    if (alpha <= 0.0) throw std::runtime_error("beta_of: noise-free (alpha = 0)");
    return std::sqrt(static_cast<double>(n) / 2.0) / alpha;
}

// Converts a relative Gaussian stddev (stddev = q * alpha_std) to the
// bias-calibrated noise parameter: bias exp(-2 pi^2 a_std^2) = exp(-alpha^2).
inline double alpha_from_stddev(double alpha_std) {
    if (alpha_std < 0.0) throw std::runtime_error("alpha_from_stddev: negative");
    return std::sqrt(2.0) * M_PI * alpha_std;
}

// Exact analytic bias of a noise model mod q (direct summation for the
// discrete laws; NaN-free total function). Exact{} has bias 1.
double analytic_bias(const NoiseModel& noise, std::int64_t q);

// Standard deviation of the noise model (for planning).
double noise_stddev(const NoiseModel& noise);

} // namespace bkw
