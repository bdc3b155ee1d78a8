#include "bkw/lattice.hpp"
#include "bkw/gen.hpp"
#include "bkw/solve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace bkw {

namespace {

double to_d(const Rat& r) { return r.convert_to<double>(); }
double to_d(const Int& r) { return r.convert_to<double>(); }

Rat dot_rr(std::span<const Rat> a, std::span<const Rat> b) {
    Rat acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Nearest integer with ties toward +infinity.
Int round_rat(const Rat& r) {
    Int num = numerator(r), den = denominator(r); // den > 0
    Int q = (2 * num + den) / (2 * den);
    if ((2 * num + den) < 0 && (2 * num + den) % (2 * den) != 0) q -= 1;
    return q;
}

Gso compute_gso(std::size_t rows, std::size_t cols, const std::vector<Rat>& m) {
    Gso g;
    g.bstar.assign(cols, std::vector<Rat>(rows, Rat(0)));
    g.norm2.assign(cols, Rat(0));
    g.mu.assign(cols, {});
    for (std::size_t j = 0; j < cols; ++j) {
        std::vector<Rat> v(rows);
        for (std::size_t r = 0; r < rows; ++r) v[r] = m[r * cols + j];
        g.mu[j].assign(j, Rat(0));
        for (std::size_t i = 0; i < j; ++i) {
            Rat mu = dot_rr(v, g.bstar[i]) / g.norm2[i];
            g.mu[j][i] = mu;
            for (std::size_t r = 0; r < rows; ++r) v[r] -= mu * g.bstar[i][r];
        }
        g.norm2[j] = dot_rr(v, v);
        if (g.norm2[j] == 0) throw std::runtime_error("gram_schmidt: dependent columns");
        g.bstar[j] = std::move(v);
    }
    g.norm_d.resize(cols);
    g.mu_d.assign(cols, {});
    for (std::size_t j = 0; j < cols; ++j) {
        g.norm_d[j] = std::sqrt(to_d(g.norm2[j]));
        g.max_norm = std::max(g.max_norm, g.norm_d[j]);
        g.mu_d[j].resize(j);
        for (std::size_t i = 0; i < j; ++i) g.mu_d[j][i] = to_d(g.mu[j][i]);
    }
    return g;
}

std::vector<Rat> to_rat_matrix(const LatticeBasis& B) {
    std::vector<Rat> m(B.rows() * B.cols());
    for (std::size_t r = 0; r < B.rows(); ++r)
        for (std::size_t c = 0; c < B.cols(); ++c) m[r * B.cols() + c] = Rat(B.at(r, c));
    return m;
}

// Klein draw over an arbitrary rational column basis, centered at the origin.
// Returns the integer coefficient vector.
std::vector<Int> klein_coefficients(const Gso& g, double sigma, Rng& rng) {
    const std::size_t cols = g.norm_d.size();
    std::vector<Int> z(cols, 0);
    std::vector<double> zc(cols, 0.0);
    for (std::size_t j = cols; j-- > 0;) {
        double c = 0.0;
        for (std::size_t i = j + 1; i < cols; ++i) c -= zc[i] * g.mu_d[i][j];
        double sj = sigma / g.norm_d[j];
        std::int64_t v = dgauss_coset_rho(c, sj, rng);
        z[j] = v;
        zc[j] = static_cast<double>(v);
    }
    return z;
}

} // namespace

// ---------------------------------------------------------------------------
// LatticeBasis
// ---------------------------------------------------------------------------

LatticeBasis::LatticeBasis(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), m_(rows * cols, Int(0)) {
    if (cols == 0 || rows < cols) throw std::runtime_error("LatticeBasis: need rows >= cols >= 1");
}

LatticeBasis LatticeBasis::identity(std::size_t n) {
    LatticeBasis b(n, n);
    for (std::size_t i = 0; i < n; ++i) b.at(i, i) = 1;
    return b;
}

const Gso& LatticeBasis::gso() const {
    if (!gso_) gso_ = compute_gso(rows_, cols_, to_rat_matrix(*this));
    return *gso_;
}

std::vector<Int> LatticeBasis::apply(std::span<const Int> z) const {
    if (z.size() != cols_) throw std::runtime_error("apply: length mismatch");
    std::vector<Int> out(rows_, Int(0));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out[r] += m_[r * cols_ + c] * z[c];
    return out;
}

std::vector<Rat> LatticeBasis::apply_rat(std::span<const Rat> z) const {
    if (z.size() != cols_) throw std::runtime_error("apply_rat: length mismatch");
    std::vector<Rat> out(rows_, Rat(0));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out[r] += Rat(m_[r * cols_ + c]) * z[c];
    return out;
}

const Gso& gram_schmidt(const LatticeBasis& B) { return B.gso(); }

std::vector<Int> babai_nearest_plane(const LatticeBasis& B, std::span<const Rat> target) {
    if (target.size() != B.rows()) throw std::runtime_error("babai: target length mismatch");
    const Gso& g = B.gso();
    std::vector<Rat> t(target.begin(), target.end());
    std::vector<Int> coeff(B.cols(), 0);
    for (std::size_t j = B.cols(); j-- > 0;) {
        Rat c = dot_rr(t, g.bstar[j]) / g.norm2[j];
        Int cj = round_rat(c);
        coeff[j] = cj;
        for (std::size_t r = 0; r < B.rows(); ++r) t[r] -= Rat(cj * B.at(r, j));
    }
    return coeff;
}

std::vector<Int> sample_lattice_gaussian(const LatticeBasis& B, double sigma, Rng& rng,
                                         const LatticeGaussianOptions& opts) {
    const Gso& g = B.gso();
    double floor = opts.floor_factor *
                   std::sqrt(std::max(1.0, std::log2(static_cast<double>(B.cols()) + 1.0))) *
                   g.max_norm;
    if (sigma < floor)
        throw std::runtime_error("sample_lattice_gaussian: sigma " + std::to_string(sigma) +
                                 " below floor " + std::to_string(floor));
    auto z = klein_coefficients(g, sigma, rng);
    return B.apply(z);
}

TailBound gaussian_tail_bound(std::size_t n, double t) {
    if (t < 1.0) throw std::runtime_error("gaussian_tail_bound: t < 1");
    double nn = static_cast<double>(n);
    return {std::exp(-nn * (t * t - 2.0 * std::log(t) - 1.0) / 2.0),
            std::exp(-nn * (t - 1.0) * (t - 1.0) / 2.0)};
}

// ---------------------------------------------------------------------------
// BDD
// ---------------------------------------------------------------------------

namespace {

struct DualData {
    std::vector<Rat> mat;   // rows x cols, D = A (A^T A)^{-1}
    Gso gso;
};

DualData dual_basis(const LatticeBasis& A) {
    const std::size_t rows = A.rows(), cols = A.cols();
    // G = A^T A
    std::vector<Rat> G(cols * cols, Rat(0));
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            Int acc = 0;
            for (std::size_t r = 0; r < rows; ++r) acc += A.at(r, i) * A.at(r, j);
            G[i * cols + j] = Rat(acc);
        }
    // invert G by Gauss-Jordan over rationals
    std::vector<Rat> inv(cols * cols, Rat(0));
    for (std::size_t i = 0; i < cols; ++i) inv[i * cols + i] = 1;
    for (std::size_t col = 0; col < cols; ++col) {
        std::size_t piv = col;
        while (piv < cols && G[piv * cols + col] == 0) ++piv;
        if (piv == cols) throw std::runtime_error("dual_basis: Gram matrix singular");
        if (piv != col)
            for (std::size_t j = 0; j < cols; ++j) {
                std::swap(G[piv * cols + j], G[col * cols + j]);
                std::swap(inv[piv * cols + j], inv[col * cols + j]);
            }
        Rat f = G[col * cols + col];
        for (std::size_t j = 0; j < cols; ++j) {
            G[col * cols + j] /= f;
            inv[col * cols + j] /= f;
        }
        for (std::size_t i = 0; i < cols; ++i) {
            if (i == col) continue;
            Rat c = G[i * cols + col];
            if (c == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                G[i * cols + j] -= c * G[col * cols + j];
                inv[i * cols + j] -= c * inv[col * cols + j];
            }
        }
    }
    DualData d;
    d.mat.assign(rows * cols, Rat(0));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            Rat acc = 0;
            for (std::size_t k = 0; k < cols; ++k) acc += Rat(A.at(r, k)) * inv[k * cols + c];
            d.mat[r * cols + c] = acc;
        }
    d.gso = compute_gso(rows, cols, d.mat);
    return d;
}

} // namespace

double sufficient_dual_sigma(const LatticeBasis& basis, std::int64_t q) {
    // eta_eps(Lambda*) <= sqrt(ln(2n(1 + 1/eps)) / pi) / lambda_1(Lambda) with
    // eps = 2^-n, and lambda_1 >= min_j ||b*_j||.
    const Gso& g = basis.gso();
    double min_gs = *std::min_element(g.norm_d.begin(), g.norm_d.end());
    double n = static_cast<double>(basis.cols());
    double eta = std::sqrt(std::log(2.0 * n * (1.0 + std::pow(2.0, n))) / M_PI) / min_gs;
    return static_cast<double>(q) * eta;
}

BddSamples bdd_to_lwe_samples(const BddInstance& inst, std::int64_t q, double sigma,
                              std::size_t count, Rng& rng) {
    if (inst.target.size() != inst.basis.rows())
        throw std::runtime_error("bdd_to_lwe_samples: target length mismatch");
    DualData dual = dual_basis(inst.basis);
    const std::size_t cols = inst.basis.cols(), rows = inst.basis.rows();

    // Klein feasibility floor (hard), eta-based certification (soft).
    double klein_floor = 2.0 *
                         std::sqrt(std::max(1.0, std::log2(static_cast<double>(cols) + 1.0))) *
                         dual.gso.max_norm;
    if (sigma < klein_floor)
        throw std::runtime_error("bdd_to_lwe_samples: sigma " + std::to_string(sigma) +
                                 " below the dual sampler floor " + std::to_string(klein_floor));
    bool certified = sigma >= sufficient_dual_sigma(inst.basis, q);

    // w = D^T x, so <y, x> = <z, w> for y = D z.
    std::vector<double> w(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        Rat acc = 0;
        for (std::size_t r = 0; r < rows; ++r) acc += dual.mat[r * cols + c] * inst.target[r];
        w[c] = to_d(acc);
    }

    BddSamples out{SampleList(cols, q), certified};
    out.list.reserve(count);
    std::vector<std::int64_t> av(cols);
    for (std::size_t i = 0; i < count; ++i) {
        auto z = klein_coefficients(dual.gso, sigma, rng);
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            double zc = to_d(z[c]);
            dot += zc * w[c];
            av[c] = mod_q(static_cast<std::int64_t>(z[c] % q), q);
        }
        out.list.push(av, mod_q_real(dot, q));
    }
    return out;
}

std::vector<Int> solve_bdd(const BddInstance& inst, std::int64_t q, const LweSolverHandle& solver,
                           const SolveBddOptions& opts) {
    const std::size_t n = inst.basis.cols();
    const Gso& g = inst.basis.gso();
    Rng rng(opts.rng_seed);

    // Schedule start: shortest basis column (assumes a pre-reduced basis).
    double ell = 1e300;
    for (std::size_t j = 0; j < n; ++j) {
        Rat norm2 = 0;
        for (std::size_t r = 0; r < inst.basis.rows(); ++r)
            norm2 += Rat(inst.basis.at(r, j)) * Rat(inst.basis.at(r, j));
        ell = std::min(ell, std::sqrt(to_d(norm2)));
    }
    double min_gs = *std::min_element(g.norm_d.begin(), g.norm_d.end());

    std::size_t max_scales = opts.max_scales;
    if (max_scales == 0)
        max_scales = std::max<std::size_t>(n * n,
                                           static_cast<std::size_t>(4.0 * n * std::log2(ell + 2.0)));

    std::vector<Int> best;
    Rat best_dist2;
    bool have_best = false;
    auto consider = [&](const std::vector<Int>& cand) {
        auto v = inst.basis.apply(cand);
        Rat dist2 = 0;
        for (std::size_t r = 0; r < inst.basis.rows(); ++r) {
            Rat d = Rat(v[r]) - inst.target[r];
            dist2 += d * d;
        }
        if (!have_best || dist2 < best_dist2) {
            best = cand;
            best_dist2 = dist2;
            have_best = true;
        }
        // Babai-exactness region: certified unique closest vector.
        return to_d(dist2) <= min_gs * min_gs / 4.0;
    };

    const double lam_step = 1.0 - 1.0 / static_cast<double>(std::max<std::size_t>(n, 2));
    double lambda = ell;
    for (std::size_t scale = 0; scale < max_scales; ++scale, lambda *= lam_step) {
        double sigma = opts.t * static_cast<double>(q) *
                       std::sqrt(static_cast<double>(n) / (2.0 * M_PI)) / lambda;
        // Skip scales where the dual sampler cannot run yet.
        std::vector<Int> acc(n, 0);
        Int qpow = 1;
        std::vector<Rat> x(inst.target);
        std::int64_t bound = inst.B_bound;
        bool ok = true;
        std::size_t rounds = 0;
        while (bound > 0 && rounds < n + 2) {
            BddInstance cur{inst.basis, x, bound, inst.beta, false};
            BddSamples samples = [&]() -> BddSamples {
                try {
                    return bdd_to_lwe_samples(cur, q, sigma, opts.samples_per_call, rng);
                } catch (const std::runtime_error&) {
                    return {SampleList(n, q), false};
                }
            }();
            if (samples.list.empty()) { ok = false; break; }
            std::vector<std::int64_t> smod;
            try {
                smod = solver(samples.list, bound);
            } catch (const std::runtime_error&) {
                ok = false;
                break;
            }
            // signed representatives accumulate into the candidate
            for (std::size_t j = 0; j < n; ++j)
                acc[j] += qpow * Int(signed_rep(mod_q(smod[j], q), q));
            // x <- (x - A (s mod q)) / q
            std::vector<Rat> shift(inst.basis.rows(), Rat(0));
            for (std::size_t r = 0; r < inst.basis.rows(); ++r) {
                Rat acc2 = 0;
                for (std::size_t c = 0; c < n; ++c)
                    acc2 += Rat(inst.basis.at(r, c)) * Rat(signed_rep(mod_q(smod[c], q), q));
                x[r] = (x[r] - acc2) / Rat(q);
            }
            qpow *= q;
            bound = (bound + q / 2) / q;
            ++rounds;
        }
        if (!ok) continue;
        // Babai finish on the residual target.
        auto tail = babai_nearest_plane(inst.basis, x);
        std::vector<Int> cand(n);
        for (std::size_t j = 0; j < n; ++j) cand[j] = acc[j] + qpow * tail[j];
        if (consider(cand)) return best;
    }
    if (!have_best) throw std::runtime_error("solve_bdd: every scale failed");
    return best;
}

// ---------------------------------------------------------------------------
// UniqueSVP
// ---------------------------------------------------------------------------

namespace {

std::int64_t next_prime_at_least(std::int64_t v) {
    if (v <= 2) return 2;
    if (v % 2 == 0) ++v;
    while (!is_prime_u64(static_cast<std::uint64_t>(v))) v += 2;
    return v;
}

} // namespace

std::vector<Int> unique_svp(const LatticeBasis& basis, std::int64_t B, double beta,
                            const BddHandle& bdd) {
    const std::size_t n = basis.cols();
    const std::int64_t p = next_prime_at_least(static_cast<std::int64_t>(std::ceil(beta)));
    std::vector<Int> best;
    Rat best_norm2;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
        LatticeBasis scaled = basis;
        for (std::size_t r = 0; r < basis.rows(); ++r) scaled.at(r, i) = basis.at(r, i) * p;
        for (std::int64_t rres = 1; rres < p; ++rres) {
            std::vector<Rat> target(basis.rows());
            for (std::size_t r = 0; r < basis.rows(); ++r)
                target[r] = Rat(rres * basis.at(r, i));
            auto sp = bdd(scaled, target, B);
            if (!sp) continue;
            std::vector<Int> cand(n);
            for (std::size_t j = 0; j < n; ++j) cand[j] = (*sp)[j];
            cand[i] = cand[i] * p + rres; // undo the column scaling
            // minimize ||A cand|| over successes, skipping zero
            auto v = basis.apply(cand);
            Rat norm2 = 0;
            bool zero = true;
            for (auto& vi : v) {
                norm2 += Rat(vi) * Rat(vi);
                if (vi != 0) zero = false;
            }
            if (zero) continue;
            if (!found || norm2 < best_norm2) {
                best = cand;
                best_norm2 = norm2;
                found = true;
            }
        }
    }
    if (!found) throw std::runtime_error("unique_svp: all BDD calls failed");
    return best;
}

// ---------------------------------------------------------------------------
// GapSVP
// ---------------------------------------------------------------------------

double gap_svp_required_trials(std::size_t n, std::int64_t R, double d, double sigma,
                               std::int64_t box_bound) {
    double nn = static_cast<double>(n);
    double RR = static_cast<double>(R);
    double xi = std::exp(-nn * RR * RR / (2.0 * sigma * sigma) - 2.0 * std::sqrt(nn) * RR / sigma);
    double gap = (static_cast<double>(box_bound - R)) / sigma - 1.0;
    double eps = std::exp(-2.0 * nn * std::exp(-gap * gap / 2.0)) / 2.0;
    double ball_factor = std::pow(1.0 - d * d, -nn / 2.0);
    return std::ceil(3.0 * nn / (d * eps * xi) * ball_factor);
}

GapVerdict gap_svp_test(const LatticeBasis& basis, std::int64_t R, double d, double sigma,
                        const BddHandle& bdd, Rng& rng, const GapSvpOptions& opts) {
    if (!(d > 0.0 && d < 1.0)) throw std::runtime_error("gap_svp_test: d out of (0,1)");
    const std::size_t n = basis.cols();
    const std::int64_t box = R + static_cast<std::int64_t>(std::ceil(4.0 * sigma));
    double K_d = gap_svp_required_trials(n, R, d, sigma, box);
    if (K_d > static_cast<double>(opts.max_trials))
        throw std::runtime_error("gap_svp_test: required K = " + std::to_string(K_d) +
                                 " exceeds the trial budget");
    const std::size_t K = static_cast<std::size_t>(K_d);

    std::atomic<bool> small_found{false};
    auto run_range = [&](std::size_t lo, std::size_t hi, Rng local) {
        for (std::size_t trial = lo; trial < hi && !small_found.load(); ++trial) {
            std::vector<Int> x(n);
            for (auto& xi : x) xi = dgauss_box_stddev(0.0, sigma, box, local);
            // e uniform in the L2 ball of radius 1/d
            std::vector<double> e(basis.rows());
            double norm = 0.0;
            for (auto& ei : e) {
                ei = local.normal();
                norm += ei * ei;
            }
            norm = std::sqrt(norm);
            double radius = (1.0 / d) * std::pow(local.real01(),
                                                 1.0 / static_cast<double>(basis.rows()));
            for (auto& ei : e) ei = ei / norm * radius;

            auto ax = basis.apply(x);
            std::vector<Rat> target(basis.rows());
            for (std::size_t r = 0; r < basis.rows(); ++r)
                target[r] = Rat(ax[r]) + Rat(e[r]); // dyadic rational, exact
            auto got = bdd(basis, target, box);
            if (!got || *got != x) {
                small_found.store(true);
                return;
            }
        }
    };

    if (opts.threads <= 1) {
        run_range(0, K, rng.split(0));
    } else {
        std::vector<std::thread> pool;
        std::size_t per = (K + opts.threads - 1) / opts.threads;
        for (unsigned t = 0; t < opts.threads; ++t) {
            std::size_t lo = std::min<std::size_t>(t * per, K);
            std::size_t hi = std::min<std::size_t>(lo + per, K);
            pool.emplace_back([&, lo, hi, t] { run_range(lo, hi, rng.split(t)); });
        }
        for (auto& th : pool) th.join();
    }
    return small_found.load() ? GapVerdict::SmallVectorExists : GapVerdict::LambdaLarge;
}

// ---------------------------------------------------------------------------
// subset sum
// ---------------------------------------------------------------------------

BddInstance subset_sum_embed(std::span<const Int> a, const Int& t, const Int& C) {
    const std::size_t n = a.size();
    if (n == 0) throw std::runtime_error("subset_sum_embed: empty instance");
    Int maxa = 0;
    for (const auto& ai : a) maxa = std::max(maxa, ai);
    double logM = std::max(1.0, std::log2(to_d(maxa) + 1.0));
    double density = static_cast<double>(n) / logM;
    double floor = 0.45 * std::pow(2.0, 1.0 / density) * std::sqrt(static_cast<double>(n)) / 2.0;
    if (to_d(C) <= floor)
        throw std::runtime_error("subset_sum_embed: C below the floor " + std::to_string(floor));

    BddInstance inst;
    inst.basis = LatticeBasis(n + 1, n);
    for (std::size_t i = 0; i < n; ++i) {
        inst.basis.at(i, i) = 1;
        inst.basis.at(n, i) = C * a[i];
    }
    inst.target.assign(n + 1, Rat(1, 2));
    inst.target[n] = Rat(C * t);
    inst.B_bound = 1;
    inst.beta = 2.0 * to_d(C) / std::sqrt(static_cast<double>(n));
    return inst;
}

double ball_point_bound(std::size_t n, double r) {
    if (n == 0) throw std::runtime_error("ball_point_bound: n = 0");
    double nn = static_cast<double>(n);
    double log_vn = (nn / 2.0) * std::log(M_PI) - std::lgamma(nn / 2.0 + 1.0);
    return std::exp(log_vn + nn * std::log(r + std::sqrt(nn) / 2.0));
}

std::vector<int> solve_subset_sum(std::span<const Int> a, const Int& t,
                                  const SubsetSumConfig& cfg) {
    const std::size_t n = a.size();
    // verification short-circuits
    Int total = 0;
    for (const auto& ai : a) total += ai;
    if (t == 0) return std::vector<int>(n, 0);
    if (t == total) return std::vector<int>(n, 1);

    double logM = 1.0;
    for (const auto& ai : a) logM = std::max(logM, std::log2(to_d(ai) + 1.0));
    double density = static_cast<double>(n) / logM;
    Int C = Int(static_cast<long long>(
        std::ceil(cfg.c * std::pow(2.0, 1.0 / density) * std::sqrt(static_cast<double>(n)) / 2.0))) + 1;
    BddInstance inst = subset_sum_embed(a, t, C);

    LweSolverHandle solver = cfg.solver;
    if (!solver)
        solver = [](const SampleList& list, std::int64_t B_bound) {
            return solve_lwe_bounded(list, B_bound);
        };
    SolveBddOptions bopts;
    bopts.samples_per_call = cfg.samples_per_call;
    bopts.rng_seed = cfg.rng_seed;
    bopts.max_scales = 4 * n * 64;
    auto best = solve_bdd(inst, cfg.q, solver, bopts);

    std::vector<int> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (best[i] == 0) s[i] = 0;
        else if (best[i] == 1) s[i] = 1;
        else throw std::runtime_error("solve_subset_sum: candidate not binary");
    }
    Int check = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (s[i]) check += a[i];
    if (check != t) throw std::runtime_error("solve_subset_sum: verification failed");
    return s;
}

// ---------------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------------

void write_basis(std::ostream& os, const LatticeBasis& B, const std::vector<Rat>* target) {
    if (B.rows() != B.cols()) throw std::runtime_error("write_basis: square bases only");
    os << B.cols() << "\n";
    for (std::size_t c = 0; c < B.cols(); ++c) {
        for (std::size_t r = 0; r < B.rows(); ++r) {
            if (r) os << ' ';
            os << B.at(r, c);
        }
        os << "\n";
    }
    if (target) {
        os << "t:";
        for (const auto& v : *target) os << ' ' << v;
        os << "\n";
    }
}

LatticeBasis read_basis(std::istream& is, std::vector<Rat>* target) {
    std::size_t n = 0;
    if (!(is >> n) || n == 0) throw std::runtime_error("read_basis: bad dimension line");
    LatticeBasis B(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) {
            Int v;
            if (!(is >> v)) throw std::runtime_error("read_basis: truncated matrix");
            B.at(r, c) = v;
        }
    if (target) target->clear();
    std::string tag;
    if (is >> tag) {
        if (tag != "t:") throw std::runtime_error("read_basis: unexpected trailer " + tag);
        if (!target) throw std::runtime_error("read_basis: unexpected target line");
        target->resize(n);
        for (std::size_t i = 0; i < n; ++i)
            if (!(is >> (*target)[i])) throw std::runtime_error("read_basis: truncated target");
    }
    return B;
}

} // namespace bkw
