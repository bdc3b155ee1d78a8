#include "bkw/solve.hpp"
#include "bkw/fft.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

namespace bkw {

Verdict distinguish(std::span<const double> b_values, std::int64_t q, double bias_floor) {
    if (b_values.empty()) throw std::runtime_error("distinguish: empty input");
    if (!(bias_floor > 0.0 && bias_floor <= 1.0))
        throw std::runtime_error("distinguish: bias floor out of (0,1]");
    const double w = 2.0 * M_PI / static_cast<double>(q);
    double x = 0.0;
    for (double b : b_values) x += std::cos(w * b);
    x /= static_cast<double>(b_values.size());
    Verdict v;
    v.statistic = x;
    v.threshold = bias_floor / 2.0;
    v.samples = b_values.size();
    v.decision = x >= v.threshold ? Verdict::Decision::Lwe : Verdict::Decision::Uniform;
    return v;
}

RecoveredSecret find_secret_fft(const SampleList& list, std::size_t cell_cap) {
    const std::size_t n = list.dim();
    const std::size_t q = static_cast<std::size_t>(list.q());
    if (list.empty()) throw std::runtime_error("find_secret_fft: empty list");
    double cells_d = std::pow(static_cast<double>(q), static_cast<double>(n));
    if (cells_d > static_cast<double>(cell_cap))
        throw std::runtime_error("find_secret_fft: q^n exceeds the FFT budget; reduce dimension first");
    std::size_t cells = static_cast<std::size_t>(cells_d + 0.5);

    std::vector<std::complex<double>> f(cells, {0.0, 0.0});
    const double w = 2.0 * M_PI / static_cast<double>(q);
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto a = list.a(i);
        std::size_t idx = 0;
        for (std::size_t j = n; j-- > 0;) idx = idx * q + static_cast<std::size_t>(a[j]);
        f[idx] += std::complex<double>(std::cos(w * list.b(i)), std::sin(w * list.b(i)));
    }
    dft_multi(f, q, n, -1);

    std::size_t best = 0;
    double best_re = -1e300, second_re = -1e300;
    for (std::size_t s = 0; s < cells; ++s) {
        double re = f[s].real();
        if (re > best_re) {
            second_re = best_re;
            best_re = re;
            best = s;
        } else if (re > second_re) {
            second_re = re;
        }
    }
    RecoveredSecret r;
    r.s.resize(n);
    std::size_t rem = best;
    for (std::size_t j = 0; j < n; ++j) {
        r.s[j] = static_cast<std::int64_t>(rem % q);
        rem /= q;
    }
    const double m = static_cast<double>(list.size());
    r.score = best_re / m;
    r.runner_up_gap = (best_re - (cells > 1 ? second_re : best_re)) / m;
    return r;
}

// ---------------------------------------------------------------------------
// solve_lwe
// ---------------------------------------------------------------------------

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

SampleList run_reduction(const SampleList& input, const ReductionPlan& plan, std::size_t steps,
                         const SolveOptions& opts, double bias0) {
    SampleList cur = input;
    for (std::size_t i = 0; i < steps; ++i) {
        double t0 = now_ms();
        SampleList next =
            opts.greedy
                ? reduce_step_greedy(cur, plan.D[i], plan.d[i], plan.d[i + 1],
                                     opts.keep ? opts.keep : cur.size(), opts.bucket_cap)
                : reduce_step(cur, plan.D[i], plan.d[i], plan.d[i + 1], opts.threads);
        if (next.empty())
            throw std::runtime_error("solve_lwe: list exhausted at step " + std::to_string(i + 1) +
                                     " of " + std::to_string(steps));
        if (opts.on_step) {
            StepDiag d;
            d.step = i + 1;
            d.size = next.size();
            d.bias_pred = std::pow(bias0, std::pow(2.0, static_cast<double>(i + 1)));
            d.bias_re = next.size() <= (1u << 22)
                            ? empirical_bias(next.b_values(), next.q(), opts.threads).real()
                            : 0.0;
            d.ms = now_ms() - t0;
            opts.on_step(d);
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace

SolveResult solve_lwe(const SampleList& list, const ReductionPlan& plan, Finisher finisher,
                      const SolveOptions& opts) {
    plan.validate(list.dim(), list.q());
    const std::int64_t q = list.q();
    double bias0 = 1.0; // per-step prediction base; final prediction comes from the plan

    if (finisher == Finisher::Distinguish) {
        SampleList reduced = run_reduction(list, plan, plan.k, opts, bias0);
        return distinguish(reduced.b_values(), q, std::max(1e-12, plan.predicted_final_bias));
    }

    // FindSecret finisher: recover blocks last-to-first with back-substitution.
    const std::size_t n = list.dim();
    std::vector<std::int64_t> secret(n, 0);
    SampleList work = list;  // b adjusted as blocks are recovered
    double min_score = 1e300, min_gap = 1e300;

    for (std::size_t round = plan.k; round-- > 0;) {
        std::size_t lo = plan.d[round], hi = plan.d[round + 1];
        if (lo == hi) continue;
        SampleList sliced = work.truncated(hi);
        SampleList reduced = run_reduction(sliced, plan, round, opts, bias0);
        // FFT over the trailing block only.
        SampleList block(hi - lo, q);
        block.reserve(reduced.size());
        std::vector<std::int64_t> av(hi - lo);
        for (std::size_t i = 0; i < reduced.size(); ++i) {
            auto a = reduced.a(i);
            for (std::size_t j = lo; j < hi; ++j) av[j - lo] = a[j];
            block.push(av, reduced.b(i));
        }
        RecoveredSecret r = find_secret_fft(block, opts.fft_cell_cap);
        min_score = std::min(min_score, r.score);
        min_gap = std::min(min_gap, r.runner_up_gap);
        for (std::size_t j = lo; j < hi; ++j) secret[j] = r.s[j - lo];
        // Back-substitute into the working list.
        for (std::size_t i = 0; i < work.size(); ++i) {
            auto a = work.a(i);
            std::int64_t dot = 0;
            for (std::size_t j = lo; j < hi; ++j)
                dot = mod_q(dot + static_cast<std::int64_t>(a[j]) * r.s[j - lo], q);
            work.b_mut(i) = mod_q_real(work.b(i) - static_cast<double>(dot), q);
        }
    }

    RecoveredSecret full;
    full.s = std::move(secret);
    full.score = min_score == 1e300 ? 0.0 : min_score;
    full.runner_up_gap = min_gap == 1e300 ? 0.0 : min_gap;
    return full;
}

std::vector<std::int64_t> solve_lwe_bounded(const SampleList& list, std::int64_t B_bound,
                                            std::size_t fft_cell_cap) {
    const std::size_t n = list.dim();
    const std::int64_t q = list.q();
    const double log2q = std::log2(static_cast<double>(q));
    if (n * log2q <= std::log2(static_cast<double>(fft_cell_cap)))
        return find_secret_fft(list, fft_cell_cap).s;

    // Equal blocks as wide as the FFT budget allows.
    std::size_t w = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 std::log2(static_cast<double>(fft_cell_cap)) / log2q));
    std::size_t k = (n + w - 1) / w;
    ReductionPlan pl;
    pl.k = k;
    pl.d.push_back(0);
    for (std::size_t i = 1; i <= k; ++i) pl.d.push_back(std::min(i * w, n));
    // Uniform D keeping the total quantization noise parameter below ~0.5:
    // sum_i 2^{k-1-i} l_i E[s^2] (2 pi D / q)^2 <= 1/2 with E[s^2] ~ B^2 / 2.
    double Es2 = std::max(0.5, static_cast<double>(B_bound) * static_cast<double>(B_bound) / 3.0);
    double D = static_cast<double>(q) *
               std::sqrt(0.5 / (4.0 * M_PI * M_PI * Es2 * static_cast<double>(w) *
                                std::pow(2.0, static_cast<double>(k))));
    D = std::max(1.0, std::min(D, static_cast<double>(q)));
    pl.D.assign(k, D);
    pl.m = static_cast<double>(list.size());
    pl.predicted_final_bias = 0.1;
    pl.validate(n, q);

    SolveOptions opts;
    opts.fft_cell_cap = fft_cell_cap;
    auto res = solve_lwe(list, pl, Finisher::FindSecretOnLastBlock, opts);
    return std::get<RecoveredSecret>(res).s;
}

// ---------------------------------------------------------------------------
// dimension-1 solver
// ---------------------------------------------------------------------------

namespace {

// Pairs samples into a ball of radius r_next given inputs within r_cur.
// Sorted pending structure; partners are drawn uniformly from the window, per
// the balanced-tree construction, so output coordinates are uniform in the ball.
std::vector<std::pair<std::int64_t, double>> dim1_pair_stage(
    const std::vector<std::pair<std::int64_t, double>>& in, std::int64_t q,
    std::int64_t r_cur, std::int64_t r_next, Rng& rng) {
    std::multimap<std::int64_t, double> pending;
    std::vector<std::pair<std::int64_t, double>> out;
    out.reserve(in.size() / 2);
    for (const auto& [a, b] : in) {
        bool inside = std::llabs(a) <= r_cur - r_next;
        if (inside && !pending.empty()) {
            auto lo = pending.lower_bound(a - r_next);
            auto hi = pending.upper_bound(a + r_next);
            std::size_t count = static_cast<std::size_t>(std::distance(lo, hi));
            if (count > 0) {
                std::size_t pick = static_cast<std::size_t>(rng.below(count));
                auto it = std::next(lo, static_cast<std::ptrdiff_t>(pick));
                std::int64_t a2 = it->first;
                double b2 = it->second;
                pending.erase(it);
                double db = std::fmod(b - b2, static_cast<double>(q));
                out.emplace_back(a - a2, db);
                continue;
            }
        }
        pending.emplace(a, b);
    }
    return out;
}

std::int64_t largest_odd_at_most(std::int64_t v) { return v % 2 == 0 ? v - 1 : v; }

} // namespace

std::int64_t solve_dim1(Dim1Stream stream, std::int64_t q, double alpha, Rng& rng,
                        const Dim1Options& opts) {
    if (q < 16) throw std::runtime_error("solve_dim1: q too small");
    // beta = sqrt(log q) / alpha; k = floor(log2(beta^2 / log2(beta) / 3)); R = q^{1/k}.
    double log2q = std::log2(static_cast<double>(q));
    double beta = std::sqrt(log2q) / std::max(alpha, 1e-9);
    double kraw = std::log2(beta * beta / std::max(1.0, std::log2(beta)) / 3.0);
    std::size_t k = kraw >= 1.0 ? static_cast<std::size_t>(std::floor(kraw)) : 1;
    std::int64_t R = largest_odd_at_most(std::max<std::int64_t>(
        3, static_cast<std::int64_t>(std::pow(static_cast<double>(q), 1.0 / static_cast<double>(k)))));

    std::int64_t s0 = 0;        // current estimate
    std::int64_t W = q / 2;     // residual bound: |s - s0| <= W mod q
    for (std::size_t round = 0; round < opts.max_rounds && W > 0; ++round) {
        // Ball radius fine enough that the candidate grid resolves the window
        // by a factor 2R, capped by the per-round FFT budget.
        std::int64_t want = static_cast<std::int64_t>(
            std::min<double>(static_cast<double>(q) / 2.0 - 1.0,
                             2.0 * static_cast<double>(R) * static_cast<double>(q) /
                                 static_cast<double>(std::max<std::int64_t>(W, 1))));
        std::int64_t ball = largest_odd_at_most(
            std::max<std::int64_t>(3, std::min<std::int64_t>(want, opts.fft_radius_cap)));

        // Fresh samples, shifted by the current estimate.
        std::vector<std::pair<std::int64_t, double>> cur;
        while (cur.size() < (1u << 19)) {
            auto sm = stream();
            if (!sm) break;
            auto [a, braw] = *sm;
            std::int64_t as = signed_rep(mod_q(a, q), q);
            std::int64_t shift = mod_q(as % q * (s0 % q) % q, q);
            cur.emplace_back(as, mod_q_real(braw - static_cast<double>(shift), q));
        }
        if (cur.size() < 64) throw std::runtime_error("solve_dim1: insufficient stream");

        // Shrink the coordinate range down to `ball` through the R-schedule.
        std::int64_t r_cur = q / 2;
        while (r_cur > ball) {
            std::int64_t r_next = largest_odd_at_most(std::max<std::int64_t>(
                ball, static_cast<std::int64_t>(r_cur / static_cast<double>(R))));
            if (r_next >= r_cur) r_next = largest_odd_at_most(r_cur - 2);
            if (r_next < ball) r_next = ball;
            cur = dim1_pair_stage(cur, q, r_cur, r_next, rng);
            if (cur.size() < 16)
                throw std::runtime_error("solve_dim1: insufficient stream (exhausted mid-schedule)");
            r_cur = r_next;
        }

        // Fourier stage: candidates x = s0 + j delta, delta <= q / (4 ball).
        std::int64_t delta = std::max<std::int64_t>(1, q / (4 * ball));
        std::size_t fft_n = static_cast<std::size_t>(std::min<std::int64_t>(q, 1 << 22));
        const bool exact_grid = fft_n == static_cast<std::size_t>(q);
        std::vector<std::complex<double>> g(fft_n, {0.0, 0.0});
        const double w = 2.0 * M_PI / static_cast<double>(q);
        for (const auto& [a, b] : cur) {
            std::int64_t h = mod_q(a * delta % q, q);
            std::size_t idx = exact_grid
                                  ? static_cast<std::size_t>(h)
                                  : static_cast<std::size_t>(
                                        (static_cast<__int128>(h) * static_cast<std::int64_t>(fft_n)) / q);
            g[idx] += std::complex<double>(std::cos(w * b), std::sin(w * b));
        }
        auto t = dft(g, -1);
        double best = -1e300;
        std::int64_t best_j = 0;
        std::int64_t jmax = std::min<std::int64_t>(static_cast<std::int64_t>(fft_n) / 2 - 1,
                                                   W / delta + 1);
        for (std::int64_t j = -jmax; j <= jmax; ++j) {
            std::size_t idx = static_cast<std::size_t>(mod_q(j, static_cast<std::int64_t>(fft_n)));
            if (t[idx].real() > best) {
                best = t[idx].real();
                best_j = j;
            }
        }
        s0 = mod_q(s0 + best_j * delta, q);
        if (delta == 1 && static_cast<std::int64_t>(fft_n) == q) {
            W = 0; // integral grid covered the whole window
        } else {
            W = std::max<std::int64_t>(1, q / ball);
        }
    }
    if (W > 0) throw std::runtime_error("solve_dim1: did not converge within the round budget");
    return mod_q(s0, q);
}

// ---------------------------------------------------------------------------
// LPN
// ---------------------------------------------------------------------------

LpnList sample_lpn(std::size_t n, std::uint64_t secret, double p, std::size_t m, Rng& rng) {
    if (n == 0 || n > 64) throw std::runtime_error("sample_lpn: n out of [1,64]");
    LpnList out;
    out.n = n;
    out.a.reserve(m);
    out.b.reserve(m);
    const std::uint64_t mask = n == 64 ? ~0ULL : ((1ULL << n) - 1);
    for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t a = rng.u64() & mask;
        int b = __builtin_parityll(a & secret);
        if (p > 0.0 && rng.bernoulli(p)) b ^= 1;
        out.push(a, b);
    }
    return out;
}

LpnList sample_lpn_uniform(std::size_t n, std::size_t m, Rng& rng) {
    if (n == 0 || n > 64) throw std::runtime_error("sample_lpn_uniform: n out of [1,64]");
    LpnList out;
    out.n = n;
    out.a.reserve(m);
    out.b.reserve(m);
    const std::uint64_t mask = n == 64 ? ~0ULL : ((1ULL << n) - 1);
    for (std::size_t i = 0; i < m; ++i) out.push(rng.u64() & mask, static_cast<int>(rng.u64() & 1));
    return out;
}

LpnList lpn_reduce(const LpnList& list, std::size_t bit_lo, std::size_t bit_hi) {
    if (bit_hi <= bit_lo || bit_hi > list.n) throw std::runtime_error("lpn_reduce: bad block");
    const std::size_t bits = bit_hi - bit_lo;
    if (bits > 28) throw std::runtime_error("lpn_reduce: block too wide");
    std::vector<std::int32_t> table(1u << bits, -1);
    LpnList out;
    out.n = list.n;
    out.a.reserve(list.size() / 2);
    out.b.reserve(list.size() / 2);
    const std::uint64_t mask = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
    for (std::size_t i = 0; i < list.size(); ++i) {
        std::uint32_t key = static_cast<std::uint32_t>((list.a[i] >> bit_lo) & mask);
        std::int32_t& slot = table[key];
        if (slot < 0) {
            slot = static_cast<std::int32_t>(i);
        } else {
            out.push(list.a[i] ^ list.a[static_cast<std::size_t>(slot)],
                     list.b[i] ^ list.b[static_cast<std::size_t>(slot)]);
            slot = -1;
        }
    }
    return out;
}

Verdict solve_lpn_decision(double p, const LpnList& list) {
    const std::size_t n = list.n;
    if (!(p >= 0.0 && p < 0.5)) throw std::runtime_error("solve_lpn_decision: p out of [0, 1/2)");
    LweParams params;
    params.n = n;
    params.q = 2;
    params.noise = Bernoulli{std::max(p, 1e-9)};
    params.secret = SecretBinary{};
    std::vector<std::int64_t> B(n, 1);
    ReductionPlan pl = plan(params, B, PlanMode::Lpn);

    LpnList cur = list;
    for (std::size_t i = 0; i < pl.k; ++i) {
        cur = lpn_reduce(cur, pl.d[i], pl.d[i + 1]);
        if (cur.size() == 0) throw std::runtime_error("solve_lpn_decision: list exhausted");
    }
    // statistic = 1 - 2 mean(b): exact, no residue floating point
    std::size_t ones = 0;
    for (auto bv : cur.b) ones += bv;
    double stat = 1.0 - 2.0 * static_cast<double>(ones) / static_cast<double>(cur.size());
    double floor_bias = std::pow(1.0 - 2.0 * p, std::pow(2.0, static_cast<double>(pl.k)));
    Verdict v;
    v.statistic = stat;
    v.threshold = std::max(1e-12, floor_bias) / 2.0;
    v.samples = cur.size();
    v.decision = stat >= v.threshold ? Verdict::Decision::Lwe : Verdict::Decision::Uniform;
    return v;
}

namespace {

// GF(2) inversion of an n x n bit matrix given as rows; returns false if singular.
bool gf2_invert(std::vector<std::uint64_t> rows, std::size_t n, std::vector<std::uint64_t>& inv) {
    inv.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) inv[i] = 1ULL << i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && !((rows[piv] >> col) & 1)) ++piv;
        if (piv == n) return false;
        std::swap(rows[piv], rows[col]);
        std::swap(inv[piv], inv[col]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != col && ((rows[i] >> col) & 1)) {
                rows[i] ^= rows[col];
                inv[i] ^= inv[col];
            }
        }
    }
    return true;
}

} // namespace

SparseLpnResult solve_lpn_sparse(std::size_t n, double p, LpnSource source, Rng& rng) {
    (void)rng;
    if (n == 0 || n > 64) throw std::runtime_error("solve_lpn_sparse: n out of [1,64]");
    if (!(p <= 0.25)) throw std::runtime_error("solve_lpn_sparse: p > 1/4");
    const double trials_d = std::ceil(static_cast<double>(n) * std::pow(1.0 - p, -static_cast<double>(n)));
    const std::size_t max_trials = static_cast<std::size_t>(trials_d);
    const double floor_bias = 1.0 - 2.0 * p;

    for (std::size_t trial = 1; trial <= max_trials; ++trial) {
        // 34n fresh samples; first n independent ones form A.
        std::vector<std::uint64_t> rows;
        std::vector<std::uint8_t> bvec;
        std::vector<std::uint64_t> rest_a;
        std::vector<std::uint8_t> rest_b;
        std::vector<std::uint64_t> echelon; // row-reduced copies for the rank test
        std::size_t taken = 0;
        while (taken < 34 * n) {
            std::uint64_t a;
            int b;
            if (!source(a, b)) throw std::runtime_error(
                "solve_lpn_sparse: source exhausted after " + std::to_string(trial - 1) + " trials");
            ++taken;
            if (rows.size() < n) {
                std::uint64_t red = a;
                for (std::size_t r = 0; r < echelon.size(); ++r) {
                    std::uint64_t e = echelon[r];
                    std::uint64_t lead = e & (~e + 1);
                    if (red & lead) red ^= e;
                }
                if (red != 0) {
                    echelon.push_back(red);
                    rows.push_back(a);
                    bvec.push_back(static_cast<std::uint8_t>(b));
                } else {
                    rest_a.push_back(a);
                    rest_b.push_back(static_cast<std::uint8_t>(b));
                }
            } else {
                rest_a.push_back(a);
                rest_b.push_back(static_cast<std::uint8_t>(b));
            }
        }
        if (rows.size() < n) continue;

        std::vector<std::uint64_t> inv;
        if (!gf2_invert(rows, n, inv)) continue;

        // <A^{-T} a', b> = <a', A^{-1} b>, so the transform needs only c = A^{-1} b.
        std::uint64_t bbits = 0;
        for (std::size_t i = 0; i < n; ++i) bbits |= static_cast<std::uint64_t>(bvec[i] & 1) << i;
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (__builtin_parityll(inv[i] & bbits)) c |= 1ULL << i;
        std::size_t ones = 0, m2 = rest_a.size();
        for (std::size_t i = 0; i < m2; ++i)
            ones += static_cast<std::size_t>((rest_b[i] ^ __builtin_parityll(rest_a[i] & c)) & 1);
        double stat = 1.0 - 2.0 * static_cast<double>(ones) / static_cast<double>(m2);
        if (stat >= floor_bias / 2.0) {
            // Switched secret is zero, so c = A^{-1} b is the original secret.
            return {c, trial};
        }
    }
    throw std::runtime_error("solve_lpn_sparse: no zero-secret switch found in " +
                             std::to_string(max_trials) + " trials");
}

} // namespace bkw
