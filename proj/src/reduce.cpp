#include "bkw/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace bkw {

namespace {

// Rounding to the nearest multiple of D with half-values toward +infinity.
inline std::int64_t round_div(double v, double D) {
    return static_cast<std::int64_t>(std::floor(v / D + 0.5));
}

struct KeyHash {
    std::size_t operator()(const std::vector<std::int32_t>& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::int32_t v : k) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace

// ---------------------------------------------------------------------------
// planning
// ---------------------------------------------------------------------------

void ReductionPlan::validate(std::size_t n, std::int64_t q) const {
    if (d.size() != k + 1 || D.size() != k) throw std::runtime_error("plan: shape mismatch");
    if (d.front() != 0 || d.back() != n) throw std::runtime_error("plan: d_k != n");
    for (std::size_t i = 0; i < k; ++i) {
        if (d[i + 1] < d[i]) throw std::runtime_error("plan: boundaries not monotone");
        if (D[i] < 1.0 || D[i] > static_cast<double>(q)) throw std::runtime_error("plan: D out of range");
    }
}

ReductionPlan plan(const LweParams& params, std::span<const std::int64_t> B, PlanMode mode) {
    params.validate();
    const std::size_t n = params.n;
    const double q = static_cast<double>(params.q);
    if (B.size() != n) throw std::runtime_error("plan: bound vector length != n");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (B[i] < B[i + 1]) throw std::runtime_error("plan: B not non-increasing");
    for (auto b : B)
        if (b < 1) throw std::runtime_error("plan: B_i < 1");

    double alpha;
    if (const auto* bern = std::get_if<Bernoulli>(&params.noise)) {
        double delta = 1.0 - 2.0 * bern->p;
        if (delta <= 0.0) throw std::runtime_error("plan: bias-free Bernoulli noise");
        alpha = std::sqrt(-std::log(delta));
    } else {
        double stddev = noise_stddev(params.noise);
        if (stddev == 0.0) alpha = alpha_from_stddev(1.0 / q); // noise-free: treat as one unit
        else alpha = alpha_from_stddev(stddev / q);
    }
    const double beta = beta_of(alpha, n);
    const double log2beta = std::log2(beta);

    ReductionPlan p;

    if (mode == PlanMode::Lpn) {
        double k_raw = std::log2(beta * beta / log2beta / 3.0);
        if (!(k_raw >= 1.0)) throw std::runtime_error("plan: infeasible (k <= 0)");
        p.k = static_cast<std::size_t>(std::floor(k_raw));
        p.x = 1.0 / static_cast<double>(p.k) + 1.0 / static_cast<double>(n);
        std::size_t step = static_cast<std::size_t>(std::floor(n * p.x));
        if (step == 0) throw std::runtime_error("plan: no admissible rate");
        p.d.push_back(0);
        for (std::size_t i = 1; i <= p.k; ++i)
            p.d.push_back(std::min(i * step, n));
        if (p.d.back() != n) throw std::runtime_error("plan: no admissible rate");
        p.D.assign(p.k, 1.0);
        p.m = static_cast<double>(n) * std::pow(2.0, static_cast<double>(p.k) + n * p.x);
        double delta = std::exp(-alpha * alpha);
        p.predicted_final_bias = std::pow(delta, std::pow(2.0, static_cast<double>(p.k)));
        p.predicted_cost_bits = std::log2(p.m) + std::log2(static_cast<double>(n)) +
                                std::log2(std::max(1.0, std::log2(q)));
        p.validate(n, params.q);
        return p;
    }

    // General / SmallModulus: k from the closed form, D_i laddered, x solved
    // so the recursion d_{i+1} = min(d_i + floor(n x / log2(1 + q/D_i)), n)
    // reaches n.
    double k_raw = std::log2(beta * beta / (12.0 * std::log(1.0 + log2beta)));
    if (!(k_raw >= 1.0)) throw std::runtime_error("plan: infeasible (k <= 0, noise too large)");
    const std::size_t k = static_cast<std::size_t>(std::floor(k_raw));
    const double Bmax = static_cast<double>(B[0]);

    std::size_t zero_blocks = 0;
    if (mode == PlanMode::SmallModulus) {
        // D_i = 1 for i < ceil(2 (c - d + b) log n), with beta = n^c, q = n^d, B = n^b.
        double logn = std::log2(static_cast<double>(n));
        double c = log2beta / logn, dd = std::log2(q) / logn, bb = std::log2(Bmax) / logn;
        double t = 2.0 * (c - dd + bb) * logn;
        zero_blocks = t > 0.0 ? std::min<std::size_t>(k, static_cast<std::size_t>(std::ceil(t))) : 0;
    }

    std::vector<double> Dl(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (i < zero_blocks) { Dl[i] = 1.0; continue; }
        double v = q / (Bmax * static_cast<double>(k) *
                        std::pow(2.0, static_cast<double>(k - i) / 2.0));
        Dl[i] = std::max(1.0, v);
    }

    // Lemma-3 precondition |s_j| D_i < 0.23 q, checked against the block's bound.
    auto coverage = [&](double x) {
        std::vector<std::size_t> d{0};
        for (std::size_t i = 0; i < k; ++i) {
            double block = std::floor(n * x / std::log2(1.0 + q / Dl[i]));
            std::size_t next = std::min<std::size_t>(n, d.back() + static_cast<std::size_t>(std::max(0.0, block)));
            d.push_back(next);
        }
        return d;
    };

    const double x_max = 2.0;
    double lo = 0.0, hi = x_max;
    if (coverage(hi).back() != n) throw std::runtime_error("plan: no admissible rate");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (coverage(mid).back() == n) hi = mid;
        else lo = mid;
    }
    p.x = hi;
    p.k = k;
    p.d = coverage(hi);
    p.D = Dl;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t jlo = p.d[i];
        if (jlo < n && static_cast<double>(B[jlo]) * p.D[i] >= 0.23 * q)
            throw std::runtime_error("plan: |s_j| D_i >= 0.23 q (lemma precondition violated)");
    }
    p.m = static_cast<double>(n) * std::pow(2.0, static_cast<double>(k)) * std::pow(2.0, n * p.x);
    p.predicted_final_bias = std::pow(2.0, -static_cast<double>(n) * p.x / 2.0);
    p.predicted_cost_bits = std::log2(p.m) + std::log2(static_cast<double>(n)) +
                            std::log2(std::max(1.0, std::log2(q)));
    p.validate(n, params.q);
    return p;
}

// ---------------------------------------------------------------------------
// reduce_step
// ---------------------------------------------------------------------------

namespace {

std::vector<std::int32_t> bucket_key(const SampleList& list, std::size_t idx, double D,
                                     std::size_t d_lo, std::size_t d_hi) {
    auto a = list.a(idx);
    std::vector<std::int32_t> key(d_hi - d_lo);
    for (std::size_t j = d_lo; j < d_hi; ++j)
        key[j - d_lo] = static_cast<std::int32_t>(
            round_div(static_cast<double>(signed_rep(a[j], list.q())), D));
    return key;
}

void subtract_into(const SampleList& list, std::size_t i, std::size_t j, SampleList& out) {
    auto ai = list.a(i);
    auto aj = list.a(j);
    const std::int64_t q = list.q();
    std::vector<std::int64_t> diff(list.dim());
    for (std::size_t t = 0; t < list.dim(); ++t)
        diff[t] = mod_q(static_cast<std::int64_t>(ai[t]) - aj[t], q);
    out.push(diff, mod_q_real(list.b(i) - list.b(j), q));
}

} // namespace

SampleList reduce_step(const SampleList& list, double D, std::size_t d_lo, std::size_t d_hi,
                       unsigned threads, ReduceTrace* trace) {
    if (d_hi <= d_lo || d_hi > list.dim()) throw std::runtime_error("reduce_step: bad block");
    if (D < 1.0) throw std::runtime_error("reduce_step: D < 1");

    SampleList out(list.dim(), list.q());
    out.reserve(list.size() / 2);
    if (trace) trace->clear();

    auto run_shard = [&](std::size_t shard, std::size_t nshards, SampleList& dst, ReduceTrace* tr) {
        std::unordered_map<std::vector<std::int32_t>, std::uint32_t, KeyHash> table;
        KeyHash hasher;
        for (std::size_t i = 0; i < list.size(); ++i) {
            auto key = bucket_key(list, i, D, d_lo, d_hi);
            if (nshards > 1 && hasher(key) % nshards != shard) continue;
            auto it = table.find(key);
            if (it == table.end()) {
                table.emplace(std::move(key), static_cast<std::uint32_t>(i));
            } else {
                subtract_into(list, i, it->second, dst);
                if (tr) tr->push_back({static_cast<std::uint32_t>(i), it->second, 1, 1});
                table.erase(it);
            }
        }
    };

    if (threads <= 1) {
        run_shard(0, 1, out, trace);
    } else {
        std::vector<SampleList> parts;
        std::vector<ReduceTrace> traces(threads);
        parts.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) parts.emplace_back(list.dim(), list.q());
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] { run_shard(t, threads, parts[t], trace ? &traces[t] : nullptr); });
        for (auto& th : pool) th.join();
        for (unsigned t = 0; t < threads; ++t) {
            for (std::size_t i = 0; i < parts[t].size(); ++i)
                out.push_raw(parts[t].a(i).data(), parts[t].b(i));
            if (trace) trace->insert(trace->end(), traces[t].begin(), traces[t].end());
        }
    }

    out.depth = list.depth + 1;
    out.independent = list.independent;
    return out;
}

// ---------------------------------------------------------------------------
// reduce_step_greedy
// ---------------------------------------------------------------------------

SampleList reduce_step_greedy(const SampleList& list, double D, std::size_t d_lo, std::size_t d_hi,
                              std::size_t keep, std::size_t bucket_cap, ReduceTrace* trace) {
    if (d_hi <= d_lo || d_hi > list.dim()) throw std::runtime_error("reduce_step_greedy: bad block");
    if (D < 1.0) throw std::runtime_error("reduce_step_greedy: D < 1");
    const std::int64_t q = list.q();

    // Canonical key: quantize the sample and its negation, keep whichever key
    // is lexicographically not larger, remembering the sign used.
    struct Entry { std::uint32_t idx; std::int8_t sign; };
    std::unordered_map<std::vector<std::int32_t>, std::vector<Entry>, KeyHash> table;

    for (std::size_t i = 0; i < list.size(); ++i) {
        auto a = list.a(i);
        std::vector<std::int32_t> kp(d_hi - d_lo), kn(d_hi - d_lo);
        for (std::size_t j = d_lo; j < d_hi; ++j) {
            std::int64_t s = signed_rep(a[j], q);
            kp[j - d_lo] = static_cast<std::int32_t>(round_div(static_cast<double>(s), D));
            kn[j - d_lo] = static_cast<std::int32_t>(round_div(static_cast<double>(-s), D));
        }
        std::int8_t sign = 1;
        auto* key = &kp;
        if (std::lexicographical_compare(kn.begin(), kn.end(), kp.begin(), kp.end())) {
            sign = -1;
            key = &kn;
        }
        auto& bucket = table[*key];
        if (bucket.size() < bucket_cap) bucket.push_back({static_cast<std::uint32_t>(i), sign});
    }

    struct Cand { double norm2; std::uint32_t i, j; std::int8_t si, sj; };
    std::vector<Cand> cands;
    for (auto& [key, bucket] : table) {
        for (std::size_t x = 0; x < bucket.size(); ++x) {
            for (std::size_t y = x + 1; y < bucket.size(); ++y) {
                auto ax = list.a(bucket[x].idx);
                auto ay = list.a(bucket[y].idx);
                double norm2 = 0.0;
                for (std::size_t j = d_lo; j < d_hi; ++j) {
                    std::int64_t d = bucket[x].sign * signed_rep(ax[j], q) -
                                     bucket[y].sign * signed_rep(ay[j], q);
                    d = signed_rep(mod_q(d, q), q);
                    norm2 += static_cast<double>(d) * static_cast<double>(d);
                }
                cands.push_back({norm2, bucket[x].idx, bucket[y].idx, bucket[x].sign, bucket[y].sign});
            }
        }
    }

    if (keep > cands.size()) keep = cands.size();
    std::nth_element(cands.begin(), cands.begin() + keep, cands.end(),
                     [](const Cand& a, const Cand& b) { return a.norm2 < b.norm2; });
    cands.resize(keep);

    SampleList out(list.dim(), q);
    out.reserve(keep);
    if (trace) trace->clear();
    std::vector<std::int64_t> diff(list.dim());
    for (const auto& c : cands) {
        auto ai = list.a(c.i);
        auto aj = list.a(c.j);
        for (std::size_t t = 0; t < list.dim(); ++t)
            diff[t] = mod_q(c.si * static_cast<std::int64_t>(ai[t]) - c.sj * aj[t], q);
        out.push(diff, mod_q_real(c.si * list.b(c.i) - c.sj * list.b(c.j), q));
        if (trace) trace->push_back({c.i, c.j, c.si, c.sj});
    }
    out.depth = list.depth + 1;
    out.independent = false;
    return out;
}

// ---------------------------------------------------------------------------
// reduce_step_l2
// ---------------------------------------------------------------------------

SampleList reduce_step_l2(const SampleList& list, std::int64_t D, std::size_t d_lo, std::size_t d_hi,
                          double sigma, Rng& rng, L2Stats* stats) {
    if (d_hi <= d_lo || d_hi > list.dim()) throw std::runtime_error("reduce_step_l2: bad block");
    const std::int64_t q = list.q();
    if (D < 1 || q % D != 0) throw std::runtime_error("reduce_step_l2: D does not divide q");
    if (sigma < 2.0) throw std::runtime_error("reduce_step_l2: sigma below 2");
    const std::size_t len = d_hi - d_lo;
    const std::int64_t K = q / D; // buckets per coordinate

    // Bucket by the per-coordinate cell index floor(a / D) in Z/KZ.
    std::unordered_map<std::vector<std::int32_t>, std::vector<std::uint32_t>, KeyHash> table;
    std::size_t nonempty_target = 1;
    {
        double cells = std::pow(static_cast<double>(K), static_cast<double>(len));
        nonempty_target = cells > 1e18 ? SIZE_MAX : static_cast<std::size_t>(cells / 3.0);
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto a = list.a(i);
        std::vector<std::int32_t> key(len);
        for (std::size_t j = d_lo; j < d_hi; ++j)
            key[j - d_lo] = static_cast<std::int32_t>(a[j] / D);
        table[key].push_back(static_cast<std::uint32_t>(i));
    }

    SampleList out(list.dim(), q);
    if (stats) { stats->reconstructed.clear(); stats->attempts = 0; stats->accepted_pairs = 0; stats->starved = false; }

    // Acceptance shaping: with u the signed cell index and f = a mod D the
    // in-cell residue, the reconstruction w = D u + f proposed uniformly mod q
    // is accepted with probability rho_sigma(w / D) = rho_{sigma D}(w), so the
    // accepted w follows D_{Z, sigma D} exactly.
    auto accept = [&](std::size_t idx, const std::vector<std::int32_t>& u,
                      std::vector<std::int64_t>* recon) {
        auto a = list.a(idx);
        double log_p = 0.0;
        std::vector<std::int64_t> w(len);
        for (std::size_t j = 0; j < len; ++j) {
            std::int64_t us = signed_rep(static_cast<std::int64_t>(u[j]), K);
            std::int64_t f = a[d_lo + j] % D;
            double t = static_cast<double>(us) + static_cast<double>(f) / static_cast<double>(D);
            log_p += -M_PI * t * t / (sigma * sigma);
            w[j] = D * us + f;
        }
        if (std::log(std::max(rng.real01(), 1e-300)) > log_p) return false;
        if (recon) *recon = std::move(w);
        return true;
    };

    auto count_nonempty = [&] {
        std::size_t c = 0;
        for (auto& [k, v] : table) c += !v.empty();
        return c;
    };

    const std::size_t attempt_budget = 64 * std::max<std::size_t>(list.size(), 16);
    std::size_t attempts = 0;
    std::size_t nonempty = count_nonempty();

    std::vector<std::int64_t> diff(list.dim());
    while (nonempty >= std::max<std::size_t>(1, nonempty_target) && attempts < attempt_budget) {
        ++attempts;
        // One shared Gaussian offset per pair keeps the truncated noise at
        // 2 pi (s sigma D / q)^2 per coordinate; independent offsets would
        // double the quantization term.
        std::vector<std::int32_t> x(len);
        for (auto& v : x) v = static_cast<std::int32_t>(mod_q(dgauss_rho(sigma, rng), K));
        std::vector<std::int32_t> u(len), v(len), ku(len), kv(len);
        std::vector<std::uint32_t>* bu = nullptr;
        std::vector<std::uint32_t>* bv = nullptr;
        for (int tries = 0; tries < 4096; ++tries) {
            for (std::size_t j = 0; j < len; ++j) {
                u[j] = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(K)));
                v[j] = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(K)));
                ku[j] = static_cast<std::int32_t>(mod_q(u[j] + x[j], K));
                kv[j] = static_cast<std::int32_t>(mod_q(v[j] + x[j], K));
            }
            auto itu = table.find(ku);
            if (itu == table.end() || itu->second.empty()) continue;
            auto itv = table.find(kv);
            if (itv == table.end() || itv->second.empty()) continue;
            if (itu == itv && itu->second.size() < 2) continue;
            bu = &itu->second;
            bv = &itv->second;
            break;
        }
        if (!bu || !bv) break;

        std::uint32_t i0 = bu->back(); bu->pop_back();
        std::uint32_t i1 = bv->back(); bv->pop_back();
        if (bu->empty()) --nonempty;
        if (bv != bu && bv->empty()) --nonempty;

        std::vector<std::int64_t> w0, w1;
        bool ok0 = accept(i0, u, stats ? &w0 : nullptr);
        bool ok1 = accept(i1, v, stats ? &w1 : nullptr);
        if (ok0 && ok1) {
            auto a0 = list.a(i0);
            auto a1 = list.a(i1);
            for (std::size_t t = 0; t < list.dim(); ++t)
                diff[t] = mod_q(static_cast<std::int64_t>(a0[t]) - a1[t], q);
            out.push(diff, mod_q_real(list.b(i0) - list.b(i1), q));
            if (stats) {
                stats->accepted_pairs++;
                stats->reconstructed.insert(stats->reconstructed.end(), w0.begin(), w0.end());
                stats->reconstructed.insert(stats->reconstructed.end(), w1.begin(), w1.end());
            }
        }
    }
    if (stats) {
        stats->attempts = attempts;
        stats->starved = attempts >= attempt_budget;
    }

    out.depth = list.depth + 1;
    out.independent = list.independent;
    return out;
}

// ---------------------------------------------------------------------------
// chi-square radius predictor
// ---------------------------------------------------------------------------

double chi2_cdf_even(std::size_t dim, double x) {
    if (dim == 0 || dim % 2 != 0) throw std::runtime_error("chi2_cdf_even: dim must be even and >= 2");
    if (x <= 0.0) return 0.0;
    double half = x / 2.0;
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t i = 1; i < dim / 2; ++i) {
        term *= half / static_cast<double>(i);
        sum += term;
    }
    return 1.0 - std::exp(-half) * sum;
}

double predict_chi2_radius(std::size_t dim, double proportion) {
    if (!(proportion > 0.0 && proportion < 1.0))
        throw std::runtime_error("predict_chi2_radius: proportion out of (0,1)");
    if (dim == 0 || dim % 2 != 0) throw std::runtime_error("predict_chi2_radius: dim must be even and >= 2");
    double lo = 0.0, hi = 1.0;
    while (chi2_cdf_even(dim, hi) < proportion) {
        hi *= 2.0;
        if (hi > 1e18) return std::sqrt(hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (chi2_cdf_even(dim, mid) < proportion) lo = mid;
        else hi = mid;
    }
    return std::sqrt(0.5 * (lo + hi));
}

} // namespace bkw
