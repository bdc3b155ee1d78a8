#include "bkw/gen.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstring>

namespace bkw {

using boost::multiprecision::cpp_int;

double sample_noise(const NoiseModel& noise, std::int64_t q, Rng& rng) {
    struct Visitor {
        std::int64_t q;
        Rng& rng;
        double operator()(const DiscreteGaussian& g) const {
            if (g.sigma == 0.0) return 0.0;
            return static_cast<double>(dgauss_stddev(g.sigma, rng));
        }
        double operator()(const RoundedGaussian& g) const {
            if (g.sigma == 0.0) return 0.0;
            return std::llround(g.sigma * rng.normal());
        }
        double operator()(const Bernoulli& b) const { return rng.bernoulli(b.p) ? 1.0 : 0.0; }
        double operator()(const BoundedUniform& u) const {
            return static_cast<double>(
                static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * u.radius + 1))) - u.radius);
        }
        double operator()(const Exact&) const { return 0.0; }
    };
    return std::visit(Visitor{q, rng}, noise);
}

std::vector<std::int64_t> sample_secret(const LweParams& params, Rng& rng) {
    std::vector<std::int64_t> s(params.n);
    struct Visitor {
        const LweParams& p;
        Rng& rng;
        std::vector<std::int64_t>& s;
        void operator()(const SecretUniform&) const {
            for (auto& v : s) v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p.q)));
        }
        void operator()(const SecretBinary&) const {
            for (auto& v : s) v = static_cast<std::int64_t>(rng.below(2));
        }
        void operator()(const SecretBoundedPerCoordinate& b) const {
            for (std::size_t i = 0; i < s.size(); ++i)
                s[i] = mod_q(rng.uniform_mod_signed(2 * b.B[i] + 1), p.q);
        }
        void operator()(const SecretRoundedNoise&) const {
            for (auto& v : s)
                v = mod_q(static_cast<std::int64_t>(std::llround(sample_noise(p.noise, p.q, rng))), p.q);
        }
    };
    std::visit(Visitor{params, rng, s}, params.secret);
    return s;
}

SampleList sample_lwe(const LweParams& params, std::span<const std::int64_t> s,
                      std::size_t m, Rng& rng) {
    params.validate();
    if (s.size() != params.n) throw std::runtime_error("sample_lwe: secret length != n");
    SampleList out(params.n, params.q);
    out.reserve(m);
    std::vector<std::int64_t> a(params.n);
    for (std::size_t j = 0; j < m; ++j) {
        std::int64_t dot = 0;
        for (std::size_t i = 0; i < params.n; ++i) {
            a[i] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params.q)));
            dot = mod_q(dot + a[i] * signed_rep(s[i], params.q), params.q);
        }
        double e = sample_noise(params.noise, params.q, rng);
        out.push(a, static_cast<double>(dot) + e);
    }
    return out;
}

SampleList sample_uniform(const LweParams& params, std::size_t m, Rng& rng) {
    params.validate();
    SampleList out(params.n, params.q);
    out.reserve(m);
    std::vector<std::int64_t> a(params.n);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < params.n; ++i)
            a[i] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params.q)));
        out.push(a, static_cast<double>(rng.below(static_cast<std::uint64_t>(params.q))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// secret-error switching
// ---------------------------------------------------------------------------

namespace {

std::int64_t egcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    if (b == 0) { x = 1; y = 0; return a; }
    std::int64_t x1, y1;
    std::int64_t g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t q) {
    std::int64_t x, y;
    std::int64_t g = egcd(mod_q(a, q), q, x, y);
    if (g != 1) throw std::runtime_error("inv_mod: not invertible");
    return mod_q(x, q);
}

// Determinant mod q via fraction-free (Bareiss) elimination over big integers.
std::int64_t det_mod(const std::vector<std::int64_t>& mat, std::size_t n, std::int64_t q) {
    std::vector<cpp_int> m(n * n);
    for (std::size_t i = 0; i < n * n; ++i) m[i] = mat[i];
    cpp_int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k * n + k] == 0) {
            std::size_t piv = k + 1;
            while (piv < n && m[piv * n + k] == 0) ++piv;
            if (piv == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
        prev = m[k * n + k];
    }
    cpp_int det = m[(n - 1) * n + (n - 1)] * sign;
    cpp_int r = det % q;
    if (r < 0) r += q;
    return static_cast<std::int64_t>(r);
}

// Inverse mod q by Gaussian elimination when q is prime, adjugate route otherwise.
std::vector<std::int64_t> inverse_mod(const std::vector<std::int64_t>& mat, std::size_t n,
                                      std::int64_t q) {
    if (is_prime_u64(static_cast<std::uint64_t>(q))) {
        std::vector<std::int64_t> a = mat, inv(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            while (piv < n && a[piv * n + col] % q == 0) ++piv;
            if (piv == n) throw std::runtime_error("inverse_mod: singular");
            if (piv != col)
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(a[piv * n + j], a[col * n + j]);
                    std::swap(inv[piv * n + j], inv[col * n + j]);
                }
            std::int64_t f = inv_mod(a[col * n + col], q);
            for (std::size_t j = 0; j < n; ++j) {
                a[col * n + j] = mod_q(a[col * n + j] * f, q);
                inv[col * n + j] = mod_q(inv[col * n + j] * f, q);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col) continue;
                std::int64_t c = mod_q(a[i * n + col], q);
                if (c == 0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    a[i * n + j] = mod_q(a[i * n + j] - c * a[col * n + j], q);
                    inv[i * n + j] = mod_q(inv[i * n + j] - c * inv[col * n + j], q);
                }
            }
        }
        return inv;
    }
    // General q: adjugate over exact integers, then scale by det^{-1} mod q.
    auto minor_det = [&](std::size_t row, std::size_t col) {
        std::vector<std::int64_t> sub((n - 1) * (n - 1));
        std::size_t r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row) continue;
            std::size_t c = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == col) continue;
                sub[r * (n - 1) + c] = mat[i * n + j];
                ++c;
            }
            ++r;
        }
        return det_mod(sub, n - 1, q);
    };
    std::int64_t det = det_mod(mat, n, q);
    std::int64_t dinv = inv_mod(det, q);
    std::vector<std::int64_t> inv(n * n);
    if (n == 1) {
        inv[0] = inv_mod(mat[0], q);
        return inv;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::int64_t cof = mod_q(minor_det(j, i), q);
            if ((i + j) % 2 == 1) cof = mod_q(-cof, q);
            inv[i * n + j] = mod_q(cof * dinv, q);
        }
    return inv;
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    auto mulmod = [](std::uint64_t a, std::uint64_t b, std::uint64_t m) {
        return static_cast<std::uint64_t>((__uint128_t)a * b % m);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e, std::uint64_t m) {
        std::uint64_t r = 1;
        a %= m;
        while (e) {
            if (e & 1) r = mulmod(r, a, m);
            a = mulmod(a, a, m);
            e >>= 1;
        }
        return r;
    };
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

Sample SwitchedInstance::transform(std::span<const std::int64_t> a_prime, double b_prime) const {
    // t = A^{-T} a'  (A_inv is A^{-1}, so A^{-T} = (A_inv)^T). The dot product
    // <t, b> is accumulated mod q in integers so the identity
    // b' - <t, b> = <-t, e> + e' holds bit-exactly for integer noise.
    Sample out;
    out.a.resize(n);
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t ti = 0;
        for (std::size_t j = 0; j < n; ++j)
            ti = mod_q(ti + A_inv[static_cast<std::size_t>(j) * n + i] * a_prime[j], q);
        out.a[i] = mod_q(-ti, q);
        dot = mod_q(dot + ti * b[i], q);
    }
    out.b = mod_q_real(b_prime - static_cast<double>(dot), q);
    return out;
}

SampleList SwitchedInstance::transform(const SampleList& fresh) const {
    SampleList out(n, q);
    out.reserve(fresh.size());
    std::vector<std::int64_t> a(n);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        auto av = fresh.a(i);
        for (std::size_t j = 0; j < n; ++j) a[j] = av[j];
        Sample s = transform(a, fresh.b(i));
        out.push(s.a, s.b);
    }
    return out;
}

std::vector<std::int64_t> SwitchedInstance::recover_secret(std::span<const std::int64_t> e) const {
    if (e.size() != n) throw std::runtime_error("recover_secret: length mismatch");
    std::vector<std::int64_t> s(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc = mod_q(acc + A_inv[i * n + j] * mod_q(b[j] - e[j], q), q);
        s[i] = acc;
    }
    return s;
}

SwitchedInstance secret_error_switch(const SampleList& samples, std::size_t k_extra, Rng& rng) {
    (void)rng; // selection is deterministic (front-first); rng reserved for tie policies
    const std::size_t n = samples.dim();
    const std::int64_t q = samples.q();
    if (n == 0) throw std::runtime_error("secret_error_switch: n = 0");

    const bool prime = is_prime_u64(static_cast<std::uint64_t>(q));
    double llq = std::log2(std::max(2.0, std::log2(static_cast<double>(q))));
    const std::size_t budget = prime ? n + k_extra
                                     : static_cast<std::size_t>(4.0 * n * std::max(1.0, llq)) + k_extra;

    std::vector<std::size_t> chosen;
    chosen.reserve(n);

    if (prime) {
        // Incremental elimination mod q: accept a row iff it extends the rank.
        std::vector<std::vector<std::int64_t>> echelon; // reduced rows
        std::vector<std::size_t> pivot_cols;
        std::size_t used = 0;
        for (; used < std::min(budget, samples.size()) && chosen.size() < n; ++used) {
            auto av = samples.a(used);
            std::vector<std::int64_t> row(av.begin(), av.end());
            for (std::size_t r = 0; r < echelon.size(); ++r) {
                std::int64_t c = row[pivot_cols[r]];
                if (c == 0) continue;
                for (std::size_t j = 0; j < n; ++j)
                    row[j] = mod_q(row[j] - c * echelon[r][j], q);
            }
            std::size_t piv = 0;
            while (piv < n && row[piv] == 0) ++piv;
            if (piv == n) continue; // dependent, skip
            std::int64_t f = inv_mod(row[piv], q);
            for (std::size_t j = 0; j < n; ++j) row[j] = mod_q(row[j] * f, q);
            echelon.push_back(std::move(row));
            pivot_cols.push_back(piv);
            chosen.push_back(used);
        }
        if (chosen.size() < n)
            throw std::runtime_error("secret_error_switch: no invertible matrix within budget (consumed " +
                                     std::to_string(used) + ")");
    } else {
        // Best-effort general path: grow a set of rows independent over Q,
        // then require unit determinant mod q, dropping the newest row on failure.
        std::size_t used = 0;
        while (used < std::min(budget, samples.size())) {
            auto av = samples.a(used);
            chosen.push_back(used);
            ++used;
            if (chosen.size() < n) continue;
            std::vector<std::int64_t> mat(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                auto r = samples.a(chosen[i]);
                for (std::size_t j = 0; j < n; ++j) mat[i * n + j] = r[j];
            }
            std::int64_t x, y;
            if (egcd(det_mod(mat, n, q), q, x, y) == 1) break;
            chosen.pop_back();
        }
        if (chosen.size() < n)
            throw std::runtime_error("secret_error_switch: no invertible matrix within budget (consumed " +
                                     std::to_string(used) + ")");
    }

    SwitchedInstance inst;
    inst.n = n;
    inst.q = q;
    inst.A.resize(n * n);
    inst.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = samples.a(chosen[i]);
        for (std::size_t j = 0; j < n; ++j) inst.A[i * n + j] = r[j];
        inst.b[i] = mod_q(static_cast<std::int64_t>(std::llround(samples.b(chosen[i]))), q);
    }
    inst.A_inv = inverse_mod(inst.A, n, q);
    inst.consumed = chosen.back() + 1;
    return inst;
}

SampleList modulus_switch(const SampleList& samples, std::int64_t p, double varsigma, Rng& rng) {
    const std::int64_t q = samples.q();
    if (p < q) throw std::runtime_error("modulus_switch: p < q");
    const std::size_t n = samples.dim();
    if (varsigma < std::sqrt(static_cast<double>(n)) * static_cast<double>(p) / static_cast<double>(q) - 1e-12)
        throw std::runtime_error("modulus_switch: varsigma below sqrt(n) p/q");

    const double scale = static_cast<double>(p) / static_cast<double>(q);
    SampleList out(n, p);
    out.reserve(samples.size());
    std::vector<std::int64_t> a(n);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto av = samples.a(i);
        for (std::size_t j = 0; j < n; ++j) {
            // Integer Gaussian of parameter varsigma (rho convention, matching
            // the bound alpha'^2 <= alpha^2 + pi B^2 varsigma^2 / p^2) centered
            // at (p/q) a_j, drawn by shifted CDF inversion.
            double c = scale * static_cast<double>(av[j]);
            a[j] = mod_q(dgauss_coset_rho(c, varsigma, rng), p);
        }
        out.push(a, mod_q_real(scale * samples.b(i), p));
    }
    out.depth = samples.depth;
    out.independent = samples.independent;
    return out;
}

SampleList expand_samples(const std::vector<std::vector<std::int64_t>>& A,
                          std::span<const std::int64_t> b, std::int64_t q,
                          double sigma, std::size_t count, Rng& rng) {
    if (count == 0) throw std::runtime_error("expand_samples: count <= 0");
    if (sigma <= 0.0) throw std::runtime_error("expand_samples: sigma <= 0");
    if (!is_prime_u64(static_cast<std::uint64_t>(q))) throw std::runtime_error("expand_samples: q not prime");
    const std::size_t m = A.size();
    if (m == 0 || b.size() != m) throw std::runtime_error("expand_samples: shape mismatch");
    const std::size_t n = A[0].size();

    SampleList out(n, q);
    out.reserve(count);
    std::vector<std::int64_t> av(n);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<std::int64_t> x(m), y(n);
        for (auto& v : x) v = dgauss_rho(sigma, rng);
        for (auto& v : y) v = dgauss_rho(sigma, rng);
        double dot_b = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            dot_b += static_cast<double>(x[i]) * static_cast<double>(b[i]);
        for (std::size_t j = 0; j < n; ++j) {
            std::int64_t acc = y[j];
            for (std::size_t i = 0; i < m; ++i)
                acc = mod_q(acc + mod_q(x[i], q) * A[i][j], q);
            av[j] = acc;
        }
        out.push(av, mod_q_real(dot_b, q));
    }
    out.depth = 0;
    out.independent = true;
    return out;
}

} // namespace bkw
