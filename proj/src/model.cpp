#include "bkw/model.hpp"

#include <thread>

namespace bkw {

std::complex<double> empirical_bias(std::span<const double> values, std::int64_t q,
                                    unsigned threads) {
    if (values.empty()) throw std::runtime_error("empirical_bias: no samples");
    const double w = 2.0 * M_PI / static_cast<double>(q);
    auto chunk_sum = [&](std::size_t lo, std::size_t hi) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            re += std::cos(w * values[i]);
            im += std::sin(w * values[i]);
        }
        return std::complex<double>(re, im);
    };
    std::complex<double> total(0.0, 0.0);
    if (threads <= 1 || values.size() < 1u << 16) {
        total = chunk_sum(0, values.size());
    } else {
        std::vector<std::complex<double>> parts(threads);
        std::vector<std::thread> pool;
        std::size_t per = (values.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t lo = std::min<std::size_t>(t * per, values.size());
            std::size_t hi = std::min<std::size_t>(lo + per, values.size());
            pool.emplace_back([&, t, lo, hi] { parts[t] = chunk_sum(lo, hi); });
        }
        for (auto& th : pool) th.join();
        for (auto& p : parts) total += p;
    }
    return total / static_cast<double>(values.size());
}

double analytic_bias(const NoiseModel& noise, std::int64_t q) {
    const double w = 2.0 * M_PI / static_cast<double>(q);
    struct Visitor {
        std::int64_t q;
        double w;
        double operator()(const DiscreteGaussian& g) const {
            if (g.sigma == 0.0) return 1.0;
            std::int64_t cut = static_cast<std::int64_t>(std::ceil(12.0 * g.sigma)) + 1;
            double num = 0.0, den = 0.0;
            for (std::int64_t x = -cut; x <= cut; ++x) {
                double m = std::exp(-double(x) * double(x) / (2.0 * g.sigma * g.sigma));
                num += m * std::cos(w * double(x));
                den += m;
            }
            return num / den;
        }
        double operator()(const RoundedGaussian& g) const {
            if (g.sigma == 0.0) return 1.0;
            std::int64_t cut = static_cast<std::int64_t>(std::ceil(12.0 * g.sigma)) + 1;
            double num = 0.0, den = 0.0;
            auto cdf = [&](double x) { return 0.5 * std::erfc(-x / (g.sigma * std::sqrt(2.0))); };
            for (std::int64_t k = -cut; k <= cut; ++k) {
                double m = cdf(double(k) + 0.5) - cdf(double(k) - 0.5);
                num += m * std::cos(w * double(k));
                den += m;
            }
            return num / den;
        }
        double operator()(const Bernoulli& b) const { return 1.0 - 2.0 * b.p; }
        double operator()(const BoundedUniform& u) const {
            if (u.radius == 0) return 1.0;
            double num = 0.0;
            for (std::int64_t j = -u.radius; j <= u.radius; ++j) num += std::cos(w * double(j));
            return num / double(2 * u.radius + 1);
        }
        double operator()(const Exact&) const { return 1.0; }
    };
    return std::visit(Visitor{q, w}, noise);
}

double noise_stddev(const NoiseModel& noise) {
    struct Visitor {
        double operator()(const DiscreteGaussian& g) const { return g.sigma; }
        double operator()(const RoundedGaussian& g) const { return g.sigma; }
        double operator()(const Bernoulli& b) const { return std::sqrt(b.p * (1.0 - b.p)); }
        double operator()(const BoundedUniform& u) const {
            double r = static_cast<double>(u.radius);
            return std::sqrt(r * (r + 1.0) / 3.0);
        }
        double operator()(const Exact&) const { return 0.0; }
    };
    return std::visit(Visitor{}, noise);
}

} // namespace bkw
