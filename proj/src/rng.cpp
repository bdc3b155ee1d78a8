#include "bkw/rng.hpp"

#include <vector>

namespace bkw {

namespace {

// Inverse-CDF draw from a table of unnormalized masses on [lo, hi].
std::int64_t table_draw(const std::vector<double>& mass, std::int64_t lo, Rng& rng) {
    double total = 0.0;
    for (double m : mass) total += m;
    double u = rng.real01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        acc += mass[i];
        if (u < acc) return lo + static_cast<std::int64_t>(i);
    }
    return lo + static_cast<std::int64_t>(mass.size()) - 1;
}

} // namespace

std::int64_t dgauss_rho(double s, Rng& rng) {
    if (!(s > 0.0)) throw std::runtime_error("dgauss_rho: s <= 0");
    const double stddev = s / std::sqrt(2.0 * M_PI);
    const std::int64_t cut = static_cast<std::int64_t>(std::ceil(12.0 * stddev)) + 1;
    std::vector<double> mass(static_cast<std::size_t>(2 * cut + 1));
    for (std::int64_t x = -cut; x <= cut; ++x)
        mass[static_cast<std::size_t>(x + cut)] = std::exp(-M_PI * double(x) * double(x) / (s * s));
    return table_draw(mass, -cut, rng);
}

std::int64_t dgauss_stddev(double sigma, Rng& rng) {
    if (!(sigma > 0.0)) throw std::runtime_error("dgauss_stddev: sigma <= 0");
    return dgauss_rho(sigma * std::sqrt(2.0 * M_PI), rng);
}

std::int64_t dgauss_coset_rho(double c, double s, Rng& rng) {
    if (!(s > 0.0)) throw std::runtime_error("dgauss_coset_rho: s <= 0");
    const double stddev = s / std::sqrt(2.0 * M_PI);
    const std::int64_t center = static_cast<std::int64_t>(std::llround(c));
    const std::int64_t cut = static_cast<std::int64_t>(std::ceil(12.0 * stddev)) + 1;
    std::vector<double> mass(static_cast<std::size_t>(2 * cut + 1));
    for (std::int64_t z = center - cut; z <= center + cut; ++z) {
        double d = static_cast<double>(z) - c;
        mass[static_cast<std::size_t>(z - (center - cut))] = std::exp(-M_PI * d * d / (s * s));
    }
    return table_draw(mass, center - cut, rng);
}

std::int64_t dgauss_box_stddev(double c, double sigma, std::int64_t bound, Rng& rng) {
    if (!(sigma > 0.0)) throw std::runtime_error("dgauss_box_stddev: sigma <= 0");
    if (bound < 0) throw std::runtime_error("dgauss_box_stddev: bound < 0");
    std::vector<double> mass(static_cast<std::size_t>(2 * bound + 1));
    for (std::int64_t z = -bound; z <= bound; ++z) {
        double d = static_cast<double>(z) - c;
        mass[static_cast<std::size_t>(z + bound)] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return table_draw(mass, -bound, rng);
}

} // namespace bkw
