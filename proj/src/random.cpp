#include "fceval/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fceval/error.hpp"

namespace fceval {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

// Marsaglia and Tsang; shapes below one are boosted by U^(1/shape).
double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("gamma shape must be > 0");
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::student_t(double df) {
    if (!(df > 0.0)) throw DomainError("Student-t degrees of freedom must be > 0");
    const double z = normal();
    const double chi2 = 2.0 * gamma(df / 2.0);
    return z / std::sqrt(chi2 / df);
}

std::uint64_t Rng::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("Poisson rate must be finite and >= 0");
    if (lambda == 0.0) return 0;
    if (lambda > 500.0) {
        const double x = std::round(normal(lambda, std::sqrt(lambda)));
        return x < 0.0 ? 0 : static_cast<std::uint64_t>(x);
    }
    // Sequential inversion in log space.
    const double u = uniform();
    std::uint64_t k = 0;
    double log_p = -lambda;
    double cdf = std::exp(log_p);
    while (u >= cdf) {
        ++k;
        log_p += std::log(lambda) - std::log(static_cast<double>(k));
        const double p = std::exp(log_p);
        cdf += p;
        if (p < 1e-300 && static_cast<double>(k) > lambda) break;
    }
    return k;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw DomainError("below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace fceval
