#pragma once

// Studentized range quantile at infinite degrees of freedom by direct
// quadrature of P(range of k standard normals <= q)
//   = k * integral phi(z) [Phi(z + q) - Phi(z)]^(k-1) dz
// and bisection on q.

#include <cmath>
#include <cstddef>

namespace testsupport {

inline double range_cdf(double q, std::size_t k) {
    const double inv_sqrt2pi = 0.3989422804014327;
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double lo = -9.0, hi = 9.0;
    const int n = 6000;  // even, Simpson
    const double step = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double z = lo + step * i;
        const double f = inv_sqrt2pi * std::exp(-0.5 * z * z) *
                         std::pow(Phi(z + q) - Phi(z), static_cast<double>(k - 1));
        acc += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return static_cast<double>(k) * acc * step / 3.0;
}

inline double studentized_range_quantile(std::size_t k, double alpha) {
    double lo = 0.0, hi = 10.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (range_cdf(mid, k) < 1.0 - alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testsupport
