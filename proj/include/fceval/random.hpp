#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fceval {

/// Seeded generator whose transforms are written out here so the same seed
/// yields the same numbers under every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1), never returning 0.
    double uniform_open();
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double gamma(double shape);
    double student_t(double df);
    std::uint64_t poisson(double lambda);
    /// Unbiased integer on [0, n).
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Independent stream seed from a master seed: splitmix64 finaliser applied
/// to the master offset by the stream number.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace fceval
