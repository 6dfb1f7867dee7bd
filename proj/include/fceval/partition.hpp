#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fceval/core.hpp"

namespace fceval::partition {

enum class Scheme { FixedOrigin, RollingOrigin, KFold, Blocked };
enum class WindowKind { Expanding, Rolling };

/// Split configuration. Indices produced from it are 0-based positions: in
/// the series for temporal schemes, in the embedded matrix for kfold/blocked.
struct SplitSpec {
    Scheme scheme = Scheme::RollingOrigin;
    std::size_t initial_train = 0;
    std::size_t horizon = 1;
    std::size_t stride = 1;
    WindowKind window = WindowKind::Expanding;
    /// Rolling window length. With an expanding window it caps the training
    /// length, giving expand-then-roll.
    std::optional<std::size_t> window_length;
    std::size_t k = 5;
    std::uint64_t shuffle_seed = 0;
    std::size_t gap = 0;
    /// Embedding order for kfold/blocked.
    std::optional<std::size_t> order;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    /// Number of observations before the first test index (temporal only).
    std::optional<std::size_t> origin;
};

[[nodiscard]] bool is_temporal(Scheme s);
[[nodiscard]] std::string to_string(Scheme s);
[[nodiscard]] std::optional<Scheme> parse_scheme(const std::string& text);

Fold fixed_origin_split(std::size_t n, std::size_t train, std::size_t h);
std::vector<Fold> rolling_origin_splits(std::size_t n, const SplitSpec& spec);
/// Closed-form fold count for rolling origin: floor((n - T - h) / stride) + 1.
std::size_t rolling_origin_count(std::size_t n, std::size_t initial_train, std::size_t h,
                                 std::size_t stride);
std::vector<Fold> kfold_splits(const core::EmbeddedMatrix& matrix, std::size_t k, std::uint64_t seed);
std::vector<Fold> blocked_splits(const core::EmbeddedMatrix& matrix, std::size_t k, std::size_t gap);

/// Dispatches on spec.scheme. kfold/blocked need spec.order.
std::vector<Fold> make_splits(const core::TimeSeries& series, const SplitSpec& spec);

struct LeakageReport {
    bool passed = true;
    std::vector<std::string> violations;
};

LeakageReport leakage_check(const Fold& fold, bool temporal);
inline LeakageReport leakage_check(const Fold& fold, Scheme scheme) {
    return leakage_check(fold, is_temporal(scheme));
}

/// CSV with header fold_id,role,index.
std::string folds_to_csv(const std::vector<Fold>& folds);

}  // namespace fceval::partition
