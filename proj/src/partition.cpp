#include "fceval/partition.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fceval/error.hpp"
#include "fceval/random.hpp"

namespace fceval::partition {

void SplitSpec::validate() const {
    if (horizon < 1) throw ConfigError("split horizon must be >= 1");
    if (stride < 1) throw ConfigError("split stride must be >= 1");
    if (window == WindowKind::Rolling && (!window_length || *window_length < 1))
        throw ConfigError("rolling window needs window_length >= 1");
    if (window_length && *window_length < 1) throw ConfigError("window_length must be >= 1");
    if (scheme == Scheme::KFold && k < 2) throw ConfigError("kfold needs k >= 2");
    if (scheme == Scheme::Blocked && k < 1) throw ConfigError("blocked needs k >= 1");
    if ((scheme == Scheme::KFold || scheme == Scheme::Blocked) && (!order || *order < 1))
        throw ConfigError("kfold/blocked partition the embedded matrix; supply the order p >= 1");
    if (is_temporal(scheme) && initial_train < 1) throw ConfigError("initial_train must be >= 1");
}

bool is_temporal(Scheme s) { return s == Scheme::FixedOrigin || s == Scheme::RollingOrigin; }

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::FixedOrigin: return "fixed-origin";
        case Scheme::RollingOrigin: return "rolling-origin";
        case Scheme::KFold: return "kfold";
        case Scheme::Blocked: return "blocked";
    }
    return "rolling-origin";
}

std::optional<Scheme> parse_scheme(const std::string& text) {
    if (text == "fixed-origin") return Scheme::FixedOrigin;
    if (text == "rolling-origin") return Scheme::RollingOrigin;
    if (text == "kfold") return Scheme::KFold;
    if (text == "blocked") return Scheme::Blocked;
    return std::nullopt;
}

namespace {

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> v(hi - lo);
    std::iota(v.begin(), v.end(), lo);
    return v;
}

}  // namespace

Fold fixed_origin_split(std::size_t n, std::size_t train, std::size_t h) {
    if (train < 1 || h < 1) throw ConfigError("fixed origin needs train >= 1 and h >= 1");
    if (train + h > n) {
        throw InsufficientDataError("fixed origin: train " + std::to_string(train) + " + horizon " +
                                    std::to_string(h) + " exceeds series length " + std::to_string(n));
    }
    return Fold{range(0, train), range(train, train + h), train};
}

std::size_t rolling_origin_count(std::size_t n, std::size_t initial_train, std::size_t h,
                                 std::size_t stride) {
    if (stride < 1) throw ConfigError("stride must be >= 1");
    if (initial_train + h > n) return 0;
    return (n - initial_train - h) / stride + 1;
}

std::vector<Fold> rolling_origin_splits(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    const std::size_t count = rolling_origin_count(n, spec.initial_train, spec.horizon, spec.stride);
    if (count == 0) {
        throw InsufficientDataError("no rolling-origin fold fits: initial_train " +
                                    std::to_string(spec.initial_train) + " + horizon " +
                                    std::to_string(spec.horizon) + " > length " + std::to_string(n));
    }
    if (spec.window == WindowKind::Rolling && *spec.window_length > spec.initial_train) {
        throw ConfigError("rolling window_length " + std::to_string(*spec.window_length) +
                          " exceeds initial_train " + std::to_string(spec.initial_train));
    }
    std::vector<Fold> folds;
    folds.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t origin = spec.initial_train + j * spec.stride;
        std::size_t start = 0;
        if (spec.window_length && origin > *spec.window_length) start = origin - *spec.window_length;
        folds.push_back(Fold{range(start, origin), range(origin, origin + spec.horizon), origin});
    }
    return folds;
}

std::vector<Fold> kfold_splits(const core::EmbeddedMatrix& matrix, std::size_t k, std::uint64_t seed) {
    const std::size_t rows = matrix.rows();
    if (k < 2) throw ConfigError("kfold needs k >= 2");
    if (k > rows) {
        throw InsufficientDataError("kfold: k = " + std::to_string(k) + " exceeds row count " +
                                    std::to_string(rows));
    }
    std::vector<std::size_t> order = range(0, rows);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<Fold> folds(k);
    const std::size_t base = rows / k;
    const std::size_t extra = rows % k;
    std::size_t pos = 0;
    std::vector<std::size_t> owner(rows);
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) owner[order[pos + i]] = f;
        pos += size;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t f = 0; f < k; ++f) (owner[r] == f ? folds[f].test : folds[f].train).push_back(r);
    }
    return folds;
}

std::vector<Fold> blocked_splits(const core::EmbeddedMatrix& matrix, std::size_t k, std::size_t gap) {
    const std::size_t rows = matrix.rows();
    if (k < 1) throw ConfigError("blocked needs k >= 1");
    if (k > rows) {
        throw InsufficientDataError("blocked: k = " + std::to_string(k) + " exceeds row count " +
                                    std::to_string(rows));
    }
    const std::size_t base = rows / k;
    const std::size_t extra = rows % k;
    std::vector<Fold> folds;
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t end = start + base + (f < extra ? 1 : 0);
        Fold fold;
        fold.test = range(start, end);
        // Gap rows clip at the matrix ends, so edge blocks lose a one-sided gap.
        const std::size_t lo = start > gap ? start - gap : 0;
        const std::size_t hi = std::min(rows, end + gap);
        for (std::size_t r = 0; r < lo; ++r) fold.train.push_back(r);
        for (std::size_t r = hi; r < rows; ++r) fold.train.push_back(r);
        if (k > 1 && fold.train.empty()) {
            throw InsufficientDataError("blocked: gap " + std::to_string(gap) +
                                        " leaves fold " + std::to_string(f + 1) + " without training rows");
        }
        folds.push_back(std::move(fold));
        start = end;
    }
    return folds;
}

std::vector<Fold> make_splits(const core::TimeSeries& series, const SplitSpec& spec) {
    spec.validate();
    switch (spec.scheme) {
        case Scheme::FixedOrigin:
            return {fixed_origin_split(series.size(), spec.initial_train, spec.horizon)};
        case Scheme::RollingOrigin:
            return rolling_origin_splits(series.size(), spec);
        case Scheme::KFold:
            return kfold_splits(core::embed(series, *spec.order), spec.k, spec.shuffle_seed);
        case Scheme::Blocked:
            return blocked_splits(core::embed(series, *spec.order), spec.k, spec.gap);
    }
    return {};
}

LeakageReport leakage_check(const Fold& fold, bool temporal) {
    LeakageReport rep;
    std::vector<std::size_t> train = fold.train, test = fold.test;
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    std::vector<std::size_t> overlap;
    std::set_intersection(train.begin(), train.end(), test.begin(), test.end(), std::back_inserter(overlap));
    for (auto i : overlap) rep.violations.push_back("index " + std::to_string(i) + " is in both train and test");
    if (temporal && !test.empty()) {
        const std::size_t first_test = test.front();
        for (auto i : train) {
            if (i >= first_test)
                rep.violations.push_back("train index " + std::to_string(i) + " is not before first test index " +
                                         std::to_string(first_test));
        }
    }
    rep.passed = rep.violations.empty();
    return rep;
}

std::string folds_to_csv(const std::vector<Fold>& folds) {
    std::ostringstream os;
    os << "fold_id,role,index\n";
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (auto i : folds[f].train) os << f + 1 << ",train," << i << '\n';
        for (auto i : folds[f].test) os << f + 1 << ",test," << i << '\n';
    }
    return os.str();
}

}  // namespace fceval::partition
