#include "fceval/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "fceval/error.hpp"

namespace fceval::core {

TimeSeries::TimeSeries(std::string id, std::vector<std::int64_t> timestamps,
                       std::vector<double> values, std::optional<int> frequency)
    : id_(std::move(id)),
      timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      frequency_(frequency) {
    if (values_.empty()) throw DomainError("series '" + id_ + "' is empty");
    if (timestamps_.size() != values_.size())
        throw DomainError("series '" + id_ + "': timestamps and values differ in length");
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
        if (timestamps_[i] <= timestamps_[i - 1]) {
            throw DomainError("series '" + id_ + "': timestamps not strictly increasing at " +
                              std::to_string(timestamps_[i]));
        }
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DomainError("series '" + id_ + "': missing or non-finite value at timestamp " +
                              std::to_string(timestamps_[i]));
        }
    }
    if (frequency_ && *frequency_ < 2)
        throw DomainError("series '" + id_ + "': seasonal period must be >= 2");
}

TimeSeries TimeSeries::from_values(std::string id, std::vector<double> values,
                                   std::optional<int> frequency) {
    std::vector<std::int64_t> ts(values.size());
    std::iota(ts.begin(), ts.end(), std::int64_t{1});
    return {std::move(id), std::move(ts), std::move(values), frequency};
}

double TimeSeries::at(std::size_t t) const {
    if (t < 1 || t > values_.size())
        throw DomainError("position " + std::to_string(t) + " outside series '" + id_ + "'");
    return values_[t - 1];
}

std::optional<std::size_t> TimeSeries::position_of(std::int64_t timestamp) const {
    auto it = std::lower_bound(timestamps_.begin(), timestamps_.end(), timestamp);
    if (it == timestamps_.end() || *it != timestamp) return std::nullopt;
    return static_cast<std::size_t>(it - timestamps_.begin());
}

Dataset::Dataset(std::vector<TimeSeries> series) : series_(std::move(series)) {
    if (series_.empty()) throw DomainError("dataset has no series");
    for (std::size_t i = 0; i < series_.size(); ++i) {
        if (!index_.emplace(series_[i].id(), i).second)
            throw DomainError("duplicate series id '" + series_[i].id() + "'");
    }
}

const TimeSeries* Dataset::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &series_[it->second];
}

const TimeSeries& Dataset::get(const std::string& id) const {
    const auto* s = find(id);
    if (!s) throw DomainError("unknown series id '" + id + "'");
    return *s;
}

// ---------------------------------------------------------------------------

namespace {

void check_origin(const TimeSeries& series, std::size_t origin) {
    if (origin < 1 || origin > series.size()) {
        throw DomainError("origin " + std::to_string(origin) + " outside series '" + series.id() +
                          "' of length " + std::to_string(series.size()));
    }
}

}  // namespace

std::vector<double> naive_forecast(const TimeSeries& series, std::size_t origin, std::size_t h) {
    check_origin(series, origin);
    return std::vector<double>(h, series.at(origin));
}

std::vector<double> seasonal_naive_forecast(const TimeSeries& series, std::size_t origin,
                                            std::size_t h, std::size_t period) {
    if (period < 1) throw DomainError("seasonal period must be >= 1");
    check_origin(series, origin);
    if (origin < period) {
        throw InsufficientDataError("seasonal naive needs origin >= period (origin " +
                                    std::to_string(origin) + ", period " +
                                    std::to_string(period) + ")");
    }
    std::vector<double> out(h);
    for (std::size_t k = 1; k <= h; ++k) {
        const std::size_t cycles = (k + period - 1) / period;
        out[k - 1] = series.at(origin + k - period * cycles);
    }
    return out;
}

std::vector<double> mean_forecast(const TimeSeries& series, std::size_t origin, std::size_t h) {
    check_origin(series, origin);
    const auto v = series.values().first(origin);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(origin);
    return std::vector<double>(h, mean);
}

Forecaster Forecaster::seasonal_naive(std::size_t m) {
    if (m < 1) throw DomainError("seasonal period must be >= 1");
    return {ForecasterKind::SeasonalNaive, m};
}

std::vector<double> Forecaster::forecast(const TimeSeries& series, std::size_t origin,
                                         std::size_t h) const {
    switch (kind) {
        case ForecasterKind::Naive:
            return naive_forecast(series, origin, h);
        case ForecasterKind::SeasonalNaive: {
            auto m = period;
            if (!m && series.frequency()) m = static_cast<std::size_t>(*series.frequency());
            if (!m) throw ConfigError("seasonal-naive needs a period for series '" + series.id() + "'");
            return seasonal_naive_forecast(series, origin, h, *m);
        }
        case ForecasterKind::Mean:
            return mean_forecast(series, origin, h);
        case ForecasterKind::External:
            break;
    }
    throw DomainError("external forecasts are read-only inputs and cannot be generated");
}

std::string Forecaster::name() const {
    switch (kind) {
        case ForecasterKind::Naive: return "naive";
        case ForecasterKind::SeasonalNaive: return "seasonal-naive";
        case ForecasterKind::Mean: return "mean";
        case ForecasterKind::External: return "external";
    }
    return "external";
}

std::optional<ForecasterKind> parse_forecaster_kind(const std::string& text) {
    if (text == "naive") return ForecasterKind::Naive;
    if (text == "seasonal-naive" || text == "snaive") return ForecasterKind::SeasonalNaive;
    if (text == "mean") return ForecasterKind::Mean;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::span<const double> EmbeddedMatrix::predictors(std::size_t row) const {
    if (row >= rows()) throw DomainError("embedded row out of range");
    return std::span<const double>(lags_).subspan(row * order_, order_);
}

std::vector<double> EmbeddedMatrix::reassemble() const {
    if (rows() == 0) return {};
    auto first = predictors(0);
    std::vector<double> out(first.begin(), first.end());
    out.reserve(rows() + order_);
    for (std::size_t i = 0; i < rows(); ++i) out.push_back(targets_[i]);
    return out;
}

EmbeddedMatrix embed(const TimeSeries& series, std::size_t order) {
    if (order < 1) throw DomainError("embedding order must be >= 1");
    const std::size_t n = series.size();
    if (n <= order) {
        throw InsufficientDataError("series '" + series.id() + "' of length " + std::to_string(n) +
                                    " cannot be embedded with order " + std::to_string(order));
    }
    EmbeddedMatrix m;
    m.order_ = order;
    const auto y = series.values();
    m.lags_.reserve((n - order) * order);
    for (std::size_t i = 0; i + order < n; ++i) {
        m.lags_.insert(m.lags_.end(), y.begin() + static_cast<std::ptrdiff_t>(i),
                       y.begin() + static_cast<std::ptrdiff_t>(i + order));
        m.targets_.push_back(y[i + order]);
        m.starts_.push_back(i);
    }
    return m;
}

// ---------------------------------------------------------------------------

std::string Window::label() const { return series_id + "@" + std::to_string(origin); }

EvaluationFrame EvaluationFrame::build(std::shared_ptr<const Dataset> data,
                                       std::span<const ForecastRecord> records) {
    if (!data) throw DomainError("evaluation frame needs a dataset");
    if (records.empty()) throw ValidationError("forecast table is empty");

    std::set<std::string> model_set;
    for (const auto& r : records) model_set.insert(r.model);
    EvaluationFrame frame;
    frame.data_ = std::move(data);
    frame.models_.assign(model_set.begin(), model_set.end());

    std::map<FrameKey, std::vector<std::optional<double>>> cells;
    std::vector<std::string> problems;
    for (const auto& r : records) {
        if (r.step < 1) {
            problems.push_back("row " + r.series_id + "," + std::to_string(r.origin) + "," +
                               std::to_string(r.step) + "," + r.model + ": step must be >= 1");
            continue;
        }
        auto& slot = cells[FrameKey{r.series_id, r.origin, r.step}];
        slot.resize(frame.models_.size());
        const auto m = static_cast<std::size_t>(
            std::lower_bound(frame.models_.begin(), frame.models_.end(), r.model) -
            frame.models_.begin());
        if (slot[m]) {
            problems.push_back("row " + r.series_id + "," + std::to_string(r.origin) + "," +
                               std::to_string(r.step) + "," + r.model + ": duplicate key");
        }
        if (!std::isfinite(r.forecast)) {
            problems.push_back("row " + r.series_id + "," + std::to_string(r.origin) + "," +
                               std::to_string(r.step) + "," + r.model + ": non-finite forecast");
        }
        slot[m] = r.forecast;
    }

    std::map<std::pair<std::string, std::int64_t>, std::size_t> max_step;
    std::map<std::pair<std::string, std::int64_t>, std::size_t> step_count;
    for (auto& [key, slot] : cells) {
        const auto* series = frame.data_->find(key.series_id);
        std::string where =
            key.series_id + "," + std::to_string(key.origin) + "," + std::to_string(key.step);
        if (!series) {
            problems.push_back("key " + where + ": unknown series id");
            continue;
        }
        auto pos = series->position_of(key.origin);
        if (!pos) {
            problems.push_back("key " + where + ": origin is not a timestamp of the series");
            continue;
        }
        if (*pos + key.step >= series->size()) {
            problems.push_back("key " + where + ": target lies beyond the end of the series");
            continue;
        }
        for (std::size_t m = 0; m < frame.models_.size(); ++m) {
            if (!slot[m]) problems.push_back("key " + where + ": missing forecast for model '" +
                                             frame.models_[m] + "'");
        }
        FrameRow row;
        row.key = key;
        row.actual = series->values()[*pos + key.step];
        for (const auto& v : slot) row.forecasts.push_back(v.value_or(0.0));
        const auto wkey = std::make_pair(key.series_id, key.origin);
        max_step[wkey] = std::max(max_step[wkey], key.step);
        ++step_count[wkey];
        frame.rows_.push_back(std::move(row));
    }
    for (const auto& [wkey, mx] : max_step) {
        if (step_count[wkey] != mx) {
            problems.push_back("window " + wkey.first + "," + std::to_string(wkey.second) +
                               ": steps are not contiguous 1.." + std::to_string(mx));
        }
        frame.horizon_ = std::max(frame.horizon_, mx);
    }
    if (!problems.empty()) {
        std::ostringstream os;
        os << "forecast table misaligned with series (" << problems.size() << " problem"
           << (problems.size() == 1 ? "" : "s") << "):";
        for (const auto& p : problems) os << "\n  " << p;
        throw ValidationError(os.str());
    }
    return frame;
}

std::optional<std::size_t> EvaluationFrame::model_index(const std::string& model) const {
    auto it = std::find(models_.begin(), models_.end(), model);
    if (it == models_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - models_.begin());
}

namespace {

template <typename Attach>
std::vector<Window> collect_windows(const EvaluationFrame& frame, std::size_t model,
                                    Attach&& attach) {
    std::vector<Window> out;
    for (const auto& row : frame.rows()) {
        if (out.empty() || out.back().series_id != row.key.series_id ||
            out.back().origin != row.key.origin) {
            const auto& series = frame.dataset().get(row.key.series_id);
            const auto pos = *series.position_of(row.key.origin);
            Window w;
            w.series_id = row.key.series_id;
            w.origin = row.key.origin;
            const auto y = series.values().first(pos + 1);
            w.train.assign(y.begin(), y.end());
            if (series.frequency()) w.period = static_cast<std::size_t>(*series.frequency());
            out.push_back(std::move(w));
        }
        out.back().actual.push_back(row.actual);
        out.back().forecast.push_back(row.forecasts[model]);
    }
    for (auto& w : out) attach(w);
    return out;
}

}  // namespace

std::vector<Window> EvaluationFrame::windows(const std::string& model) const {
    auto m = model_index(model);
    if (!m) throw ConfigError("model '" + model + "' not present in forecast table");
    return collect_windows(*this, *m, [](Window&) {});
}

std::vector<Window> EvaluationFrame::windows(const std::string& model,
                                             const std::string& benchmark_model) const {
    auto m = model_index(model);
    auto b = model_index(benchmark_model);
    if (!m) throw ConfigError("model '" + model + "' not present in forecast table");
    if (!b) throw ConfigError("benchmark model '" + benchmark_model + "' not present");
    auto windows = collect_windows(*this, *m, [](Window&) {});
    auto bench = collect_windows(*this, *b, [](Window&) {});
    for (std::size_t i = 0; i < windows.size(); ++i) windows[i].benchmark = bench[i].forecast;
    return windows;
}

std::vector<Window> EvaluationFrame::windows(const std::string& model,
                                             const Forecaster& benchmark) const {
    auto m = model_index(model);
    if (!m) throw ConfigError("model '" + model + "' not present in forecast table");
    return collect_windows(*this, *m, [&](Window& w) {
        const auto& series = dataset().get(w.series_id);
        w.benchmark = benchmark.forecast(series, w.train.size(), w.horizon());
    });
}

}  // namespace fceval::core
