#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fceval::core {

/// One univariate series. Timestamps are abstract, strictly increasing
/// ordinals; values are y_1..y_T.
///
/// Positions used throughout the library: an *origin* is the 1-based
/// ordinal of the last known observation, i.e. the number of observations
/// available to a forecaster. Index sets (folds, embedded rows) are 0-based.
class TimeSeries {
public:
    TimeSeries(std::string id, std::vector<std::int64_t> timestamps, std::vector<double> values,
               std::optional<int> frequency = std::nullopt);

    /// Convenience: timestamps 1..n.
    static TimeSeries from_values(std::string id, std::vector<double> values,
                                  std::optional<int> frequency = std::nullopt);

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] std::span<const std::int64_t> timestamps() const noexcept { return timestamps_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::optional<int> frequency() const noexcept { return frequency_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// y at 1-based position t.
    [[nodiscard]] double at(std::size_t t) const;
    /// 0-based position of a timestamp, if present.
    [[nodiscard]] std::optional<std::size_t> position_of(std::int64_t timestamp) const;

private:
    std::string id_;
    std::vector<std::int64_t> timestamps_;
    std::vector<double> values_;
    std::optional<int> frequency_;
};

class Dataset {
public:
    explicit Dataset(std::vector<TimeSeries> series);

    [[nodiscard]] std::span<const TimeSeries> series() const noexcept { return series_; }
    [[nodiscard]] std::size_t size() const noexcept { return series_.size(); }
    [[nodiscard]] const TimeSeries* find(const std::string& id) const;
    [[nodiscard]] const TimeSeries& get(const std::string& id) const;

private:
    std::vector<TimeSeries> series_;
    std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Benchmark forecasters

std::vector<double> naive_forecast(const TimeSeries& series, std::size_t origin, std::size_t h);
std::vector<double> seasonal_naive_forecast(const TimeSeries& series, std::size_t origin,
                                            std::size_t h, std::size_t period);
std::vector<double> mean_forecast(const TimeSeries& series, std::size_t origin, std::size_t h);

enum class ForecasterKind { Naive, SeasonalNaive, Mean, External };

/// Interface-level forecaster. Only the benchmark kinds can produce
/// forecasts; `External` marks forecasts that arrive as data.
struct Forecaster {
    ForecasterKind kind = ForecasterKind::Naive;
    std::optional<std::size_t> period;

    static Forecaster naive() { return {ForecasterKind::Naive, std::nullopt}; }
    static Forecaster seasonal_naive(std::size_t m);
    static Forecaster mean() { return {ForecasterKind::Mean, std::nullopt}; }
    static Forecaster external() { return {ForecasterKind::External, std::nullopt}; }

    [[nodiscard]] std::vector<double> forecast(const TimeSeries& series, std::size_t origin,
                                               std::size_t h) const;
    [[nodiscard]] std::string name() const;
};

/// Parses "naive", "seasonal-naive", "mean" (period comes separately).
std::optional<ForecasterKind> parse_forecaster_kind(const std::string& text);

// ---------------------------------------------------------------------------
// Embedded (lag) matrix

class EmbeddedMatrix {
public:
    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] std::size_t rows() const noexcept { return targets_.size(); }
    /// Lag values of row i, oldest first: y_{i}..y_{i+p-1} (0-based positions).
    [[nodiscard]] std::span<const double> predictors(std::size_t row) const;
    [[nodiscard]] double target(std::size_t row) const { return targets_.at(row); }
    /// 0-based position of the first observation covered by row i.
    [[nodiscard]] std::size_t source_start(std::size_t row) const { return starts_.at(row); }
    /// Rebuilds the original series from the rows.
    [[nodiscard]] std::vector<double> reassemble() const;

private:
    friend EmbeddedMatrix embed(const TimeSeries& series, std::size_t order);
    std::size_t order_ = 0;
    std::vector<double> lags_;  // row-major, rows() x order_
    std::vector<double> targets_;
    std::vector<std::size_t> starts_;
};

EmbeddedMatrix embed(const TimeSeries& series, std::size_t order);

// ---------------------------------------------------------------------------
// Aligned evaluation data

struct FrameKey {
    std::string series_id;
    std::int64_t origin = 0;  // timestamp of the forecast origin
    std::size_t step = 0;     // 1..h

    auto operator<=>(const FrameKey&) const = default;
};

struct FrameRow {
    FrameKey key;
    double actual = 0.0;
    std::vector<double> forecasts;  // one per model, in EvaluationFrame::models() order
};

/// One (series, origin) forecast window, the unit that every measure is
/// computed over. `train` holds the in-sample values y_1..y_origin.
struct Window {
    std::string series_id;
    std::int64_t origin = 0;
    std::vector<double> actual;
    std::vector<double> forecast;
    std::vector<double> benchmark;  // empty when no benchmark is attached
    std::vector<double> train;
    std::optional<std::size_t> period;

    [[nodiscard]] std::size_t horizon() const noexcept { return actual.size(); }
    [[nodiscard]] std::string label() const;
};

/// Long-form forecast record (series_id, origin, step, model, forecast).
struct ForecastRecord {
    std::string series_id;
    std::int64_t origin = 0;
    std::size_t step = 0;
    std::string model;
    double forecast = 0.0;
};

class EvaluationFrame {
public:
    /// Joins forecast records with the dataset's actuals. Throws
    /// ValidationError listing every offending row when the records are not
    /// dense (each key carries every model exactly once), when an origin is
    /// not a timestamp of its series, or when a target lies past the end.
    static EvaluationFrame build(std::shared_ptr<const Dataset> data,
                                 std::span<const ForecastRecord> records);

    [[nodiscard]] std::span<const std::string> models() const noexcept { return models_; }
    [[nodiscard]] std::span<const FrameRow> rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }
    [[nodiscard]] std::optional<std::size_t> model_index(const std::string& model) const;
    [[nodiscard]] const Dataset& dataset() const noexcept { return *data_; }

    /// Windows for one model. The benchmark is either another model of the
    /// frame or a benchmark forecaster evaluated at each window's origin.
    [[nodiscard]] std::vector<Window> windows(const std::string& model) const;
    [[nodiscard]] std::vector<Window> windows(const std::string& model,
                                              const std::string& benchmark_model) const;
    [[nodiscard]] std::vector<Window> windows(const std::string& model,
                                              const Forecaster& benchmark) const;

private:
    std::shared_ptr<const Dataset> data_;
    std::vector<std::string> models_;
    std::vector<FrameRow> rows_;  // sorted by key
    std::size_t horizon_ = 0;
};

}  // namespace fceval::core
