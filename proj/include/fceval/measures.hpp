#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fceval/core.hpp"

namespace fceval::measures {

/// Per-step base error. Every kind is already divided by whatever scale it
/// uses, so the term operator (signed/absolute/squared) acts on the final
/// quotient.
enum class BaseKind {
    Raw,             // e = y - yhat
    Percentage,      // 100 e / y
    Symmetric,       // 200 e / (|y| + |yhat|)
    ModSymmetric,    // 200 e / max(|y| + |yhat| + eps, threshold + eps)
    Arctan,          // atan |e / y|
    Relative,        // e / e_b (benchmark error at the same step)
    Scaled,          // e / in-sample naive MAE
    ScaledSquared,   // e / sqrt(in-sample naive MSE); squared gives q-dagger
    Log,             // ln((y + 1) / (yhat + 1))
    Rate,            // yhat - mean(y_1..y_t)
    InSample,        // e / mean(train)
    WindowAbs,       // e / mean_window |y|
    WindowSym,       // e / mean_window (|y| + |yhat|)
    WindowClamped,   // e / max(C, mean_window |y|)
    WindowRootAbs,   // e / sqrt(mean_window |y|)
    PooledAbs,       // e / pooled mean |y| over the whole frame
    PooledDeviation, // e / pooled rms(y - mean y) over the whole frame
    RelativeMae,     // e / MAE of the benchmark on the same window
    RelativeRmse,    // e / RMSE of the benchmark on the same window
    Correlation,     // per-window Pearson correlation of y and yhat
};

enum class TermOp { Signed, Absolute, Squared };
enum class Order { Pooled, HorizonThenSeries, SeriesThenHorizon };
enum class Summariser { Mean, Median, GeometricMean };
enum class Root { None, PerSeries, Final };
enum class UndefinedPolicy { Propagate, SkipAndCount, Error };

/// How the in-sample denominator of the scaled kinds is formed.
enum class ScaleMode {
    Lag1,       // one-step naive differences
    Seasonal,   // lag-m differences, m from the series period
    MultiStep,  // step k scaled by the in-sample k-step naive error
};

enum class WeightAxis { Step, Series };

struct WeightVector {
    WeightAxis axis = WeightAxis::Step;
    std::vector<double> weights;
};

struct Constants {
    double epsilon = 0.1;    // msMAPE
    double threshold = 0.5;  // msMAPE
    double clamp = 1.0;      // RTAE regularisation C
    double margin = 1.0;     // critical-event margin X
};

struct MeasureSpec {
    std::string name;
    BaseKind base = BaseKind::Raw;
    TermOp op = TermOp::Absolute;
    Order order = Order::Pooled;
    Summariser summariser_horizon = Summariser::Mean;
    Summariser summariser_series = Summariser::Mean;
    Root root = Root::None;
    ScaleMode scale_mode = ScaleMode::Lag1;
    std::optional<WeightVector> weights;
    /// Series axis weighted by each window's horizon length.
    bool horizon_weighted_series = false;
    /// Measure is defined with user weights (uniform when none supplied).
    bool weighted = false;
    UndefinedPolicy policy = UndefinedPolicy::Propagate;
    Constants constants;
    /// Registry name with an identical formula (ErrorStd is RMSE under the
    /// zero-mean convention).
    std::optional<std::string> alias_of;
    bool needs_benchmark = false;
};

struct MeasureResult {
    std::string name;
    std::optional<double> value;
    std::size_t n_used = 0;
    std::size_t n_undefined = 0;
    std::vector<std::pair<std::string, std::optional<double>>> per_series;
    std::set<std::string> flags;
};

// Registry -------------------------------------------------------------------

[[nodiscard]] const std::vector<MeasureSpec>& registry();
[[nodiscard]] std::optional<MeasureSpec> find_measure(const std::string& name);
/// Throws ConfigError for an unknown name.
[[nodiscard]] MeasureSpec measure_spec(const std::string& name);

[[nodiscard]] std::string to_string(UndefinedPolicy p);
[[nodiscard]] std::optional<UndefinedPolicy> parse_policy(const std::string& text);
[[nodiscard]] std::optional<ScaleMode> parse_scale_mode(const std::string& text);
[[nodiscard]] std::string to_string(ScaleMode m);

// Evaluation -----------------------------------------------------------------

/// Evaluates one measure over forecast windows. Windows must carry a
/// benchmark when the measure needs one and train values for in-sample kinds.
[[nodiscard]] MeasureResult evaluate(const MeasureSpec& spec, std::span<const core::Window> windows);

/// Family entry points. Each rejects names outside its family.
MeasureResult scale_dependent_measures(std::span<const core::Window> w, const std::string& name,
                                       UndefinedPolicy policy = UndefinedPolicy::Propagate);
MeasureResult percentage_measures(std::span<const core::Window> w, const std::string& name,
                                  UndefinedPolicy policy = UndefinedPolicy::Propagate,
                                  const Constants& constants = {});
MeasureResult aggregate_scaling_measures(std::span<const core::Window> w, const std::string& name,
                                         UndefinedPolicy policy = UndefinedPolicy::Propagate,
                                         const Constants& constants = {});
MeasureResult relative_error_measures(std::span<const core::Window> w, const std::string& name,
                                      UndefinedPolicy policy = UndefinedPolicy::Propagate);
MeasureResult relative_measures(std::span<const core::Window> w, const std::string& name,
                                UndefinedPolicy policy = UndefinedPolicy::Propagate);
MeasureResult scaled_measures(std::span<const core::Window> w, const std::string& name,
                              ScaleMode mode = ScaleMode::Lag1,
                              UndefinedPolicy policy = UndefinedPolicy::Propagate);
MeasureResult transform_measures(std::span<const core::Window> w, const std::string& name,
                                 const std::optional<WeightVector>& weights = std::nullopt,
                                 UndefinedPolicy policy = UndefinedPolicy::Propagate);
MeasureResult other_measures(std::span<const core::Window> w, const std::string& name,
                             const std::optional<WeightVector>& weights = std::nullopt,
                             UndefinedPolicy policy = UndefinedPolicy::Propagate);

[[nodiscard]] std::vector<std::string> family_members(const std::string& family);

// Aggregation ----------------------------------------------------------------

/// values[i][k] is the term of series i at step k; rows may differ in length.
double summarize(const std::vector<std::vector<double>>& values, Order order, Summariser op_h,
                 Summariser op_s, const std::optional<WeightVector>& weights = std::nullopt);

double apply_summariser(Summariser op, std::span<const double> values,
                        std::span<const double> weights = {});

// Rankings and counts --------------------------------------------------------

struct RankTable {
    std::vector<std::string> models;
    std::vector<std::string> items;             // series (or window) labels
    std::vector<std::vector<double>> ranks;     // ranks[item][model]
    std::vector<double> mean_ranks;             // per model
};

/// scores: model -> per-item values, all of equal length. Rank 1 is the
/// smallest score unless ascending is false.
RankTable rank_models(const std::map<std::string, std::vector<double>>& scores, bool ascending = true,
                      const std::vector<std::string>& items = {});

/// Average ranks of one sample, ties receiving the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct RankCountResult {
    double pb = 0.0;        // % of items where the model beats the benchmark
    double critical = 0.0;  // % of items whose value exceeds the margin
    std::map<std::string, double> mean_ranks;
};

RankCountResult rank_count_measures(const std::map<std::string, std::vector<double>>& per_series,
                                    const std::string& model,
                                    std::span<const double> benchmark_values, double margin);

double probability_better(std::span<const double> model, std::span<const double> benchmark);
double critical_event_percentage(std::span<const double> values, double margin);

/// Fraction of zero values; a heuristic intermittency hint.
double zero_fraction(std::span<const double> values);

}  // namespace fceval::measures
