#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fceval/stats.hpp"

namespace fceval::advisor {

enum class Verdict { Ok, Caution, Avoid };
[[nodiscard]] std::string to_string(Verdict v);

enum class Column {
    StationaryCount,
    Seasonality,
    Trend,
    UnitRoots,
    Heteroscedasticity,
    BreakHorizon,
    BreakTraining,
    BreakOrigin,
    Intermittence,
    Outliers,
};
inline constexpr std::size_t kColumns = 10;
[[nodiscard]] const std::array<std::string, kColumns>& column_names();
/// Guideline topic title backing each column's reasons.
[[nodiscard]] const std::string& column_topic(Column c);

enum class Trend { None, Linear, Exponential };
enum class Break { InHorizon, InTraining, AtOrigin };
enum class OutlierPreference { Robust, Capture };

struct CharacteristicProfile {
    bool seasonality = false;
    Trend trend = Trend::None;
    bool unit_roots = false;
    bool heteroscedasticity = false;
    std::set<Break> breaks;
    bool intermittency = false;
    bool outliers = false;
    OutlierPreference outlier_preference = OutlierPreference::Robust;
    bool need_cross_series_comparability = false;
    bool need_benchmark_interpretability = false;
    bool scale_meaningful = false;

    /// Columns whose verdicts apply. The stationary-count baseline is always on.
    [[nodiscard]] std::vector<Column> active_columns() const;
};

struct RuleRow {
    std::string row;                   // printed row label
    std::vector<std::string> members;  // registry measures the row covers
    std::string scaling;
    std::array<Verdict, kColumns> marks{};
};

struct RuleTable {
    std::string version;
    std::vector<RuleRow> rows;
    std::size_t unassigned_rows = 0;

    /// Row covering a registry measure, if any.
    [[nodiscard]] const RuleRow* row_for(const std::string& measure) const;
};

/// Parses and validates the checklist JSON; throws ConfigError on unknown
/// measures, missing columns or malformed marks.
RuleTable load_rule_table_text(const std::string& json_text);
RuleTable load_rule_table(const std::string& path);
/// The checklist compiled into the library.
const RuleTable& builtin_rule_table();
const std::string& builtin_rule_text();

struct Entry {
    std::string measure;
    std::vector<std::string> reasons;
};

struct PartitionAdvice {
    std::string scheme;  // rolling-origin | kfold | run-ljung-box | improve-model
    std::string window;  // expanding | rolling | none
    std::string rationale;
    std::vector<std::string> instructions;
};

struct Recommendation {
    std::vector<Entry> recommended;
    std::vector<Entry> cautioned;
    std::vector<Entry> contraindicated;
    std::vector<std::string> notes;
    std::optional<PartitionAdvice> partitioning;
};

Recommendation recommend_measures(const CharacteristicProfile& profile, const RuleTable& table);
/// Verdict of one measure under a profile, or nullopt when no row covers it.
std::optional<Verdict> verdict_for(const CharacteristicProfile& profile, const RuleRow& row);

enum class ModelClass { PureAr, Stateful, Unknown };
[[nodiscard]] std::optional<ModelClass> parse_model_class(const std::string& text);

inline constexpr std::size_t kLongSeriesThreshold = 200;

PartitionAdvice recommend_partitioning(const std::vector<std::size_t>& series_lengths, ModelClass model,
                                       const std::optional<stats::TestResult>& residual_check = std::nullopt,
                                       std::size_t long_threshold = kLongSeriesThreshold);

/// Heuristic: declares intermittency when more than `threshold` of values are zero.
bool intermittency_hint(const std::vector<double>& values, double threshold = 0.5);

std::string render_text(const Recommendation& rec);

}  // namespace fceval::advisor
