#include "fceval/advisor.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "checklist_asset.hpp"
#include "fceval/error.hpp"
#include "fceval/measures.hpp"

namespace fceval::advisor {

using nlohmann::json;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Ok: return "ok";
        case Verdict::Caution: return "caution";
        case Verdict::Avoid: return "avoid";
    }
    return "ok";
}

const std::array<std::string, kColumns>& column_names() {
    static const std::array<std::string, kColumns> names = {
        "stationary_count", "seasonality",    "trend",          "unit_roots",    "heteroscedasticity",
        "break_horizon",    "break_training", "break_origin",   "intermittence", "outliers"};
    return names;
}

const std::string& column_topic(Column c) {
    static const std::array<std::string, kColumns> topics = {
        "Count Data Well above Zero with Stationarity",
        "Seasonality",
        "Trends",
        "Unit Roots",
        "Heteroscedasticity",
        "Structural Breaks (with Level Shifts)",
        "Structural Breaks (with Level Shifts)",
        "Structural Breaks (with Level Shifts)",
        "Intermittent Series",
        "Outliers"};
    return topics[static_cast<std::size_t>(c)];
}

std::vector<Column> CharacteristicProfile::active_columns() const {
    std::vector<Column> c{Column::StationaryCount};
    if (seasonality) c.push_back(Column::Seasonality);
    if (trend != Trend::None) c.push_back(Column::Trend);
    if (unit_roots) c.push_back(Column::UnitRoots);
    if (heteroscedasticity) c.push_back(Column::Heteroscedasticity);
    if (breaks.count(Break::InHorizon)) c.push_back(Column::BreakHorizon);
    if (breaks.count(Break::InTraining)) c.push_back(Column::BreakTraining);
    if (breaks.count(Break::AtOrigin)) c.push_back(Column::BreakOrigin);
    if (intermittency) c.push_back(Column::Intermittence);
    if (outliers) c.push_back(Column::Outliers);
    return c;
}

const RuleRow* RuleTable::row_for(const std::string& measure) const {
    for (const auto& r : rows)
        if (std::find(r.members.begin(), r.members.end(), measure) != r.members.end()) return &r;
    return nullptr;
}

namespace {

Verdict parse_verdict(const std::string& s, const std::string& where) {
    if (s == "ok") return Verdict::Ok;
    if (s == "caution") return Verdict::Caution;
    if (s == "avoid") return Verdict::Avoid;
    throw ConfigError("checklist " + where + ": unknown mark '" + s + "'");
}

std::array<Verdict, kColumns> parse_marks(const json& marks, const std::string& where) {
    if (!marks.is_array() || marks.size() != kColumns) {
        throw ConfigError("checklist " + where + ": expected " + std::to_string(kColumns) + " characteristic marks");
    }
    std::array<Verdict, kColumns> out{};
    for (std::size_t i = 0; i < kColumns; ++i) {
        if (!marks[i].is_string()) throw ConfigError("checklist " + where + ": marks must be strings");
        out[i] = parse_verdict(marks[i].get<std::string>(), where);
    }
    return out;
}

}  // namespace

RuleTable load_rule_table_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("checklist does not parse: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows"))
        throw ConfigError("checklist needs 'columns' and 'rows'");
    const auto& cols = doc["columns"];
    if (!cols.is_array() || cols.size() != kColumns) throw ConfigError("checklist column set is incomplete");
    for (std::size_t i = 0; i < kColumns; ++i) {
        if (cols[i] != column_names()[i]) {
            throw ConfigError("checklist column " + std::to_string(i + 1) + " should be '" + column_names()[i] +
                              "'");
        }
    }
    RuleTable t;
    t.version = doc.value("version", "");
    std::set<std::string> seen;
    for (const auto& r : doc["rows"]) {
        RuleRow row;
        row.row = r.at("row").get<std::string>();
        row.scaling = r.value("scaling", "");
        for (const auto& m : r.at("members")) {
            const auto name = m.get<std::string>();
            if (!measures::find_measure(name))
                throw ConfigError("checklist row '" + row.row + "': unknown measure '" + name + "'");
            if (!seen.insert(name).second)
                throw ConfigError("checklist: measure '" + name + "' appears in more than one row");
            row.members.push_back(name);
        }
        if (row.members.empty()) throw ConfigError("checklist row '" + row.row + "' names no measure");
        row.marks = parse_marks(r.at("marks"), "row '" + row.row + "'");
        t.rows.push_back(std::move(row));
    }
    if (doc.contains("unassigned_rows")) {
        for (const auto& r : doc["unassigned_rows"]) {
            parse_marks(r.at("marks"), "unassigned row");
            ++t.unassigned_rows;
        }
    }
    if (t.rows.empty()) throw ConfigError("checklist has no rows");
    return t;
}

RuleTable load_rule_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checklist file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return load_rule_table_text(os.str());
}

const std::string& builtin_rule_text() {
    static const std::string text(kChecklistJson);
    return text;
}

const RuleTable& builtin_rule_table() {
    static const RuleTable t = load_rule_table_text(builtin_rule_text());
    return t;
}

namespace {

Verdict effective(const CharacteristicProfile& p, const RuleRow& row, Column c) {
    Verdict v = row.marks[static_cast<std::size_t>(c)];
    if (c == Column::Outliers && p.outlier_preference == OutlierPreference::Capture) {
        if (v == Verdict::Ok)
            v = Verdict::Avoid;
        else if (v == Verdict::Avoid)
            v = Verdict::Ok;
    }
    return v;
}

}  // namespace

std::optional<Verdict> verdict_for(const CharacteristicProfile& p, const RuleRow& row) {
    Verdict worst = Verdict::Ok;
    for (auto c : p.active_columns()) worst = std::max(worst, effective(p, row, c));
    return worst;
}

Recommendation recommend_measures(const CharacteristicProfile& p, const RuleTable& table) {
    Recommendation rec;
    const auto active = p.active_columns();
    for (const auto& spec : measures::registry()) {
        const RuleRow* row = table.row_for(spec.name);
        Entry e{spec.name, {}};
        if (!row) {
            e.reasons.push_back("no checklist row covers " + spec.name + "; verdict unknown, check it by hand");
            rec.cautioned.push_back(std::move(e));
            continue;
        }
        Verdict worst = Verdict::Ok;
        for (auto c : active) {
            const Verdict v = effective(p, *row, c);
            worst = std::max(worst, v);
            if (v == Verdict::Ok) continue;
            std::string reason = "checklist " + row->row + " x " + column_names()[static_cast<std::size_t>(c)] +
                                 " = " + to_string(v) + " (topic: " + column_topic(c) + ")";
            if (c == Column::Outliers && p.outlier_preference == OutlierPreference::Capture)
                reason += "; polarity flipped to capture outliers";
            e.reasons.push_back(std::move(reason));
        }
        if (worst == Verdict::Ok) {
            rec.recommended.push_back(std::move(e));
        } else if (worst == Verdict::Caution) {
            rec.cautioned.push_back(std::move(e));
        } else {
            rec.contraindicated.push_back(std::move(e));
        }
    }
    if (p.outliers && p.outlier_preference == OutlierPreference::Capture)
        rec.notes.push_back("capturing outliers: squared errors with a mean operator keep extreme errors visible");
    if (p.scale_meaningful && !p.need_cross_series_comparability)
        rec.notes.push_back("scales are meaningful and comparisons stay on one scale: RMSE or MAE suffice");
    if (p.need_cross_series_comparability)
        rec.notes.push_back(
            "comparing across differently scaled series: use a scale-free measure or rank models per series on "
            "RMSE/MAE");
    if (p.need_benchmark_interpretability)
        rec.notes.push_back("benchmark interpretability: relative and scaled measures read 1 as benchmark level");
    return rec;
}

std::optional<ModelClass> parse_model_class(const std::string& text) {
    if (text == "pure-ar" || text == "pure-AR" || text == "ar") return ModelClass::PureAr;
    if (text == "stateful") return ModelClass::Stateful;
    if (text == "unknown") return ModelClass::Unknown;
    return std::nullopt;
}

PartitionAdvice recommend_partitioning(const std::vector<std::size_t>& lengths, ModelClass model,
                                       const std::optional<stats::TestResult>& residual_check,
                                       std::size_t long_threshold) {
    if (lengths.empty()) throw DomainError("partitioning advice needs at least one series length");
    for (auto n : lengths)
        if (n == 0) throw DomainError("series lengths must be positive");
    const std::size_t shortest = *std::min_element(lengths.begin(), lengths.end());
    PartitionAdvice a;
    if (shortest >= long_threshold) {
        a.scheme = "rolling-origin";
        a.window = "expanding";
        a.rationale = "enough data (shortest series " + std::to_string(shortest) + " >= " +
                      std::to_string(long_threshold) + "): out-of-sample rolling-origin evaluation (tsCV)";
        a.instructions.push_back("use a rolling-origin split; skip origins with a stride if refitting is costly");
        return a;
    }
    const std::string why_short = "short series (shortest " + std::to_string(shortest) + " < " +
                                  std::to_string(long_threshold) + ")";
    if (model != ModelClass::PureAr) {
        a.scheme = "rolling-origin";
        a.window = "expanding";
        a.rationale = why_short + " with a " + (model == ModelClass::Stateful ? "stateful" : "non-autoregressive") +
                      " model: k-fold would break the state sequence, use tsCV with an expanding window";
        a.instructions.push_back("use a rolling-origin split with an expanding window");
        return a;
    }
    a.instructions.push_back(
        "fit the model, run a Ljung-Box test on the out-of-sample residuals (lags ~ 10, df reduced by the AR order)");
    if (!residual_check) {
        a.scheme = "run-ljung-box";
        a.window = "none";
        a.rationale = why_short + " with a pure autoregressive model: k-fold CV is valid only without residual "
                                  "autocorrelation, so check the residuals first";
        a.instructions.push_back("no residual autocorrelation: k-fold CV on the embedded matrix");
        a.instructions.push_back("residual autocorrelation: improve the model before selecting with any scheme");
        return a;
    }
    if (!residual_check->reject) {
        a.scheme = "kfold";
        a.window = "none";
        a.rationale = why_short + ", pure autoregressive model, Ljung-Box p = " +
                      std::to_string(residual_check->p_value) +
                      " finds no residual autocorrelation: k-fold CV on the embedded matrix is appropriate";
        a.instructions.push_back("embed the series with the model order and run k-fold CV");
        return a;
    }
    a.scheme = "improve-model";
    a.window = "none";
    a.rationale = why_short + ", Ljung-Box p = " + std::to_string(residual_check->p_value) +
                  " rejects: the model is underfit and k-fold CV would underestimate its generalisation error";
    a.instructions.push_back("improve the model first (e.g. more lags), then re-run the residual check");
    return a;
}

bool intermittency_hint(const std::vector<double>& values, double threshold) {
    return measures::zero_fraction(values) > threshold;
}

std::string render_text(const Recommendation& rec) {
    std::ostringstream os;
    auto section = [&](const char* title, const std::vector<Entry>& list) {
        os << title << " (" << list.size() << ")\n";
        for (const auto& e : list) {
            os << "  " << e.measure << '\n';
            for (const auto& r : e.reasons) os << "      " << r << '\n';
        }
    };
    section("recommended", rec.recommended);
    section("cautioned", rec.cautioned);
    section("contraindicated", rec.contraindicated);
    if (!rec.notes.empty()) {
        os << "notes\n";
        for (const auto& n : rec.notes) os << "  " << n << '\n';
    }
    if (rec.partitioning) {
        os << "partitioning: " << rec.partitioning->scheme;
        if (rec.partitioning->window != "none") os << " (" << rec.partitioning->window << " window)";
        os << "\n  " << rec.partitioning->rationale << '\n';
        for (const auto& i : rec.partitioning->instructions) os << "  - " << i << '\n';
    }
    return os.str();
}

}  // namespace fceval::advisor
