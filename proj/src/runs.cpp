#include "fceval/runs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fceval/advisor.hpp"
#include "fceval/arfit.hpp"
#include "fceval/core.hpp"
#include "fceval/error.hpp"
#include "fceval/io.hpp"
#include "fceval/partition.hpp"
#include "fceval/pitfalls.hpp"
#include "fceval/random.hpp"
#include "fceval/stats.hpp"
#include "fceval/synth.hpp"
#include "io_format.hpp"

#ifndef FCEVAL_VERSION
#define FCEVAL_VERSION "0.0.0"
#endif

namespace fceval::runs {

namespace {

using json = nlohmann::ordered_json;

json parse_object(const std::string& text, const std::string& what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
    return j;
}

void check_keys(const json& o, std::initializer_list<const char*> allowed, const std::string& what) {
    for (auto it = o.begin(); it != o.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!known) throw ConfigError(what + ": unknown key '" + it.key() + "'");
    }
}

double get_double(const json& o, const char* key, double fallback, const std::string& what) {
    if (!o.contains(key)) return fallback;
    if (!o[key].is_number()) throw ConfigError(what + ": '" + key + "' must be a number");
    return o[key].get<double>();
}

std::size_t get_size(const json& o, const char* key, std::size_t fallback, const std::string& what) {
    if (!o.contains(key)) return fallback;
    const auto& v = o[key];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ConfigError(what + ": '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

bool get_bool(const json& o, const char* key, bool fallback, const std::string& what) {
    if (!o.contains(key)) return fallback;
    if (!o[key].is_boolean()) throw ConfigError(what + ": '" + key + "' must be true or false");
    return o[key].get<bool>();
}

std::string get_string(const json& o, const char* key, const std::string& fallback, const std::string& what) {
    if (!o.contains(key)) return fallback;
    if (!o[key].is_string()) throw ConfigError(what + ": '" + key + "' must be a string");
    return o[key].get<std::string>();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

std::string csv_value(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string{}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json test_result_json(const stats::TestResult& t) {
    json j;
    j["test"] = t.test;
    j["statistic"] = number(t.statistic);
    j["p_value"] = number(t.p_value);
    j["alpha"] = t.alpha;
    j["reject"] = t.reject;
    j["tie"] = t.tie;
    json d = json::object();
    for (const auto& [k, v] : t.details) d[k] = number(v);
    j["details"] = d;
    j["notes"] = t.notes;
    return j;
}

// evaluate --------------------------------------------------------------------

std::optional<measures::Order> parse_order(const std::string& s) {
    if (s == "pooled") return measures::Order::Pooled;
    if (s == "horizon-then-series") return measures::Order::HorizonThenSeries;
    if (s == "series-then-horizon") return measures::Order::SeriesThenHorizon;
    return std::nullopt;
}

std::string to_string(measures::Order o) {
    switch (o) {
        case measures::Order::Pooled: return "pooled";
        case measures::Order::HorizonThenSeries: return "horizon-then-series";
        case measures::Order::SeriesThenHorizon: return "series-then-horizon";
    }
    return "pooled";
}

measures::Constants parse_constants(const json& o, measures::Constants base, const std::string& what) {
    if (!o.is_object()) throw ConfigError(what + ": 'constants' must be an object");
    check_keys(o, {"epsilon", "threshold", "clamp", "margin"}, what + " constants");
    base.epsilon = get_double(o, "epsilon", base.epsilon, what);
    base.threshold = get_double(o, "threshold", base.threshold, what);
    base.clamp = get_double(o, "clamp", base.clamp, what);
    base.margin = get_double(o, "margin", base.margin, what);
    return base;
}

json constants_json(const measures::Constants& c) {
    return json{{"epsilon", c.epsilon}, {"threshold", c.threshold}, {"clamp", c.clamp}, {"margin", c.margin}};
}

measures::MeasureSpec parse_measure(const json& item, measures::UndefinedPolicy policy,
                                    const measures::Constants& constants) {
    if (item.is_string()) {
        auto spec = measures::measure_spec(item.get<std::string>());
        spec.policy = policy;
        spec.constants = constants;
        return spec;
    }
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string())
        throw ConfigError("suite: each measure is a name or an object with a 'name'");
    const std::string name = item["name"].get<std::string>();
    const std::string what = "suite measure " + name;
    check_keys(item, {"name", "policy", "constants", "order", "scale_mode", "weights"}, what);
    auto spec = measures::measure_spec(name);
    spec.policy = policy;
    if (item.contains("policy")) {
        auto p = measures::parse_policy(get_string(item, "policy", "", what));
        if (!p) throw ConfigError(what + ": unknown policy");
        spec.policy = *p;
    }
    spec.constants = item.contains("constants") ? parse_constants(item["constants"], constants, what) : constants;
    if (item.contains("order")) {
        auto o = parse_order(get_string(item, "order", "", what));
        if (!o) throw ConfigError(what + ": order must be pooled, horizon-then-series or series-then-horizon");
        spec.order = *o;
    }
    if (item.contains("scale_mode")) {
        auto m = measures::parse_scale_mode(get_string(item, "scale_mode", "", what));
        if (!m) throw ConfigError(what + ": scale_mode must be lag1, seasonal or multistep");
        spec.scale_mode = *m;
    }
    if (item.contains("weights")) {
        const auto& w = item["weights"];
        if (!w.is_object()) throw ConfigError(what + ": 'weights' must be an object");
        check_keys(w, {"axis", "values"}, what + " weights");
        measures::WeightVector wv;
        const std::string axis = get_string(w, "axis", "step", what);
        if (axis == "step") {
            wv.axis = measures::WeightAxis::Step;
        } else if (axis == "series") {
            wv.axis = measures::WeightAxis::Series;
        } else {
            throw ConfigError(what + ": weight axis must be step or series");
        }
        if (!w.contains("values") || !w["values"].is_array()) throw ConfigError(what + ": weights need 'values'");
        for (const auto& v : w["values"]) {
            if (!v.is_number()) throw ConfigError(what + ": weights must be numbers");
            wv.weights.push_back(v.get<double>());
        }
        spec.weights = wv;
    }
    return spec;
}

}  // namespace

std::string version() { return FCEVAL_VERSION; }

RunOutput evaluate(const std::string& series_csv, const std::string& forecasts_csv, const std::string& suite_json,
                   std::optional<measures::UndefinedPolicy> policy_override) {
    const json suite = parse_object(suite_json, "suite");
    check_keys(suite, {"measures", "policy", "constants", "benchmark", "models"}, "suite");
    auto policy = measures::UndefinedPolicy::Propagate;
    if (suite.contains("policy")) {
        auto p = measures::parse_policy(get_string(suite, "policy", "", "suite"));
        if (!p) throw ConfigError("suite: policy must be propagate, skip or error");
        policy = *p;
    }
    if (policy_override) policy = *policy_override;
    const measures::Constants constants =
        suite.contains("constants") ? parse_constants(suite["constants"], {}, "suite") : measures::Constants{};
    if (!suite.contains("measures") || !suite["measures"].is_array() || suite["measures"].empty())
        throw ConfigError("suite: 'measures' must be a non-empty array");
    std::vector<measures::MeasureSpec> specs;
    for (const auto& item : suite["measures"]) {
        specs.push_back(parse_measure(item, policy, constants));
        // A global override beats per-measure settings too.
        if (policy_override) specs.back().policy = *policy_override;
    }

    std::optional<std::string> bench_model;
    core::Forecaster bench = core::Forecaster::naive();
    json bench_echo = {{"forecaster", "naive"}};
    if (suite.contains("benchmark")) {
        const auto& b = suite["benchmark"];
        if (!b.is_object()) throw ConfigError("suite: 'benchmark' must be an object");
        check_keys(b, {"model", "forecaster", "period"}, "suite benchmark");
        if (b.contains("model")) {
            bench_model = get_string(b, "model", "", "suite benchmark");
            bench_echo = {{"model", *bench_model}};
        } else {
            const std::string kind = get_string(b, "forecaster", "naive", "suite benchmark");
            const auto k = core::parse_forecaster_kind(kind);
            if (!k || *k == core::ForecasterKind::External)
                throw ConfigError("suite benchmark: forecaster must be naive, seasonal-naive or mean");
            bench.kind = *k;
            if (b.contains("period")) bench.period = get_size(b, "period", 0, "suite benchmark");
            bench_echo = {{"forecaster", kind}};
            if (bench.period) bench_echo["period"] = *bench.period;
        }
    }

    auto data = std::make_shared<const core::Dataset>(io::parse_series_csv(series_csv, "series.csv"));
    const auto records = io::parse_forecast_csv(forecasts_csv, "forecasts.csv");
    const auto frame = core::EvaluationFrame::build(data, records);
    if (bench_model && !frame.model_index(*bench_model))
        throw ConfigError("suite benchmark model '" + *bench_model + "' is not in the forecasts");

    std::vector<std::string> models(frame.models().begin(), frame.models().end());
    if (suite.contains("models")) {
        if (!suite["models"].is_array()) throw ConfigError("suite: 'models' must be an array of names");
        models.clear();
        for (const auto& m : suite["models"]) {
            if (!m.is_string()) throw ConfigError("suite: 'models' must be an array of names");
            if (!frame.model_index(m.get<std::string>()))
                throw ConfigError("suite: model '" + m.get<std::string>() + "' is not in the forecasts");
            models.push_back(m.get<std::string>());
        }
    }

    const bool any_benchmark = std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.needs_benchmark; });
    json results = json::array();
    json undefined = json::array();
    std::ostringstream matrix;
    matrix << "series_id,measure,model,value\n";
    for (const auto& model : models) {
        const auto plain = frame.windows(model);
        std::vector<core::Window> with_bench;
        if (any_benchmark) with_bench = bench_model ? frame.windows(model, *bench_model) : frame.windows(model, bench);
        for (const auto& spec : specs) {
            const auto r = measures::evaluate(spec, spec.needs_benchmark ? with_bench : plain);
            json row;
            row["model"] = model;
            row["measure"] = spec.name;
            row["value"] = number(r.value);
            row["n_used"] = r.n_used;
            row["n_undefined"] = r.n_undefined;
            row["flags"] = std::vector<std::string>(r.flags.begin(), r.flags.end());
            row["policy"] = measures::to_string(spec.policy);
            row["order"] = to_string(spec.order);
            row["constants"] = constants_json(spec.constants);
            if (spec.base == measures::BaseKind::Scaled || spec.base == measures::BaseKind::ScaledSquared)
                row["scale_mode"] = measures::to_string(spec.scale_mode);
            json per = json::array();
            for (const auto& [label, v] : r.per_series) {
                per.push_back({{"series", label}, {"value", number(v)}});
                matrix << label << ',' << spec.name << ',' << model << ',' << csv_value(v) << '\n';
            }
            row["per_series"] = per;
            if (r.n_undefined > 0)
                undefined.push_back({{"model", model}, {"measure", spec.name}, {"n_undefined", r.n_undefined}});
            results.push_back(row);
        }
    }
    json report;
    report["command"] = "evaluate";
    report["version"] = version();
    report["policy"] = measures::to_string(policy);
    report["benchmark"] = bench_echo;
    report["models"] = models;
    report["series"] = data->size();
    report["horizon"] = frame.horizon();
    report["results"] = results;
    report["undefined"] = undefined;
    RunOutput out;
    out.report = dump(report);
    out.artifacts.push_back({"report.json", out.report});
    out.artifacts.push_back({"matrix.csv", matrix.str()});
    return out;
}

// backtest ----------------------------------------------------------------------

namespace {

partition::SplitSpec parse_split(const json& j, std::uint64_t seed) {
    const std::string what = "split";
    partition::SplitSpec s;
    const auto scheme = partition::parse_scheme(get_string(j, "scheme", "rolling-origin", what));
    if (!scheme) throw ConfigError("split: scheme must be fixed-origin, rolling-origin, kfold, blocked or custom");
    s.scheme = *scheme;
    s.initial_train = get_size(j, "initial_train", 0, what);
    s.horizon = get_size(j, "horizon", 1, what);
    s.stride = get_size(j, "stride", 1, what);
    const std::string window = get_string(j, "window", "expanding", what);
    if (window == "expanding") {
        s.window = partition::WindowKind::Expanding;
    } else if (window == "rolling") {
        s.window = partition::WindowKind::Rolling;
    } else {
        throw ConfigError("split: window must be expanding or rolling");
    }
    if (j.contains("window_length")) s.window_length = get_size(j, "window_length", 0, what);
    s.k = get_size(j, "k", 5, what);
    s.shuffle_seed = j.contains("shuffle_seed") ? get_size(j, "shuffle_seed", 0, what) : seed;
    s.gap = get_size(j, "gap", 0, what);
    if (j.contains("order")) s.order = get_size(j, "order", 0, what);
    s.validate();
    return s;
}

std::vector<partition::Fold> parse_custom_folds(const json& j) {
    if (!j.contains("folds") || !j["folds"].is_array() || j["folds"].empty())
        throw ConfigError("split: custom scheme needs a non-empty 'folds' array");
    std::vector<partition::Fold> folds;
    for (const auto& f : j["folds"]) {
        if (!f.is_object()) throw ConfigError("split: each fold is an object with 'train' and 'test'");
        check_keys(f, {"train", "test"}, "split fold");
        partition::Fold fold;
        for (const char* role : {"train", "test"}) {
            if (!f.contains(role) || !f[role].is_array()) throw ConfigError(std::string("split fold: missing '") + role + "'");
            auto& dst = std::string(role) == "train" ? fold.train : fold.test;
            for (const auto& v : f[role]) {
                if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                    throw ConfigError("split fold: indices must be non-negative integers");
                dst.push_back(v.get<std::size_t>());
            }
        }
        if (!fold.train.empty()) fold.origin = *std::max_element(fold.train.begin(), fold.train.end()) + 1;
        folds.push_back(std::move(fold));
    }
    return folds;
}

bool contiguous_after(const partition::Fold& f) {
    if (!f.origin || f.test.empty()) return false;
    for (std::size_t i = 0; i < f.test.size(); ++i)
        if (f.test[i] != *f.origin + i) return false;
    return true;
}

double rmse(const std::vector<double>& e) {
    double s = 0.0;
    for (double v : e) s += v * v;
    return std::sqrt(s / static_cast<double>(e.size()));
}

}  // namespace

RunOutput backtest(const std::string& series_csv, const std::string& split_json,
                   const std::vector<std::string>& benchmarks, std::uint64_t seed) {
    const json j = parse_object(split_json, "split");
    check_keys(j,
               {"scheme", "initial_train", "horizon", "stride", "window", "window_length", "k", "shuffle_seed", "gap",
                "order", "folds", "temporal", "period"},
               "split");
    const bool custom = get_string(j, "scheme", "", "split") == "custom";
    partition::SplitSpec spec;
    bool temporal = true;
    if (custom) {
        temporal = get_bool(j, "temporal", true, "split");
    } else {
        spec = parse_split(j, seed);
        temporal = partition::is_temporal(spec.scheme);
    }
    std::vector<core::Forecaster> forecasters;
    for (const auto& b : benchmarks.empty() ? std::vector<std::string>{"naive"} : benchmarks) {
        const auto k = core::parse_forecaster_kind(b);
        if (!k || *k == core::ForecasterKind::External)
            throw ConfigError("benchmark '" + b + "' must be naive, seasonal-naive or mean");
        core::Forecaster f{*k, std::nullopt};
        if (j.contains("period")) f.period = get_size(j, "period", 0, "split");
        forecasters.push_back(f);
    }

    const auto data = io::parse_series_csv(series_csv, "series.csv");
    json fold_reports = json::array();
    json violations = json::array();
    std::ostringstream csv;
    csv << "series_id,fold_id,role,index\n";
    std::map<std::string, std::map<std::string, std::vector<double>>> score_sums;  // bench -> measure -> values
    std::vector<double> cv_rmse;
    bool passed = true;

    for (const auto& series : data.series()) {
        std::vector<partition::Fold> folds = custom ? parse_custom_folds(j) : partition::make_splits(series, spec);
        const auto y = series.values();
        std::optional<core::EmbeddedMatrix> embedded;
        if (!custom && !temporal) embedded = core::embed(series, *spec.order);
        const std::size_t limit = embedded ? embedded->rows() : series.size();
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const auto& fold = folds[f];
            for (auto idx : fold.train)
                if (idx >= limit) throw ConfigError("split fold " + std::to_string(f + 1) + ": index out of range");
            for (auto idx : fold.test)
                if (idx >= limit) throw ConfigError("split fold " + std::to_string(f + 1) + ": index out of range");
            const auto leak = partition::leakage_check(fold, temporal);
            json fr;
            fr["series"] = series.id();
            fr["fold"] = f + 1;
            if (fold.origin) fr["origin"] = *fold.origin;
            fr["train_size"] = fold.train.size();
            fr["test_size"] = fold.test.size();
            fr["leakage_ok"] = leak.passed;
            if (!leak.passed) {
                passed = false;
                for (const auto& v : leak.violations)
                    violations.push_back({{"series", series.id()}, {"fold", f + 1}, {"violation", v}});
            }
            json scores = json::object();
            if (leak.passed && temporal && contiguous_after(fold)) {
                std::vector<double> train_values;
                for (auto idx : fold.train) train_values.push_back(y[idx]);
                const auto sub = core::TimeSeries::from_values(series.id(), train_values, series.frequency());
                for (const auto& fc : forecasters) {
                    try {
                        const auto pred = fc.forecast(sub, sub.size(), fold.test.size());
                        std::vector<double> e;
                        for (std::size_t k = 0; k < fold.test.size(); ++k) e.push_back(y[fold.test[k]] - pred[k]);
                        double mae = 0.0;
                        for (double v : e) mae += std::abs(v);
                        mae /= static_cast<double>(e.size());
                        scores[fc.name()] = {{"MAE", mae}, {"RMSE", rmse(e)}};
                        score_sums[fc.name()]["MAE"].push_back(mae);
                        score_sums[fc.name()]["RMSE"].push_back(rmse(e));
                    } catch (const InsufficientDataError& ex) {
                        scores[fc.name()] = {{"error", ex.what()}};
                    }
                }
            } else if (leak.passed && embedded) {
                const auto model = arfit::fit(*embedded, fold.train, true);
                std::vector<double> e;
                for (auto row : fold.test) e.push_back(embedded->target(row) - arfit::predict(model, embedded->predictors(row)));
                const double r = rmse(e);
                scores["ar" + std::to_string(*spec.order)] = {{"RMSE", r}};
                cv_rmse.push_back(r);
            }
            fr["scores"] = scores;
            fold_reports.push_back(fr);
        }
        // Fold CSV rows carry the series in front of the partition format.
        std::istringstream lines(partition::folds_to_csv(folds));
        std::string line;
        std::getline(lines, line);
        while (std::getline(lines, line)) csv << series.id() << ',' << line << '\n';
    }

    json summary = json::object();
    for (const auto& [bench, by_measure] : score_sums) {
        json m = json::object();
        for (const auto& [name, values] : by_measure) {
            double s = 0.0;
            for (double v : values) s += v;
            m[name] = s / static_cast<double>(values.size());
        }
        summary[bench] = m;
    }
    if (!cv_rmse.empty()) {
        double s = 0.0;
        for (double v : cv_rmse) s += v;
        summary["cv_rmse"] = s / static_cast<double>(cv_rmse.size());
    }
    json report;
    report["command"] = "backtest";
    report["version"] = version();
    report["scheme"] = custom ? std::string("custom") : partition::to_string(spec.scheme);
    report["temporal"] = temporal;
    report["seed"] = seed;
    report["passed"] = passed;
    report["leakage_violations"] = violations;
    report["folds"] = fold_reports;
    report["summary"] = summary;
    RunOutput out;
    out.passed = passed;
    out.report = dump(report);
    out.artifacts.push_back({"report.json", out.report});
    // A leaking split is reported but never exported.
    if (passed) out.artifacts.push_back({"folds.csv", csv.str()});
    return out;
}

// compare -----------------------------------------------------------------------

namespace {

json posthoc_json(const stats::PostHocResult& r) {
    json j;
    j["method"] = r.method;
    j["alpha"] = r.alpha;
    j["models"] = r.models;
    if (!r.mean_ranks.empty()) j["mean_ranks"] = r.mean_ranks;
    j["critical_distance"] = number(r.critical_distance);
    json pairs = json::array();
    for (const auto& p : r.pairwise) {
        json q{{"a", p.a}, {"b", p.b}, {"significant", p.significant}};
        if (!r.mean_ranks.empty()) q["rank_difference"] = p.rank_difference;
        if (p.p_raw) q["p_raw"] = number(p.p_raw);
        if (p.p_adjusted) q["p_adjusted"] = number(p.p_adjusted);
        pairs.push_back(q);
    }
    j["pairwise"] = pairs;
    j["groups"] = r.groups;
    j["significant_pairs"] = std::count_if(r.pairwise.begin(), r.pairwise.end(), [](const auto& p) { return p.significant; });
    j["warnings"] = r.warnings;
    return j;
}

}  // namespace

RunOutput compare(const std::vector<std::string>& report_jsons, const std::string& test_json,
                  std::optional<double> alpha_override) {
    const json t = parse_object(test_json, "test config");
    check_keys(t, {"measure", "alpha", "pairwise", "adjust", "dm_horizon", "harvey", "higher_is_better"}, "test config");
    std::string measure = get_string(t, "measure", "", "test config");
    const double alpha = alpha_override ? *alpha_override : get_double(t, "alpha", 0.05, "test config");
    const std::string pairwise = get_string(t, "pairwise", "wilcoxon", "test config");
    if (pairwise != "wilcoxon" && pairwise != "dm" && pairwise != "none")
        throw ConfigError("test config: pairwise must be wilcoxon, dm or none");
    const auto adjust = stats::parse_adjust(get_string(t, "adjust", "holm", "test config"));
    if (!adjust) throw ConfigError("test config: adjust must be holm, hochberg or bonferroni-dunn");
    const std::size_t dm_h = get_size(t, "dm_horizon", 1, "test config");
    const bool harvey = get_bool(t, "harvey", false, "test config");

    // model -> series label -> value
    std::map<std::string, std::map<std::string, std::optional<double>>> values;
    for (std::size_t i = 0; i < report_jsons.size(); ++i) {
        const json r = parse_object(report_jsons[i], "report " + std::to_string(i + 1));
        if (!r.contains("results") || !r["results"].is_array())
            throw ConfigError("report " + std::to_string(i + 1) + ": not an evaluate report");
        for (const auto& row : r["results"]) {
            const std::string name = row.at("measure").get<std::string>();
            if (measure.empty()) measure = name;
            if (name != measure) continue;
            const std::string model = row.at("model").get<std::string>();
            if (values.count(model)) throw ConfigError("model '" + model + "' appears in more than one report");
            auto& per = values[model];
            for (const auto& p : row.at("per_series")) {
                const auto& v = p.at("value");
                per[p.at("series").get<std::string>()] = v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt;
            }
        }
    }
    if (measure.empty()) throw ConfigError("compare: no measure found in the reports");
    if (values.size() < 2)
        throw ConfigError("compare needs at least 2 models with measure " + measure + ", got " +
                          std::to_string(values.size()));
    const bool higher_better = get_bool(t, "higher_is_better", measure == "CORR", "test config");

    std::vector<std::string> items;
    std::vector<std::string> warnings;
    for (const auto& [label, v] : values.begin()->second) {
        bool ok = true;
        for (const auto& [model, per] : values) {
            auto it = per.find(label);
            if (it == per.end() || !it->second) ok = false;
        }
        if (ok) {
            items.push_back(label);
        } else {
            warnings.push_back("series " + label + " dropped: not defined for every model");
        }
    }
    if (items.size() < 2) throw InsufficientDataError("compare needs at least 2 series defined for every model");
    std::map<std::string, std::vector<double>> scores;
    for (const auto& [model, per] : values)
        for (const auto& label : items) scores[model].push_back(*per.at(label));

    const auto table = measures::rank_models(scores, !higher_better, items);
    const auto fr = stats::friedman(table, alpha);
    const auto nem = stats::nemenyi_cd(table, alpha, fr.reject);

    json tests;
    tests["command"] = "compare";
    tests["version"] = version();
    tests["measure"] = measure;
    tests["alpha"] = alpha;
    tests["higher_is_better"] = higher_better;
    tests["n_series"] = items.size();
    tests["models"] = table.models;
    tests["mean_ranks"] = table.mean_ranks;
    tests["friedman"] = test_result_json(fr);
    tests["nemenyi"] = posthoc_json(nem);
    if (pairwise != "none") {
        std::map<std::pair<std::string, std::string>, double> p;
        json raw = json::array();
        for (std::size_t a = 0; a < table.models.size(); ++a) {
            for (std::size_t b = a + 1; b < table.models.size(); ++b) {
                const auto& xa = scores.at(table.models[a]);
                const auto& xb = scores.at(table.models[b]);
                const auto r = pairwise == "dm" ? stats::diebold_mariano(xa, xb, dm_h, harvey, alpha)
                                                : stats::wilcoxon_signed_rank(xa, xb, alpha);
                p[{table.models[a], table.models[b]}] = r.p_value;
                json entry = test_result_json(r);
                entry["a"] = table.models[a];
                entry["b"] = table.models[b];
                raw.push_back(entry);
            }
        }
        tests["pairwise_tests"] = raw;
        tests["pairwise_adjusted"] = posthoc_json(stats::p_adjust(p, *adjust, alpha));
    }
    tests["warnings"] = warnings;

    const auto layout = stats::cd_diagram_data(nem);
    RunOutput out;
    out.report = dump(tests);
    out.artifacts.push_back({"tests.json", out.report});
    out.artifacts.push_back({"cd.svg", stats::render_cd_svg(layout)});
    out.artifacts.push_back({"cd.txt", stats::render_cd_text(layout)});
    std::ostringstream ranks;
    ranks << "series";
    for (const auto& m : table.models) ranks << ',' << m;
    ranks << '\n';
    for (std::size_t i = 0; i < table.items.size(); ++i) {
        ranks << table.items[i];
        for (double r : table.ranks[i]) ranks << ',' << io::format_double(r);
        ranks << '\n';
    }
    out.artifacts.push_back({"ranks.csv", ranks.str()});
    return out;
}

// advise ------------------------------------------------------------------------

namespace {

json entries_json(const std::vector<advisor::Entry>& list) {
    json a = json::array();
    for (const auto& e : list) a.push_back({{"measure", e.measure}, {"reasons", e.reasons}});
    return a;
}

void add_break(advisor::CharacteristicProfile& p, const std::string& b) {
    if (b == "none") return;
    if (b == "in_horizon" || b == "in-horizon") {
        p.breaks.insert(advisor::Break::InHorizon);
    } else if (b == "in_training" || b == "in-training") {
        p.breaks.insert(advisor::Break::InTraining);
    } else if (b == "at_origin" || b == "at-origin") {
        p.breaks.insert(advisor::Break::AtOrigin);
    } else {
        throw ConfigError("profile: structural_break must be none, in_horizon, in_training or at_origin");
    }
}

}  // namespace

RunOutput advise(const std::string& profile_json) {
    const json j = parse_object(profile_json, "profile");
    const std::string what = "profile";
    check_keys(j,
               {"stationary_count_data", "seasonality", "trend", "unit_roots", "heteroscedasticity", "structural_break",
                "intermittency", "outliers", "outlier_preference", "capture_outliers", "robust_to_outliers",
                "need_cross_series_comparability", "need_benchmark_interpretability", "scale_meaningful",
                "partitioning"},
               what);
    advisor::CharacteristicProfile p;
    get_bool(j, "stationary_count_data", true, what);  // the baseline column is always active
    p.seasonality = get_bool(j, "seasonality", false, what);
    const std::string trend = get_string(j, "trend", "none", what);
    if (trend == "none") {
        p.trend = advisor::Trend::None;
    } else if (trend == "linear") {
        p.trend = advisor::Trend::Linear;
    } else if (trend == "exponential") {
        p.trend = advisor::Trend::Exponential;
    } else {
        throw ConfigError("profile: trend must be none, linear or exponential");
    }
    p.unit_roots = get_bool(j, "unit_roots", false, what);
    p.heteroscedasticity = get_bool(j, "heteroscedasticity", false, what);
    if (j.contains("structural_break")) {
        const auto& b = j["structural_break"];
        if (b.is_string()) {
            add_break(p, b.get<std::string>());
        } else if (b.is_array()) {
            for (const auto& x : b) {
                if (!x.is_string()) throw ConfigError("profile: structural_break entries must be strings");
                add_break(p, x.get<std::string>());
            }
        } else {
            throw ConfigError("profile: structural_break must be a string or an array of strings");
        }
    }
    p.intermittency = get_bool(j, "intermittency", false, what);
    p.outliers = get_bool(j, "outliers", false, what);
    const std::string pref = get_string(j, "outlier_preference", "robust", what);
    if (pref == "robust") {
        p.outlier_preference = advisor::OutlierPreference::Robust;
    } else if (pref == "capture") {
        p.outlier_preference = advisor::OutlierPreference::Capture;
    } else {
        throw ConfigError("profile: outlier_preference must be robust or capture");
    }
    const bool capture = get_bool(j, "capture_outliers", false, what);
    const bool robust = get_bool(j, "robust_to_outliers", false, what);
    if (capture && robust) throw ConfigError("profile: capture_outliers and robust_to_outliers are exclusive");
    if (capture) p.outlier_preference = advisor::OutlierPreference::Capture;
    if (robust) p.outlier_preference = advisor::OutlierPreference::Robust;
    p.need_cross_series_comparability = get_bool(j, "need_cross_series_comparability", false, what);
    p.need_benchmark_interpretability = get_bool(j, "need_benchmark_interpretability", false, what);
    p.scale_meaningful = get_bool(j, "scale_meaningful", false, what);

    auto rec = advisor::recommend_measures(p, advisor::builtin_rule_table());
    if (j.contains("partitioning")) {
        const auto& q = j["partitioning"];
        if (!q.is_object()) throw ConfigError("profile: 'partitioning' must be an object");
        check_keys(q, {"series_lengths", "model_class", "ljung_box_p", "alpha", "long_threshold"}, "profile partitioning");
        if (!q.contains("series_lengths") || !q["series_lengths"].is_array())
            throw ConfigError("profile partitioning: 'series_lengths' must be an array");
        std::vector<std::size_t> lengths;
        for (const auto& v : q["series_lengths"]) {
            if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
                throw ConfigError("profile partitioning: lengths must be positive integers");
            lengths.push_back(v.get<std::size_t>());
        }
        const auto model = advisor::parse_model_class(get_string(q, "model_class", "unknown", "profile partitioning"));
        if (!model) throw ConfigError("profile partitioning: model_class must be pure-ar, stateful or unknown");
        std::optional<stats::TestResult> lb;
        if (q.contains("ljung_box_p")) {
            stats::TestResult r;
            r.test = "ljung-box";
            r.p_value = get_double(q, "ljung_box_p", 1.0, "profile partitioning");
            r.alpha = get_double(q, "alpha", 0.05, "profile partitioning");
            if (!(r.p_value >= 0.0 && r.p_value <= 1.0)) throw ConfigError("profile partitioning: ljung_box_p must lie in [0, 1]");
            r.reject = r.p_value < r.alpha;
            lb = r;
        }
        rec.partitioning = advisor::recommend_partitioning(
            lengths, *model, lb, get_size(q, "long_threshold", advisor::kLongSeriesThreshold, "profile partitioning"));
    }

    json out_j;
    out_j["command"] = "advise";
    out_j["version"] = version();
    out_j["checklist_version"] = advisor::builtin_rule_table().version;
    std::vector<std::string> active;
    for (auto c : p.active_columns()) active.push_back(advisor::column_names()[static_cast<std::size_t>(c)]);
    out_j["active_columns"] = active;
    out_j["recommended"] = entries_json(rec.recommended);
    out_j["cautioned"] = entries_json(rec.cautioned);
    out_j["contraindicated"] = entries_json(rec.contraindicated);
    out_j["notes"] = rec.notes;
    if (rec.partitioning) {
        out_j["partitioning"] = {{"scheme", rec.partitioning->scheme},
                                 {"window", rec.partitioning->window},
                                 {"rationale", rec.partitioning->rationale},
                                 {"instructions", rec.partitioning->instructions}};
    }
    RunOutput out;
    out.report = dump(out_j);
    out.artifacts.push_back({"recommendation.json", out.report});
    out.artifacts.push_back({"recommendation.txt", advisor::render_text(rec)});
    return out;
}

// simulate ----------------------------------------------------------------------

namespace {

synth::DgpSpec parse_dgp(const json& j, std::uint64_t seed, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + ": expected an object");
    check_keys(j,
               {"kind", "length", "noise_sd", "noise", "t_df", "seed", "id", "level", "ar", "unit_root", "burn_in",
                "slope", "rate", "scale", "period", "amplitude", "sd_growth", "break_index", "shift",
                "zero_probability", "demand_rate", "components", "outliers"},
               what);
    synth::DgpSpec s;
    const std::string kind = get_string(j, "kind", "", what);
    const auto k = synth::parse_kind(kind);
    if (!k) throw ConfigError(what + ": unknown kind '" + kind + "'");
    s.kind = *k;
    s.length = get_size(j, "length", s.length, what);
    s.noise_sd = get_double(j, "noise_sd", s.noise_sd, what);
    const std::string noise = get_string(j, "noise", "gaussian", what);
    if (noise == "gaussian") {
        s.noise = synth::Noise::Gaussian;
    } else if (noise == "student-t") {
        s.noise = synth::Noise::StudentT;
    } else {
        throw ConfigError(what + ": noise must be gaussian or student-t");
    }
    s.t_df = get_double(j, "t_df", s.t_df, what);
    s.seed = j.contains("seed") ? get_size(j, "seed", 0, what) : seed;
    s.id = get_string(j, "id", s.id, what);
    s.level = get_double(j, "level", s.level, what);
    if (j.contains("ar")) {
        if (!j["ar"].is_array()) throw ConfigError(what + ": 'ar' must be an array");
        for (const auto& v : j["ar"]) {
            if (!v.is_number()) throw ConfigError(what + ": AR coefficients must be numbers");
            s.ar.push_back(v.get<double>());
        }
    }
    s.unit_root = get_bool(j, "unit_root", s.unit_root, what);
    s.burn_in = get_size(j, "burn_in", s.burn_in, what);
    s.slope = get_double(j, "slope", s.slope, what);
    s.rate = get_double(j, "rate", s.rate, what);
    s.scale = get_double(j, "scale", s.scale, what);
    s.period = get_size(j, "period", s.period, what);
    s.amplitude = get_double(j, "amplitude", s.amplitude, what);
    s.sd_growth = get_double(j, "sd_growth", s.sd_growth, what);
    s.break_index = get_size(j, "break_index", s.break_index, what);
    s.shift = get_double(j, "shift", s.shift, what);
    s.zero_probability = get_double(j, "zero_probability", s.zero_probability, what);
    s.demand_rate = get_double(j, "demand_rate", s.demand_rate, what);
    if (j.contains("components")) {
        if (!j["components"].is_array()) throw ConfigError(what + ": 'components' must be an array");
        std::size_t c = 0;
        for (const auto& part : j["components"]) {
            json copy = part;
            if (copy.is_object() && !copy.contains("length")) copy["length"] = s.length;
            auto sub = parse_dgp(copy, 0, what + " component " + std::to_string(++c));
            if (part.contains("outliers")) throw ConfigError(what + ": outliers belong on the composite, not a component");
            s.components.push_back(std::move(sub));
        }
    }
    s.validate();
    return s;
}

synth::OutlierInjection parse_outliers(const json& j, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + ": 'outliers' must be an object");
    check_keys(j, {"indices", "rate", "magnitude", "mode", "direction"}, what + " outliers");
    synth::OutlierInjection o;
    if (j.contains("indices")) {
        if (!j["indices"].is_array()) throw ConfigError(what + ": outlier indices must be an array");
        for (const auto& v : j["indices"]) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                throw ConfigError(what + ": outlier indices must be non-negative integers");
            o.indices.push_back(v.get<std::size_t>());
        }
    }
    if (j.contains("rate")) o.rate = get_double(j, "rate", 0.0, what);
    o.magnitude = get_double(j, "magnitude", o.magnitude, what);
    const std::string mode = get_string(j, "mode", "multiply", what);
    if (mode == "multiply") {
        o.mode = synth::MagnitudeMode::Multiply;
    } else if (mode == "add") {
        o.mode = synth::MagnitudeMode::Add;
    } else {
        throw ConfigError(what + ": outlier mode must be multiply or add");
    }
    const std::string dir = get_string(j, "direction", "high", what);
    if (dir == "high") {
        o.direction = synth::Direction::High;
    } else if (dir == "low") {
        o.direction = synth::Direction::Low;
    } else if (dir == "both") {
        o.direction = synth::Direction::Both;
    } else {
        throw ConfigError(what + ": outlier direction must be high, low or both");
    }
    return o;
}

}  // namespace

RunOutput simulate(const std::string& dgp_json, std::uint64_t seed) {
    const json j = parse_object(dgp_json, "dgp");
    std::vector<json> items;
    if (j.contains("series")) {
        check_keys(j, {"series"}, "dgp");
        if (!j["series"].is_array() || j["series"].empty())
            throw ConfigError("dgp: 'series' must be a non-empty array");
        for (const auto& s : j["series"]) items.push_back(s);
    } else {
        items.push_back(j);
    }
    std::ostringstream csv;
    csv << "series_id,timestamp,value\n";
    json series_report = json::array();
    std::set<std::string> ids;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string what = items.size() == 1 ? "dgp" : "dgp series " + std::to_string(i + 1);
        const std::uint64_t stream_seed = items.size() == 1 ? seed : derive_seed(seed, i);
        auto spec = parse_dgp(items[i], stream_seed, what);
        if (items.size() > 1 && !items[i].contains("id")) spec.id = "series" + std::to_string(i + 1);
        if (!ids.insert(spec.id).second) throw ConfigError(what + ": duplicate id '" + spec.id + "'");
        auto series = synth::generate(spec);
        json entry{{"id", spec.id}, {"kind", synth::to_string(spec.kind)}, {"length", series.size()}, {"seed", spec.seed}};
        if (items[i].contains("outliers")) {
            const auto inj = parse_outliers(items[i]["outliers"], what);
            auto done = synth::inject_outliers(series, inj, derive_seed(spec.seed, 0x6f75746c));
            json log = json::array();
            for (const auto& r : done.log) log.push_back({{"index", r.index}, {"before", r.before}, {"after", r.after}});
            entry["outliers"] = log;
            series = std::move(done.series);
        }
        series_report.push_back(entry);
        csv << synth::series_to_csv(series, false);
    }
    json report;
    report["command"] = "simulate";
    report["version"] = version();
    report["seed"] = seed;
    report["series"] = series_report;
    RunOutput out;
    out.report = dump(report);
    out.artifacts.push_back({"series.csv", csv.str()});
    out.artifacts.push_back({"report.json", out.report});
    return out;
}

// pitfalls ----------------------------------------------------------------------

RunOutput pitfalls(const std::vector<std::string>& names, std::uint64_t seed, bool with_plots) {
    std::vector<std::string> run_names = names;
    if (run_names.empty())
        for (const auto& s : pitfalls::list_scenarios()) run_names.push_back(s.name);
    json scenarios = json::array();
    RunOutput out;
    std::size_t failed = 0;
    for (const auto& name : run_names) {
        const auto r = pitfalls::run_scenario(name, seed);
        json values = json::object();
        for (const auto& [k, v] : r.values) values[k] = number(v);
        scenarios.push_back({{"name", r.name},
                             {"topic", r.topic},
                             {"passed", r.passed},
                             {"predicate", r.predicate},
                             {"values", values}});
        if (!r.passed) ++failed;
        if (with_plots) out.artifacts.push_back({"pitfall_" + r.name + ".csv", r.plot_csv});
    }
    json report;
    report["command"] = "pitfalls";
    report["version"] = version();
    report["seed"] = seed;
    report["passed"] = failed == 0;
    report["failed"] = failed;
    report["scenarios"] = scenarios;
    out.passed = failed == 0;
    out.report = dump(report);
    out.artifacts.insert(out.artifacts.begin(), {"evidence.json", out.report});
    return out;
}

// manifest ----------------------------------------------------------------------

std::string manifest(const std::string& command, const std::vector<ManifestInput>& inputs,
                     const std::string& config_text, std::uint64_t seed, const std::string& policy) {
    json m;
    m["command"] = command;
    m["version"] = version();
    m["seed"] = seed;
    m["policy"] = policy;
    m["config_sha256"] = io::sha256_hex(config_text);
    json config = nullptr;
    if (!config_text.empty()) {
        try {
            config = json::parse(config_text);
        } catch (const json::parse_error&) {
            config = nullptr;
        }
    }
    m["config"] = config;
    json in = json::array();
    for (const auto& i : inputs)
        in.push_back({{"role", i.role}, {"path", i.path}, {"sha256", io::sha256_hex(i.content)}, {"bytes", i.content.size()}});
    m["inputs"] = in;
    return dump(m);
}

}  // namespace fceval::runs
