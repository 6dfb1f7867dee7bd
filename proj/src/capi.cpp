#include "fceval/fceval.h"

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "fceval/core.hpp"
#include "fceval/error.hpp"
#include "fceval/io.hpp"
#include "fceval/measures.hpp"
#include "fceval/pitfalls.hpp"
#include "fceval/runs.hpp"

struct fce_dataset {
    std::shared_ptr<const fceval::core::Dataset> data;
};

struct fce_frame {
    fceval::core::EvaluationFrame frame;
};

struct fce_report {
    fceval::runs::RunOutput out;
};

namespace {

thread_local std::string last_error;

fce_status status_of(fceval::ErrorKind k) {
    switch (k) {
        case fceval::ErrorKind::Domain: return FCE_DOMAIN;
        case fceval::ErrorKind::InsufficientData: return FCE_INSUFFICIENT_DATA;
        case fceval::ErrorKind::Config: return FCE_CONFIG;
        case fceval::ErrorKind::Validation: return FCE_VALIDATION;
        case fceval::ErrorKind::Undefined: return FCE_UNDEFINED;
        case fceval::ErrorKind::Io: return FCE_IO;
    }
    return FCE_INTERNAL;
}

fce_status fail(fce_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

/// Runs `body`, translating exceptions into status codes.
template <typename F>
fce_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return FCE_OK;
    } catch (const fceval::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(FCE_CONFIG, std::string("malformed JSON document: ") + e.what());
    } catch (const std::exception& e) {
        return fail(FCE_INTERNAL, e.what());
    } catch (...) {
        return fail(FCE_INTERNAL, "unknown internal error");
    }
}

std::optional<fceval::measures::UndefinedPolicy> policy_of(fce_policy p) {
    switch (p) {
        case FCE_POLICY_PROPAGATE: return fceval::measures::UndefinedPolicy::Propagate;
        case FCE_POLICY_SKIP: return fceval::measures::UndefinedPolicy::SkipAndCount;
        case FCE_POLICY_ERROR: return fceval::measures::UndefinedPolicy::Error;
        default: return std::nullopt;
    }
}

std::vector<std::string> strings(const char* const* items, size_t n) {
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i) {
        if (!items[i]) throw fceval::ConfigError("null string in argument list");
        out.emplace_back(items[i]);
    }
    return out;
}

fce_status emit(fceval::runs::RunOutput out, fce_report** dst) {
    *dst = new fce_report{std::move(out)};
    return FCE_OK;
}

}  // namespace

extern "C" {

const char* fce_last_error(void) { return last_error.c_str(); }

const char* fce_status_name(fce_status s) {
    switch (s) {
        case FCE_OK: return "ok";
        case FCE_INVALID_ARGUMENT: return "invalid-argument";
        case FCE_CONFIG: return "config";
        case FCE_VALIDATION: return "validation";
        case FCE_DOMAIN: return "domain";
        case FCE_INSUFFICIENT_DATA: return "insufficient-data";
        case FCE_UNDEFINED: return "undefined";
        case FCE_IO: return "io";
        case FCE_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* fce_version(void) {
    static const std::string v = fceval::runs::version();
    return v.c_str();
}

uint64_t fce_default_seed(void) { return fceval::pitfalls::kDefaultSeed; }

fce_status fce_dataset_from_csv(const char* csv_text, fce_dataset** out) {
    if (!csv_text || !out) return fail(FCE_INVALID_ARGUMENT, "fce_dataset_from_csv: null argument");
    *out = nullptr;
    return guarded([&] {
        auto d = std::make_shared<const fceval::core::Dataset>(fceval::io::parse_series_csv(csv_text, "series.csv"));
        *out = new fce_dataset{std::move(d)};
    });
}

void fce_dataset_free(fce_dataset* dataset) { delete dataset; }

size_t fce_dataset_series_count(const fce_dataset* dataset) { return dataset ? dataset->data->size() : 0; }

fce_status fce_dataset_series_length(const fce_dataset* dataset, const char* series_id, size_t* out) {
    if (!dataset || !series_id || !out) return fail(FCE_INVALID_ARGUMENT, "fce_dataset_series_length: null argument");
    return guarded([&] { *out = dataset->data->get(series_id).size(); });
}

fce_status fce_frame_build(const fce_dataset* dataset, const char* forecasts_csv, fce_frame** out) {
    if (!dataset || !forecasts_csv || !out) return fail(FCE_INVALID_ARGUMENT, "fce_frame_build: null argument");
    *out = nullptr;
    return guarded([&] {
        const auto records = fceval::io::parse_forecast_csv(forecasts_csv, "forecasts.csv");
        *out = new fce_frame{fceval::core::EvaluationFrame::build(dataset->data, records)};
    });
}

void fce_frame_free(fce_frame* frame) { delete frame; }

size_t fce_frame_model_count(const fce_frame* frame) { return frame ? frame->frame.models().size() : 0; }

const char* fce_frame_model_name(const fce_frame* frame, size_t index) {
    if (!frame || index >= frame->frame.models().size()) return nullptr;
    return frame->frame.models()[index].c_str();
}

fce_status fce_frame_measure(const fce_frame* frame, const char* measure, const char* model, const char* benchmark,
                             fce_policy policy, double* value, int* defined) {
    if (!frame || !measure || !model || !value || !defined)
        return fail(FCE_INVALID_ARGUMENT, "fce_frame_measure: null argument");
    return guarded([&] {
        auto spec = fceval::measures::measure_spec(measure);
        if (auto p = policy_of(policy)) spec.policy = *p;
        std::vector<fceval::core::Window> windows;
        if (!spec.needs_benchmark) {
            windows = frame->frame.windows(model);
        } else {
            const std::string b = benchmark ? benchmark : "naive";
            if (frame->frame.model_index(b)) {
                windows = frame->frame.windows(model, b);
            } else {
                const auto kind = fceval::core::parse_forecaster_kind(b);
                if (!kind) throw fceval::ConfigError("unknown benchmark '" + b + "'");
                windows = frame->frame.windows(model, fceval::core::Forecaster{*kind, std::nullopt});
            }
        }
        const auto r = fceval::measures::evaluate(spec, windows);
        *defined = r.value ? 1 : 0;
        *value = r.value ? *r.value : 0.0;
    });
}

fce_status fce_run_evaluate(const char* series_csv, const char* forecasts_csv, const char* suite_json,
                            fce_policy policy, fce_report** out) {
    if (!series_csv || !forecasts_csv || !suite_json || !out)
        return fail(FCE_INVALID_ARGUMENT, "fce_run_evaluate: null argument");
    *out = nullptr;
    return guarded([&] { emit(fceval::runs::evaluate(series_csv, forecasts_csv, suite_json, policy_of(policy)), out); });
}

fce_status fce_run_backtest(const char* series_csv, const char* split_json, const char* const* benchmarks,
                            size_t n_benchmarks, uint64_t seed, fce_report** out) {
    if (!series_csv || !split_json || !out || (n_benchmarks && !benchmarks))
        return fail(FCE_INVALID_ARGUMENT, "fce_run_backtest: null argument");
    *out = nullptr;
    return guarded([&] {
        emit(fceval::runs::backtest(series_csv, split_json, strings(benchmarks, n_benchmarks), seed), out);
    });
}

fce_status fce_run_compare(const char* const* report_jsons, size_t n_reports, const char* test_json,
                           const double* alpha_override, fce_report** out) {
    if (!test_json || !out || (n_reports && !report_jsons))
        return fail(FCE_INVALID_ARGUMENT, "fce_run_compare: null argument");
    *out = nullptr;
    return guarded([&] {
        std::optional<double> alpha;
        if (alpha_override) alpha = *alpha_override;
        emit(fceval::runs::compare(strings(report_jsons, n_reports), test_json, alpha), out);
    });
}

fce_status fce_run_advise(const char* profile_json, fce_report** out) {
    if (!profile_json || !out) return fail(FCE_INVALID_ARGUMENT, "fce_run_advise: null argument");
    *out = nullptr;
    return guarded([&] { emit(fceval::runs::advise(profile_json), out); });
}

fce_status fce_run_simulate(const char* dgp_json, uint64_t seed, fce_report** out) {
    if (!dgp_json || !out) return fail(FCE_INVALID_ARGUMENT, "fce_run_simulate: null argument");
    *out = nullptr;
    return guarded([&] { emit(fceval::runs::simulate(dgp_json, seed), out); });
}

fce_status fce_run_pitfalls(const char* const* names, size_t n_names, uint64_t seed, int with_plots,
                            fce_report** out) {
    if (!out || (n_names && !names)) return fail(FCE_INVALID_ARGUMENT, "fce_run_pitfalls: null argument");
    *out = nullptr;
    return guarded([&] { emit(fceval::runs::pitfalls(strings(names, n_names), seed, with_plots != 0), out); });
}

const char* fce_report_json(const fce_report* report) { return report ? report->out.report.c_str() : nullptr; }

int fce_report_passed(const fce_report* report) { return report && report->out.passed ? 1 : 0; }

size_t fce_report_artifact_count(const fce_report* report) { return report ? report->out.artifacts.size() : 0; }

const char* fce_report_artifact_name(const fce_report* report, size_t index) {
    if (!report || index >= report->out.artifacts.size()) return nullptr;
    return report->out.artifacts[index].name.c_str();
}

const char* fce_report_artifact_content(const fce_report* report, size_t index) {
    if (!report || index >= report->out.artifacts.size()) return nullptr;
    return report->out.artifacts[index].content.c_str();
}

void fce_report_free(fce_report* report) { delete report; }

fce_status fce_manifest(const char* command, const char* const* roles, const char* const* paths,
                        const char* const* contents, size_t n_inputs, const char* config_text, uint64_t seed,
                        const char* policy, fce_report** out) {
    if (!command || !out || (n_inputs && (!roles || !paths || !contents)))
        return fail(FCE_INVALID_ARGUMENT, "fce_manifest: null argument");
    *out = nullptr;
    return guarded([&] {
        std::vector<fceval::runs::ManifestInput> inputs;
        for (size_t i = 0; i < n_inputs; ++i) {
            if (!roles[i] || !paths[i] || !contents[i]) throw fceval::ConfigError("fce_manifest: null input entry");
            inputs.push_back({roles[i], paths[i], contents[i]});
        }
        fceval::runs::RunOutput r;
        r.report = fceval::runs::manifest(command, inputs, config_text ? config_text : "", seed, policy ? policy : "");
        r.artifacts.push_back({"manifest.json", r.report});
        emit(std::move(r), out);
    });
}

fce_status fce_list_scenarios(fce_report** out) {
    if (!out) return fail(FCE_INVALID_ARGUMENT, "fce_list_scenarios: null argument");
    *out = nullptr;
    return guarded([&] {
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (const auto& s : fceval::pitfalls::list_scenarios()) {
            list.push_back({{"name", s.name},
                            {"topic", s.topic},
                            {"description", s.description},
                            {"measures", s.measures},
                            {"predicate", s.predicate}});
        }
        fceval::runs::RunOutput r;
        r.report = list.dump(2) + "\n";
        emit(std::move(r), out);
    });
}

fce_status fce_sha256_hex(const void* data, size_t size, char out[65]) {
    if ((!data && size) || !out) return fail(FCE_INVALID_ARGUMENT, "fce_sha256_hex: null argument");
    return guarded([&] {
        const std::string hex =
            fceval::io::sha256_hex(std::string(static_cast<const char*>(data ? data : ""), size));
        std::copy(hex.begin(), hex.end(), out);
        out[64] = '\0';
    });
}

}  // extern "C"
