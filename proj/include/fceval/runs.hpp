#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fceval/measures.hpp"

namespace fceval::runs {

struct Artifact {
    std::string name;  // file name relative to the output directory
    std::string content;
};

/// Result of one batch command. `report` is the primary JSON document;
/// `passed` is false when the run completed but a check failed (leakage,
/// failing scenario), which callers map to the validation exit code.
struct RunOutput {
    std::string report;
    std::vector<Artifact> artifacts;
    bool passed = true;
};

/// Measures over aligned forecasts. `suite_json` lists measures with
/// optional per-measure policy, constants, order, scale mode and weights,
/// and the benchmark. A policy override, when given, wins over the suite.
RunOutput evaluate(const std::string& series_csv, const std::string& forecasts_csv, const std::string& suite_json,
                   std::optional<measures::UndefinedPolicy> policy_override = std::nullopt);

/// Splits every series per `split_json`, checks leakage fold by fold and
/// scores the requested benchmarks ("naive", "seasonal-naive", "mean") on
/// temporal folds, or an AR(order) least-squares fit on k-fold/blocked folds.
RunOutput backtest(const std::string& series_csv, const std::string& split_json,
                   const std::vector<std::string>& benchmarks, std::uint64_t seed);

/// Friedman gate, post-hoc comparison and CD diagram across evaluate reports.
RunOutput compare(const std::vector<std::string>& report_jsons, const std::string& test_json,
                  std::optional<double> alpha_override = std::nullopt);

RunOutput advise(const std::string& profile_json);

RunOutput simulate(const std::string& dgp_json, std::uint64_t seed);

/// Runs the named scenarios (all when `names` is empty).
RunOutput pitfalls(const std::vector<std::string>& names, std::uint64_t seed, bool with_plots = false);

struct ManifestInput {
    std::string role;
    std::string path;
    std::string content;
};

/// Canonical manifest: inputs with their SHA-256, seed, hash of the config
/// text, toolkit version and the undefined-value policy token.
std::string manifest(const std::string& command, const std::vector<ManifestInput>& inputs,
                     const std::string& config_text, std::uint64_t seed, const std::string& policy);

std::string version();

}  // namespace fceval::runs
