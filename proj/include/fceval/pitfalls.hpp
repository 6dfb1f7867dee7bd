#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fceval::pitfalls {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Catalogue entry. `topic` names the series characteristic (or general
/// concern) the scenario belongs to; `predicate` is the decidable outcome.
struct ScenarioInfo {
    std::string name;
    std::string topic;
    std::string description;
    std::vector<std::string> measures;
    std::string predicate;
};

struct ScenarioResult {
    std::string name;
    std::string topic;
    std::uint64_t seed = 0;
    bool passed = false;
    std::string predicate;
    std::vector<std::pair<std::string, double>> values;  // measured evidence, in report order
    std::string plot_csv;                                // series_id,t,actual,model,forecast
};

/// Stable, name-sorted catalogue.
[[nodiscard]] const std::vector<ScenarioInfo>& list_scenarios();

/// Runs one scenario. Throws ConfigError for an unknown name.
[[nodiscard]] ScenarioResult run_scenario(const std::string& name, std::uint64_t seed = kDefaultSeed);

/// Characteristic topics every catalogue must cover.
[[nodiscard]] const std::vector<std::string>& required_topics();

}  // namespace fceval::pitfalls
