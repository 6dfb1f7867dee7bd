#include <doctest.h>

#include <algorithm>
#include <set>

#include "fceval/error.hpp"
#include "fceval/pitfalls.hpp"

using namespace fceval;
using namespace fceval::pitfalls;

TEST_CASE("catalogue is stable and complete") {
    const auto& cat = list_scenarios();
    REQUIRE_FALSE(cat.empty());
    CHECK(std::is_sorted(cat.begin(), cat.end(), [](const auto& a, const auto& b) { return a.name < b.name; }));
    std::set<std::string> topics, names;
    for (const auto& s : cat) {
        topics.insert(s.topic);
        CHECK(names.insert(s.name).second);
        CHECK_FALSE(s.predicate.empty());
        CHECK_FALSE(s.measures.empty());
    }
    for (const auto& t : required_topics()) CHECK_MESSAGE(topics.count(t) == 1, t);
    // Names named by the behaviour list stay registered.
    for (const char* n : {"naive-optimality", "mape-seasonal", "mrae-negative-ar", "mrae-trend", "wape-break-horizon",
                          "smae-break-training", "mase-break-origin", "corr-bias", "log-exp-trend", "gm-zero-collapse"})
        CHECK_MESSAGE(names.count(n) == 1, n);
}

TEST_CASE("every scenario passes and is seed-deterministic") {
    for (const auto& s : list_scenarios()) {
        const auto a = run_scenario(s.name);
        const auto b = run_scenario(s.name);
        CHECK_MESSAGE(a.passed, s.name);
        CHECK(a.seed == kDefaultSeed);
        CHECK(a.values == b.values);
        CHECK(a.plot_csv == b.plot_csv);
        CHECK(a.topic == s.topic);
        CHECK(a.plot_csv.rfind("series_id,t,actual,model,forecast", 0) == 0);
    }
}

TEST_CASE("scenarios hold under other seeds") {
    for (std::uint64_t seed : {1ull, 42ull, 777ull}) {
        for (const auto& s : list_scenarios()) CHECK_MESSAGE(run_scenario(s.name, seed).passed, s.name << " seed " << seed);
    }
}

TEST_CASE("corr-bias evidence") {
    const auto r = run_scenario("corr-bias");
    auto get = [&](const std::string& k) {
        for (const auto& [n, v] : r.values)
            if (n == k) return v;
        FAIL("missing value " << k);
        return 0.0;
    };
    CHECK(r.passed);
    CHECK(get("ME_biased") == doctest::Approx(-10.0));
    CHECK(get("CORR_biased") == doctest::Approx(1.0));
}

TEST_CASE("unknown scenario") { CHECK_THROWS_AS(run_scenario("no-such-thing"), ConfigError); }
