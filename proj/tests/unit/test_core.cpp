#include <doctest.h>

#include <random>

#include "fceval/core.hpp"
#include "fceval/error.hpp"

using namespace fceval;
using core::TimeSeries;

namespace {

using V = std::vector<double>;

TimeSeries ts(V v, std::optional<int> freq = std::nullopt) { return TimeSeries::from_values("s", std::move(v), freq); }

}  // namespace

TEST_CASE("time series invariants") {
    CHECK_THROWS_AS(TimeSeries("a", {}, {}), DomainError);
    CHECK_THROWS_AS(TimeSeries("a", {1, 2}, {1.0}), DomainError);
    CHECK_THROWS_AS(TimeSeries("a", {1, 1}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(TimeSeries("a", {2, 1}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(TimeSeries("a", {1}, {1.0}, 1), DomainError);
    CHECK_THROWS_AS(TimeSeries("a", {1, 2}, {1.0, std::nan("")}), DomainError);
    TimeSeries ok("a", {10, 20, 35}, {1.0, 2.0, 3.0}, 12);
    CHECK(ok.size() == 3);
    CHECK(ok.at(3) == 3.0);
    CHECK(ok.position_of(20) == std::optional<std::size_t>(1));
    CHECK_FALSE(ok.position_of(21));
}

TEST_CASE("dataset ids are unique and non-empty") {
    CHECK_THROWS_AS(core::Dataset({}), DomainError);
    CHECK_THROWS_AS(core::Dataset({ts({1}), ts({2})}), DomainError);
    core::Dataset d({TimeSeries::from_values("a", {1}), TimeSeries::from_values("b", {2, 3})});
    CHECK(d.get("b").size() == 2);
    CHECK(d.find("c") == nullptr);
    CHECK_THROWS_AS(d.get("c"), DomainError);
}

TEST_CASE("naive forecast") {
    CHECK(core::naive_forecast(ts({1, 2, 3}), 3, 2) == V{3, 3});
    CHECK(core::naive_forecast(ts({5}), 1, 1) == V{5});
    const auto s = ts({1, 2, 3, 4, 5});
    CHECK(core::naive_forecast(s, 3, 1) == V{3});
    CHECK(core::naive_forecast(s, 4, 1) == V{4});
    CHECK_THROWS_AS(core::naive_forecast(s, 0, 1), DomainError);
    CHECK_THROWS_AS(core::naive_forecast(s, 6, 1), DomainError);
}

TEST_CASE("seasonal naive forecast") {
    CHECK(core::seasonal_naive_forecast(ts({1, 2, 1, 2}), 4, 2, 2) == V{1, 2});
    CHECK(core::seasonal_naive_forecast(ts({1, 2, 3}), 3, 2, 1) == V{3, 3});
    CHECK(core::seasonal_naive_forecast(ts({10, 20, 30}), 3, 4, 3) == V{10, 20, 30, 10});
    CHECK_THROWS_AS(core::seasonal_naive_forecast(ts({1, 2}), 2, 1, 3), InsufficientDataError);
}

TEST_CASE("mean forecast") {
    CHECK(core::mean_forecast(ts({2, 4}), 2, 1) == V{3});
    CHECK(core::mean_forecast(ts({5, 5, 5}), 3, 3) == V{5, 5, 5});
    CHECK(core::mean_forecast(ts({1, 2, 3, 4}), 2, 2) == V{1.5, 1.5});
}

TEST_CASE("benchmark properties over random series") {
    std::mt19937_64 g(7);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 2 + g() % 30;
        V v(n);
        for (double& x : v) x = z(g);
        const auto s = ts(v);
        const std::size_t origin = 1 + g() % (n - 1);
        const std::size_t h = 1 + g() % 6;

        const auto nf = core::naive_forecast(s, origin, h);
        for (double x : nf) CHECK(x == nf.front());
        CHECK(core::seasonal_naive_forecast(s, origin, h, 1) == nf);

        // Perturbing the value after the origin leaves mean and naive alone.
        V w = v;
        w[origin] += 100.0;
        const auto s2 = ts(w);
        CHECK(core::mean_forecast(s2, origin, h) == core::mean_forecast(s, origin, h));
        CHECK(core::naive_forecast(s2, origin, h) == nf);
    }
}

TEST_CASE("forecaster interface") {
    const auto s = ts({1, 2, 3, 4});
    CHECK(core::Forecaster::naive().forecast(s, 4, 1) == V{4});
    CHECK(core::Forecaster::seasonal_naive(2).forecast(s, 4, 2) == V{3, 4});
    CHECK(core::Forecaster::mean().forecast(s, 2, 1) == V{1.5});
    CHECK_THROWS_AS(core::Forecaster::external().forecast(s, 2, 1), DomainError);
    CHECK(core::parse_forecaster_kind("seasonal-naive") == core::ForecasterKind::SeasonalNaive);
    CHECK_FALSE(core::parse_forecaster_kind("arima"));
}

TEST_CASE("embedding") {
    V ten(10);
    for (int i = 0; i < 10; ++i) ten[i] = i;
    CHECK(core::embed(ts(ten), 3).rows() == 7);

    const auto m = core::embed(ts({1, 2, 3}), 1);
    REQUIRE(m.rows() == 2);
    CHECK(m.predictors(0)[0] == 1.0);
    CHECK(m.target(0) == 2.0);
    CHECK(m.predictors(1)[0] == 2.0);
    CHECK(m.target(1) == 3.0);

    CHECK(core::embed(ts({1, 2, 3, 4}), 3).rows() == 1);
    CHECK_THROWS_AS(core::embed(ts({1, 2, 3}), 3), InsufficientDataError);
    CHECK_THROWS_AS(core::embed(ts({1, 2, 3}), 0), DomainError);
}

TEST_CASE("embedding rows are consecutive observations and round-trip") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + g() % 40;
        const std::size_t p = 1 + g() % (n - 1);
        V v(n);
        for (double& x : v) x = u(g);
        const auto m = core::embed(ts(v), p);
        REQUIRE(m.rows() == n - p);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const auto lags = m.predictors(r);
            CHECK(m.source_start(r) == r);
            for (std::size_t j = 0; j < p; ++j) CHECK(lags[j] == v[r + j]);
            CHECK(m.target(r) == v[r + p]);
        }
        CHECK(m.reassemble() == v);
    }
}

TEST_CASE("evaluation frame joins forecasts to actuals") {
    auto data = std::make_shared<const core::Dataset>(std::vector<TimeSeries>{
        TimeSeries::from_values("a", {1, 2, 3, 4, 5}), TimeSeries::from_values("b", {10, 20, 30})});
    std::vector<core::ForecastRecord> recs = {
        {"a", 3, 1, "m1", 3.5}, {"a", 3, 1, "m2", 4.5}, {"a", 3, 2, "m1", 3.0}, {"a", 3, 2, "m2", 6.0},
        {"b", 2, 1, "m1", 25.0}, {"b", 2, 1, "m2", 20.0},
    };
    const auto f = core::EvaluationFrame::build(data, recs);
    CHECK(f.horizon() == 2);
    CHECK(f.models().size() == 2);
    CHECK(f.rows().size() == 3);
    for (const auto& r : f.rows()) {
        // Actuals are model-invariant by construction: one actual per key.
        CHECK(r.forecasts.size() == 2);
        const auto& s = data->get(r.key.series_id);
        CHECK(r.actual == s.at(static_cast<std::size_t>(r.key.origin) + r.key.step));
    }
    const auto w = f.windows("m1", core::Forecaster::naive());
    REQUIRE(w.size() == 2);
    CHECK(w[0].actual == V{4, 5});
    CHECK(w[0].forecast == V{3.5, 3.0});
    CHECK(w[0].benchmark == V{3, 3});
    CHECK(w[0].train == V{1, 2, 3});
    CHECK(w[0].label() == "a@3");
    const auto wb = f.windows("m1", "m2");
    CHECK(wb[1].benchmark == V{20.0});
    CHECK_THROWS_AS(f.windows("m3"), ConfigError);
}

TEST_CASE("evaluation frame rejects sparse or misaligned input") {
    auto data = std::make_shared<const core::Dataset>(std::vector<TimeSeries>{TimeSeries::from_values("a", {1, 2, 3})});
    using R = std::vector<core::ForecastRecord>;
    // Missing model on one key.
    CHECK_THROWS_AS(core::EvaluationFrame::build(data, R{{"a", 1, 1, "m1", 1}, {"a", 1, 1, "m2", 1}, {"a", 1, 2, "m1", 1}}),
                    ValidationError);
    // Duplicate key.
    CHECK_THROWS_AS(core::EvaluationFrame::build(data, R{{"a", 1, 1, "m1", 1}, {"a", 1, 1, "m1", 2}}), ValidationError);
    // Target past the end.
    CHECK_THROWS_AS(core::EvaluationFrame::build(data, R{{"a", 3, 1, "m1", 1}}), ValidationError);
    // Unknown series and origin.
    CHECK_THROWS_AS(core::EvaluationFrame::build(data, R{{"z", 1, 1, "m1", 1}}), ValidationError);
    CHECK_THROWS_AS(core::EvaluationFrame::build(data, R{{"a", 9, 1, "m1", 1}}), ValidationError);
    CHECK_THROWS_AS(core::EvaluationFrame::build(data, R{}), ValidationError);
}
