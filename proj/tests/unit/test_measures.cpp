#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fceval/error.hpp"
#include "fceval/measures.hpp"
#include "support/oracle.hpp"
#include "support/random_frames.hpp"

using namespace fceval;
using namespace fceval::measures;
using doctest::Approx;

namespace {

using V = std::vector<double>;

core::Window win(V actual, V forecast, V bench = {}, V train = {1.0, 2.0}, std::string id = "s") {
    core::Window w;
    w.series_id = std::move(id);
    w.origin = static_cast<std::int64_t>(train.size());
    w.actual = std::move(actual);
    w.forecast = std::move(forecast);
    w.benchmark = std::move(bench);
    w.train = std::move(train);
    return w;
}

double value(const std::string& name, const std::vector<core::Window>& w,
             UndefinedPolicy policy = UndefinedPolicy::Propagate) {
    auto spec = measure_spec(name);
    spec.policy = policy;
    auto r = evaluate(spec, w);
    REQUIRE(r.value.has_value());
    return *r.value;
}

std::optional<double> maybe(const std::string& name, const std::vector<core::Window>& w,
                            UndefinedPolicy policy = UndefinedPolicy::Propagate) {
    auto spec = measure_spec(name);
    spec.policy = policy;
    return evaluate(spec, w).value;
}

}  // namespace

TEST_CASE("registry is complete and bijective") {
    std::set<std::string> names;
    for (const auto& s : registry()) CHECK(names.insert(s.name).second);
    for (const char* fam : {"scale-dependent", "percentage", "aggregate-scaling", "relative-error", "relative",
                            "scaled", "transform", "other"}) {
        for (const auto& m : family_members(fam)) CHECK(names.count(m) == 1);
    }
    CHECK(names.size() == 45);
    CHECK_THROWS_AS(measure_spec("NOPE"), ConfigError);
    CHECK_THROWS_AS(scale_dependent_measures({}, "MAPE"), ConfigError);
}

TEST_CASE("scale-dependent examples") {
    const std::vector<core::Window> w{win({2, 4}, {1, 2})};
    CHECK(value("MAE", w) == 1.5);
    CHECK(value("RMSE", w) == Approx(std::sqrt(2.5)).epsilon(1e-14));
    const std::vector<core::Window> perfect{win({3, 5, 7}, {3, 5, 7})};
    for (const char* m : {"MSE", "MAE", "RMSE", "GMAE", "ME"}) CHECK(value(m, perfect) == 0.0);
    CHECK(value("ME", {win({1, 1}, {2, 2})}) == -1.0);
    CHECK(value("GMAE", {win({1, 4}, {0, 0})}) == Approx(2.0).epsilon(1e-14));
    CHECK(value("ErrorStd", w) == value("RMSE", w));
    CHECK(value("MdAE", {win({0, 0, 0}, {1, 5, 2})}) == 2.0);
    CHECK(value("RMdSE", {win({0, 0, 0}, {1, 5, 2})}) == 2.0);
    CHECK_THROWS_AS(scale_dependent_measures(std::vector<core::Window>{}, "MAE"), DomainError);
}

TEST_CASE("geometric mean over a zero term returns zero with a flag") {
    const auto r = scale_dependent_measures(std::vector<core::Window>{win({1, 4}, {1, 0})}, "GMAE");
    CHECK(r.value == std::optional<double>(0.0));
    CHECK(r.flags.count("geomean_zero") == 1);
}

TEST_CASE("percentage examples") {
    CHECK(value("sMAPE", {win({0}, {5})}) == 200.0);
    CHECK(value("MAAPE", {win({0}, {3})}) == std::numbers::pi / 2);
    CHECK(value("MAPE", {win({100}, {110})}) == Approx(10.0).epsilon(1e-14));
    // Denominator floors at 0.5 + 0.1 = 0.6.
    CHECK(value("msMAPE", {win({0.1}, {0.2})}) == Approx(200.0 * 0.1 / 0.6).epsilon(1e-14));
    const auto r = percentage_measures(std::vector<core::Window>{win({0.1}, {0.2})}, "msMAPE");
    CHECK(r.flags.count("winsorised") == 1);
    CHECK_FALSE(maybe("MAPE", {win({0, 1}, {1, 1})}));
    CHECK_FALSE(maybe("sMAPE", {win({0}, {0})}));
    CHECK_FALSE(maybe("MAAPE", {win({0}, {0})}));
}

TEST_CASE("msMAPE constants are configurable") {
    Constants c;
    c.epsilon = 0.2;
    c.threshold = 1.0;
    const auto r = percentage_measures(std::vector<core::Window>{win({0.1}, {0.2})}, "msMAPE",
                                       UndefinedPolicy::Propagate, c);
    CHECK(*r.value == Approx(200.0 * 0.1 / 1.2).epsilon(1e-14));
}

TEST_CASE("aggregate scaling examples") {
    CHECK(value("WAPE", {win({10, 10}, {9, 12})}) == Approx(0.15).epsilon(1e-14));
    const std::vector<core::Window> one{win({3, 7, 2}, {2, 9, 2})};
    CHECK(value("ND", one) == Approx(value("WAPE", one)).epsilon(1e-14));
    CHECK_FALSE(maybe("sMAE", {win({1, 0}, {0, 2}, {}, {0, 0, 0})}));
    const std::vector<core::Window> perfect{win({3, 7}, {3, 7}, {}, {2, 4})};
    for (const char* m : {"WAPE", "sWAPE", "WRMSPE", "RTAE", "sME", "sMSE", "sMAE", "ND", "NRMSE"})
        CHECK(value(m, perfect) == 0.0);
    const auto r = aggregate_scaling_measures(std::vector<core::Window>{win({0.2, 0.4}, {0.1, 0.1})}, "RTAE");
    CHECK(r.flags.count("clamped") == 1);
    CHECK(*r.value == Approx(0.2).epsilon(1e-14));
    CHECK_FALSE(maybe("WAPE", {win({0, 0}, {1, 1})}));
}

TEST_CASE("relative error examples") {
    CHECK(value("MRAE", {win({5, 6}, {4, 8}, {4, 8})}) == 1.0);
    CHECK(value("MRAE", {win({0, 0}, {1, 2}, {2, 2})}) == Approx(0.75).epsilon(1e-14));
    CHECK(value("GMRAE", {win({0, 0, 0}, {0, 9, 9}, {1, 1, 1})}) == 0.0);
    CHECK_FALSE(maybe("MRAE", {win({1, 2}, {0, 0}, {1, 0})}));
    const std::vector<core::Window> w{win({1, 2, 3}, {0, 0, 1}, {2, 5, 4})};
    CHECK(value("RGRMSE", w) == Approx(value("GMRAE", w)).epsilon(1e-13));
}

TEST_CASE("relative measure examples") {
    const std::vector<core::Window> same{win({1, 2, 3}, {2, 2, 2}, {2, 2, 2})};
    CHECK(value("RelMAE", same) == 1.0);
    // Ratios 0.5 and 2.0 with unit horizons.
    const std::vector<core::Window> two{win({0}, {1}, {2}, {1, 2}, "a"), win({0}, {4}, {2}, {1, 2}, "b")};
    CHECK(value("AvgRelMAE", two) == Approx(1.0).epsilon(1e-14));
    const std::vector<core::Window> at_mean{win({1, 3}, {2, 2}, {0, 0}, {1, 2}, "a"), win({0, 4}, {2, 2}, {0, 0}, {1, 2}, "b")};
    CHECK(value("RSE", at_mean) == Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(maybe("RelMAE", {win({1, 2}, {0, 0}, {1, 2})}));
    const auto r = relative_measures(std::vector<core::Window>{win({0}, {0}, {2}, {1, 2}, "a"), win({0}, {4}, {2}, {1, 2}, "b")},
                                     "AvgRelMAE");
    CHECK(r.value == std::optional<double>(0.0));
    CHECK(r.flags.count("geomean_zero") == 1);
}

TEST_CASE("scaled examples") {
    // In-sample one-step naive as the model.
    const V y{3, 1, 4, 1, 5, 9, 2, 6};
    const V actual(y.begin() + 1, y.end()), fc(y.begin(), y.end() - 1);
    CHECK(value("MASE", {win(actual, fc, {}, y)}) == Approx(1.0).epsilon(1e-14));
    CHECK(value("MASE", {win({6}, {4}, {}, {1, 2, 3, 4})}) == 2.0);
    const auto r = scaled_measures(std::vector<core::Window>{win({6}, {4}, {}, {5, 5, 5})}, "MASE");
    CHECK_FALSE(r.value);
    CHECK(r.flags.count("zero_scale") == 1);
    CHECK(value("RMSSE", {win({6}, {4}, {}, {1, 3, 5})}) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("scaled measure scale modes") {
    auto w = win({10, 10}, {8, 6}, {}, {1, 5, 2, 6, 3, 7});
    w.period = 2;
    // Lag-2 differences all equal 1.
    CHECK(*scaled_measures(std::vector<core::Window>{w}, "MASE", ScaleMode::Seasonal).value == Approx(3.0).epsilon(1e-14));
    // Step 1 scaled by mean |lag-1 diff| = 4.0, step 2 by mean |lag-2 diff| = 1.
    const double lag1 = (4 + 3 + 4 + 3 + 4) / 5.0;
    CHECK(*scaled_measures(std::vector<core::Window>{w}, "MASE", ScaleMode::MultiStep).value ==
          Approx(0.5 * (2 / lag1 + 4 / 1.0)).epsilon(1e-14));
    auto no_period = w;
    no_period.period.reset();
    CHECK_THROWS_AS(scaled_measures(std::vector<core::Window>{no_period}, "MASE", ScaleMode::Seasonal), ConfigError);
}

TEST_CASE("rank and count measures") {
    CHECK(probability_better(V{1, 1, 1}, V{2, 2, 2}) == 100.0);
    CHECK(probability_better(V{1, 1, 1, 3}, V{2, 2, 2, 2}) == 75.0);
    CHECK(critical_event_percentage(V{0.5, 1.5, 2.5}, 1.0) == Approx(200.0 / 3.0).epsilon(1e-14));
    const auto r = rank_count_measures({{"A", {1, 1}}, {"B", {2, 2}}}, "A", V{3, 3}, 1.5);
    CHECK(r.pb == 100.0);
    CHECK(r.critical == 0.0);
    CHECK(r.mean_ranks.at("A") == 1.0);
    CHECK(r.mean_ranks.at("B") == 2.0);
    CHECK_THROWS_AS(probability_better(V{}, V{}), DomainError);
}

TEST_CASE("transform examples") {
    CHECK(value("RMSLE", {win({3, 4}, {3, 4})}) == 0.0);
    CHECK(value("RMSLE", {win({9}, {4})}) == Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(value("RMSLE", {win({9, 2}, {4, 7})}) == value("RMSLE", {win({4, 7}, {9, 2})}));
    CHECK_THROWS_AS(value("RMSLE", {win({-1}, {4})}), DomainError);
    WeightVector w{WeightAxis::Step, {1.25, 1.0}};
    const auto r = transform_measures(std::vector<core::Window>{win({9, 1}, {4, 1})}, "NWRMSLE", w);
    CHECK(*r.value == Approx(std::sqrt(1.25 * std::log(2.0) * std::log(2.0) / 2.25)).epsilon(1e-14));
    CHECK_THROWS_AS(transform_measures(std::vector<core::Window>{win({9}, {4})}, "RMSLE", w), ConfigError);
}

TEST_CASE("other measure examples") {
    // Forecast equals the cumulative mean of actuals including the target.
    const V train{2, 4};
    const V actual{6, 8};
    const V fc{(2 + 4 + 6) / 3.0, (2 + 4 + 6 + 8) / 4.0};
    CHECK(value("MSR", {win(actual, fc, {}, train)}) == Approx(0.0).epsilon(1e-14));
    CHECK(value("MAR", {win(actual, fc, {}, train)}) == Approx(0.0).epsilon(1e-14));
    CHECK(value("CORR", {win({1, 5, 2, 8}, {11, 15, 12, 18})}) == Approx(1.0).epsilon(1e-14));
    CHECK(value("ME", {win({1, 5, 2, 8}, {11, 15, 12, 18})}) == -10.0);
    WeightVector w{WeightAxis::Step, {5, 1}};
    CHECK(*other_measures(std::vector<core::Window>{win({1, 1}, {0, 0})}, "WMAE", w).value == 1.0);
    CHECK(*other_measures(std::vector<core::Window>{win({2, 0}, {0, 0})}, "WMAE", w).value == Approx(10.0 / 6).epsilon(1e-14));
    CHECK_FALSE(maybe("CORR", {win({1, 1, 1}, {1, 2, 3})}));
    CHECK_FALSE(maybe("CORR", {win({1}, {1})}));
    CHECK_THROWS_AS(other_measures(std::vector<core::Window>{win({1, 1}, {0, 0})}, "WMAE",
                                   WeightVector{WeightAxis::Step, {1}}),
                    ConfigError);
    CHECK_THROWS_AS(other_measures(std::vector<core::Window>{win({1, 1}, {0, 0})}, "WMAE",
                                   WeightVector{WeightAxis::Step, {0, 0}}),
                    ConfigError);
}

TEST_CASE("summarize") {
    CHECK(summarize({{4}}, Order::Pooled, Summariser::Mean, Summariser::Mean) == 4.0);
    CHECK(summarize({{4}}, Order::HorizonThenSeries, Summariser::GeometricMean, Summariser::Median) == 4.0);
    const std::vector<V> v{{1, 3}, {2, 2}};
    CHECK(summarize(v, Order::HorizonThenSeries, Summariser::Mean, Summariser::Mean) == 2.0);
    CHECK(summarize(v, Order::Pooled, Summariser::Mean, Summariser::Mean) == 2.0);
    CHECK(summarize(v, Order::HorizonThenSeries, Summariser::Mean, Summariser::Median) == 2.0);
    CHECK(summarize(v, Order::SeriesThenHorizon, Summariser::Median, Summariser::Mean) == 2.0);
    // Order matters once rows differ.
    const std::vector<V> u{{1, 1, 1, 9}, {2}};
    CHECK(summarize(u, Order::Pooled, Summariser::Mean, Summariser::Mean) == Approx(14.0 / 5));
    CHECK(summarize(u, Order::HorizonThenSeries, Summariser::Mean, Summariser::Mean) == Approx(2.5));
    CHECK(summarize(u, Order::SeriesThenHorizon, Summariser::Mean, Summariser::Mean) == Approx((1.5 + 1 + 1 + 9) / 4));
    CHECK_THROWS_AS(summarize({{-1, 2}}, Order::Pooled, Summariser::GeometricMean, Summariser::Mean), DomainError);
    CHECK_THROWS_AS(summarize({}, Order::Pooled, Summariser::Mean, Summariser::Mean), DomainError);
    const WeightVector w{WeightAxis::Series, {3, 1}};
    CHECK(summarize(v, Order::HorizonThenSeries, Summariser::Mean, Summariser::Mean, w) == 2.0);
    CHECK(summarize({{0, 4}, {8}}, Order::HorizonThenSeries, Summariser::Mean, Summariser::Mean, w) == Approx(3.5));
}

TEST_CASE("rank models") {
    auto t = rank_models({{"A", {1, 1}}, {"B", {2, 2}}});
    CHECK(t.mean_ranks == V{1, 2});
    t = rank_models({{"A", {1, 3}}, {"B", {1, 2}}, {"C", {0, 5}}});
    CHECK(t.ranks[0] == V{2.5, 2.5, 1});
    CHECK(t.ranks[1] == V{2, 1, 3});
    CHECK_THROWS_AS(rank_models({{"A", {1, 1}}, {"B", {2}}}), DomainError);
    // Invariant under a strictly monotone transform of the scores.
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.1, 10);
    for (int rep = 0; rep < 50; ++rep) {
        std::map<std::string, V> s, ts;
        for (const char* m : {"A", "B", "C", "D"}) {
            V v(7);
            for (double& x : v) x = std::round(u(g));
            s[m] = v;
            for (double& x : v) x = std::exp(3 * x) + 1;
            ts[m] = v;
        }
        CHECK(rank_models(s).ranks == rank_models(ts).ranks);
        CHECK(rank_models(s, false).mean_ranks != rank_models(s).mean_ranks);
    }
}

TEST_CASE("undefined-term policy accounting") {
    const std::vector<core::Window> w{win({0, 2, 4}, {1, 1, 1}, {0, 1, 1}, {1, 2}, "a"), win({5, 0}, {5, 1}, {4, 1}, {1, 2}, "b")};
    for (const auto& spec : registry()) {
        for (auto p : {UndefinedPolicy::Propagate, UndefinedPolicy::SkipAndCount}) {
            auto s = spec;
            s.policy = p;
            INFO(spec.name);
            if (s.weighted) s.weights = WeightVector{WeightAxis::Step, {1, 2, 3}};
            const auto r = evaluate(s, w);
            const std::size_t total = spec.base == BaseKind::Correlation ? 2 : 5;
            CHECK_MESSAGE(r.n_used + r.n_undefined == total, spec.name);
            if (r.n_undefined > 0 && p == UndefinedPolicy::Propagate) CHECK_MESSAGE(!r.value, spec.name);
            if (r.n_undefined > 0) CHECK(r.flags.count("undefined_terms") == 1);
        }
    }
    auto mape = measure_spec("MAPE");
    mape.policy = UndefinedPolicy::Error;
    CHECK_THROWS_AS(evaluate(mape, w), UndefinedValueError);
    mape.policy = UndefinedPolicy::SkipAndCount;
    const auto r = evaluate(mape, w);
    CHECK(r.n_undefined == 2);
    CHECK(r.n_used == 3);
    CHECK(*r.value == Approx((50.0 + 75.0 + 0.0) / 3));
}

TEST_CASE("per-series breakdown") {
    const std::vector<core::Window> w{win({1, 2}, {0, 0}, {}, {1, 2}, "a"), win({4}, {0}, {}, {1, 2}, "b")};
    const auto r = evaluate(measure_spec("MAE"), w);
    REQUIRE(r.per_series.size() == 2);
    CHECK(r.per_series[0].first == "a@2");
    CHECK(*r.per_series[0].second == 1.5);
    CHECK(*r.per_series[1].second == 4.0);
    CHECK(*r.value == Approx(7.0 / 3));
}

TEST_CASE("sMAPE bound, swap symmetry and MAPE asymmetry") {
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 2000; ++i) {
        const double y = u(g), f = u(g);
        const double s = value("sMAPE", {win({y}, {f})});
        CHECK(s >= 0.0);
        CHECK(s <= 200.0);
        if (y > 0 && f > 0) {
            CHECK(s == Approx(value("sMAPE", {win({f}, {y})})).epsilon(1e-14));
            CHECK(value("RMSLE", {win({y}, {f})}) == Approx(value("RMSLE", {win({f}, {y})})).epsilon(1e-14));
            if (y != f) CHECK(value("MAPE", {win({y}, {f})}) != value("MAPE", {win({f}, {y})}));
        }
    }
}

TEST_CASE("oracle equivalence on degenerate frames under skip") {
    std::mt19937_64 g(2024);
    testsupport::FrameShape shape;
    shape.degenerate = 0.2;
    testsupport::oracle::Options opt;
    opt.skip = true;
    for (int rep = 0; rep < 200; ++rep) {
        const auto raw = testsupport::random_frame(g, shape);
        const auto frame = testsupport::to_frame(raw);
        const auto wins = frame.windows("model", "bench");
        for (const auto& spec : registry()) {
            auto s = spec;
            s.policy = UndefinedPolicy::SkipAndCount;
            const auto got = evaluate(s, wins).value;
            const auto want = testsupport::oracle::evaluate(spec.name, raw, opt);
            REQUIRE_MESSAGE(got.has_value() == want.has_value(), spec.name);
            if (got) CHECK_MESSAGE(*got == Approx(*want).epsilon(1e-12).scale(1e-3), spec.name);
        }
    }
}
