#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fceval/error.hpp"
#include "fceval/random.hpp"
#include "fceval/stats.hpp"
#include "fceval/synth.hpp"

using namespace fceval;
using namespace fceval::synth;

namespace {

DgpSpec spec(DgpKind k, std::size_t n, std::uint64_t seed = 1) {
    DgpSpec s;
    s.kind = k;
    s.length = n;
    s.seed = seed;
    return s;
}

std::vector<double> values(const core::TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

double lag1_autocorr(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double num = 0, den = 0;
    for (std::size_t t = 0; t < v.size(); ++t) den += (v[t] - m) * (v[t] - m);
    for (std::size_t t = 1; t < v.size(); ++t) num += (v[t] - m) * (v[t - 1] - m);
    return num / den;
}

}  // namespace

TEST_CASE("random walk") {
    auto s = spec(DgpKind::RandomWalk, 50);
    s.noise_sd = 0.0;
    s.level = 3.0;
    for (double v : values(generate(s))) CHECK(v == 3.0);
    s.noise_sd = 1.0;
    CHECK(values(generate(s)) == values(generate(s)));
    auto other = s;
    other.seed = 2;
    CHECK(values(generate(s)) != values(generate(other)));
    CHECK(generate(s).size() == 50);
}

TEST_CASE("random-walk increments show no autocorrelation at the nominal rate") {
    int rejects = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        const auto y = values(generate(spec(DgpKind::RandomWalk, 301, derive_seed(77, r))));
        std::vector<double> d;
        for (std::size_t t = 1; t < y.size(); ++t) d.push_back(y[t] - y[t - 1]);
        if (stats::ljung_box(d, 10).reject) ++rejects;
    }
    const double rate = static_cast<double>(rejects) / reps;
    CHECK(rate > 0.02);
    CHECK(rate < 0.09);
}

TEST_CASE("intermittent zero fraction") {
    auto s = spec(DgpKind::Intermittent, 10000, 5);
    s.zero_probability = 0.7;
    const auto v = values(generate(s));
    const double zeros = static_cast<double>(std::count(v.begin(), v.end(), 0.0)) / v.size();
    CHECK(zeros == doctest::Approx(0.70).epsilon(0.02 / 0.70));
    for (double x : v) CHECK((x == 0.0 || x >= 1.0));
}

TEST_CASE("AR(1) sample autocorrelation") {
    for (double phi : {-0.8, 0.5, 0.9}) {
        auto s = spec(DgpKind::Ar, 10000, 9);
        s.ar = {phi};
        CHECK(lag1_autocorr(values(generate(s))) == doctest::Approx(phi).epsilon(0.05 / std::abs(phi)));
    }
}

TEST_CASE("AR stationarity gate") {
    CHECK(ar_stationary({0.5}));
    CHECK(ar_stationary({0.5, 0.3}));
    CHECK_FALSE(ar_stationary({1.0}));
    CHECK_FALSE(ar_stationary({0.6, 0.5}));
    auto s = spec(DgpKind::Ar, 100);
    s.ar = {1.0};
    CHECK_THROWS_AS(generate(s), ConfigError);
    s.unit_root = true;
    CHECK_NOTHROW(generate(s));
    auto rw = spec(DgpKind::RandomWalk, 10);
    rw.unit_root = true;
    CHECK_THROWS_AS(rw.validate(), ConfigError);
}

TEST_CASE("structural break shifts the mean") {
    auto s = spec(DgpKind::StructuralBreak, 2000, 3);
    s.break_index = 1001;
    s.shift = 5.0;
    s.noise_sd = 1.0;
    const auto v = values(generate(s));
    const double before = std::accumulate(v.begin(), v.begin() + 1000, 0.0) / 1000;
    const double after = std::accumulate(v.begin() + 1000, v.end(), 0.0) / 1000;
    CHECK(after - before == doctest::Approx(5.0).epsilon(0.2 / 5.0));
}

TEST_CASE("trend, seasonal and heteroscedastic kinds") {
    auto lin = spec(DgpKind::LinearTrend, 100);
    lin.slope = 2.0;
    lin.noise_sd = 0.0;
    const auto l = values(generate(lin));
    for (std::size_t t = 1; t < l.size(); ++t) CHECK(l[t] - l[t - 1] == doctest::Approx(2.0));

    auto ex = spec(DgpKind::ExponentialTrend, 50);
    ex.rate = 0.1;
    ex.noise_sd = 0.0;
    const auto e = values(generate(ex));
    for (std::size_t t = 1; t < e.size(); ++t) CHECK(e[t] / e[t - 1] == doctest::Approx(std::exp(0.1)));

    auto se = spec(DgpKind::Seasonal, 48);
    se.period = 12;
    se.amplitude = 3.0;
    se.noise_sd = 0.0;
    const auto sv = values(generate(se));
    for (std::size_t t = 12; t < sv.size(); ++t) CHECK(sv[t] == doctest::Approx(sv[t - 12]));

    auto he = spec(DgpKind::Heteroscedastic, 4000, 4);
    he.sd_growth = 3.0;
    const auto hv = values(generate(he));
    auto sd = [](auto b, auto e) {
        const double n = static_cast<double>(e - b);
        const double m = std::accumulate(b, e, 0.0) / n;
        double acc = 0;
        for (auto it = b; it != e; ++it) acc += (*it - m) * (*it - m);
        return std::sqrt(acc / n);
    };
    CHECK(sd(hv.end() - 500, hv.end()) > 2.5 * sd(hv.begin(), hv.begin() + 500));

    auto comp = spec(DgpKind::Composite, 48);
    comp.components = {lin, se};
    comp.components[0].length = 48;
    comp.noise_sd = 0.0;
    const auto cv = values(generate(comp));
    const auto lv = values(generate(comp.components[0]));
    const auto sv2 = values(generate(comp.components[1]));
    for (std::size_t t = 0; t < cv.size(); ++t) CHECK(cv[t] == doctest::Approx(lv[t] + sv2[t]));
}

TEST_CASE("spec validation") {
    auto s = spec(DgpKind::RandomWalk, 0);
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.length = 10;
    s.noise_sd = -1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    auto z = spec(DgpKind::Intermittent, 10);
    z.zero_probability = 1.5;
    CHECK_THROWS_AS(z.validate(), ConfigError);
    auto b = spec(DgpKind::StructuralBreak, 10);
    b.break_index = 11;
    CHECK_THROWS_AS(b.validate(), ConfigError);
    CHECK(parse_kind("random-walk") == DgpKind::RandomWalk);
    CHECK_FALSE(parse_kind("garch"));
}

TEST_CASE("student-t noise is heavier tailed") {
    auto g = spec(DgpKind::Ar, 20000, 6);
    g.ar = {0.0};
    auto t = g;
    t.noise = Noise::StudentT;
    t.t_df = 3.0;
    auto kurt = [](const std::vector<double>& v) {
        const double n = static_cast<double>(v.size());
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double m2 = 0, m4 = 0;
        for (double x : v) m2 += std::pow(x - m, 2), m4 += std::pow(x - m, 4);
        return (m4 / n) / std::pow(m2 / n, 2);
    };
    CHECK(kurt(values(generate(t))) > kurt(values(generate(g))) + 1.0);
}

TEST_CASE("outlier injection") {
    const auto base = core::TimeSeries::from_values("s", {1, 2, 3, 4, 5});
    auto same = inject_outliers(base, {}, 1);
    CHECK(values(same.series) == values(base));
    CHECK(same.log.empty());

    OutlierInjection one;
    one.indices = {2};
    one.magnitude = 10.0;
    auto r = inject_outliers(base, one, 1);
    const auto v = values(r.series);
    CHECK(v[2] == 30.0);
    int changed = 0;
    for (std::size_t i = 0; i < v.size(); ++i) changed += v[i] != base.values()[i];
    CHECK(changed == 1);
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].before == 3.0);
    CHECK(base.values()[2] == 3.0);

    one.direction = Direction::Low;
    CHECK(values(inject_outliers(base, one, 1).series)[2] == doctest::Approx(0.3));
    one.indices = {5};
    CHECK_THROWS_AS(inject_outliers(base, one, 1), DomainError);

    OutlierInjection rate;
    rate.rate = 0.5;
    rate.mode = MagnitudeMode::Add;
    rate.magnitude = 100;
    const auto big = core::TimeSeries::from_values("b", std::vector<double>(1000, 0.0));
    const auto rr = inject_outliers(big, rate, 4);
    CHECK(rr.log.size() > 400);
    CHECK(rr.log.size() < 600);
}

TEST_CASE("low outlier before the origin inflates naive errors") {
    std::vector<double> y(40, 100.0);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += (i % 3);
    const auto s = core::TimeSeries::from_values("s", y);
    OutlierInjection o;
    o.indices = {29};
    o.magnitude = 10;
    o.direction = Direction::Low;
    const auto inj = inject_outliers(s, o, 1).series;
    auto naive_mae = [&](const core::TimeSeries& x) {
        const auto f = core::naive_forecast(x, 30, 10);
        double acc = 0;
        for (std::size_t k = 0; k < 10; ++k) acc += std::abs(x.at(31 + k) - f[k]);
        return acc / 10;
    };
    CHECK(naive_mae(inj) > 10 * naive_mae(s));
}

TEST_CASE("derive_seed") {
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 7) == derive_seed(42, 7));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == 10000);
}

TEST_CASE("series csv export") {
    const auto s = core::TimeSeries::from_values("a", {1.5, 2});
    const auto csv = series_to_csv(s);
    CHECK(csv.rfind("series_id,timestamp,value", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
