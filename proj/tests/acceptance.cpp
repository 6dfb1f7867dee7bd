// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fceval/advisor.hpp"
#include "fceval/arfit.hpp"
#include "fceval/core.hpp"
#include "fceval/measures.hpp"
#include "fceval/partition.hpp"
#include "fceval/pitfalls.hpp"
#include "fceval/random.hpp"
#include "fceval/stats.hpp"
#include "fceval/synth.hpp"
#include "support/golden.hpp"
#include "support/oracle.hpp"
#include "support/random_frames.hpp"
#include "support/srange.hpp"

using namespace fceval;

namespace {

// Pinned tolerances and sizes.
constexpr std::size_t kSmapePairs = 100000;
constexpr double kMaapeTol = 1e-12;
constexpr std::size_t kMaseSeries = 1000;
constexpr double kMaseTol = 1e-12;
constexpr std::size_t kOracleFrames = 1000;
constexpr double kOracleRelTol = 1e-12;
constexpr std::size_t kScaleCases = 10000;
constexpr double kScaleRelTol = 1e-9;
constexpr std::size_t kEmbedMaxN = 200;
constexpr std::size_t kLeakCases = 10000;
constexpr std::size_t kCvReps = 500;
constexpr std::size_t kCvLength = 200;
constexpr std::size_t kCvFolds = 5;
constexpr std::size_t kOosLength = 10000;
constexpr double kCvRelTol = 0.05;
constexpr double kLbPower = 0.8;
constexpr std::size_t kLbLags = 10;
constexpr std::size_t kRwReps = 200;
constexpr std::size_t kRwLength = 1000;
constexpr std::size_t kRwHorizon = 10;
constexpr std::size_t kSizeReps = 5000;
constexpr double kSizeLo = 0.03, kSizeHi = 0.07;
constexpr double kCdTol = 1e-6;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool rel_close(double got, double want, double tol) {
    if (got == want) return true;
    return std::abs(got - want) <= tol * std::max(std::abs(got), std::abs(want));
}

core::Window window(std::vector<double> actual, std::vector<double> forecast, std::vector<double> train = {1.0, 2.0}) {
    core::Window w;
    w.series_id = "s";
    w.origin = static_cast<std::int64_t>(train.size());
    w.actual = std::move(actual);
    w.forecast = std::move(forecast);
    w.train = std::move(train);
    return w;
}

std::optional<double> measure(const std::string& name, const std::vector<core::Window>& w) {
    return measures::evaluate(measures::measure_spec(name), w).value;
}

// 1 ---------------------------------------------------------------------------
Outcome smape_boundary() {
    bool ok = true;
    for (double f : {0.001, 1.0, 37.5, 1e9}) ok = ok && measure("sMAPE", {window({0.0}, {f})}) == 200.0;
    std::mt19937_64 g(kSeed);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::size_t out_of_range = 0, evaluated = 0;
    for (std::size_t i = 0; i < kSmapePairs; ++i) {
        double y = u(g), f = u(g);
        if (i % 10 == 0) y = 0.0;
        if (i % 17 == 0) f = 0.0;
        if (y == 0.0 && f == 0.0) continue;
        const auto v = measure("sMAPE", {window({y}, {f})});
        ++evaluated;
        if (!v || *v < 0.0 || *v > 200.0) ++out_of_range;
    }
    return {ok && out_of_range == 0, fmt("y=0 gives 200 exactly: %s; %zu/%zu pairs outside [0,200]", ok ? "yes" : "no",
                                         out_of_range, evaluated)};
}

// 2 ---------------------------------------------------------------------------
Outcome maape_boundary() {
    double worst = 0.0;
    for (double f : {-5.0, 1e-6, 2.0, 1e12}) {
        const auto v = measure("MAAPE", {window({0.0}, {f})});
        worst = std::max(worst, v ? std::abs(*v - std::numbers::pi / 2) : 1.0);
    }
    return {worst <= kMaapeTol, fmt("max |term - pi/2| = %.3g", worst)};
}

// 3 ---------------------------------------------------------------------------
Outcome msmape_floor() {
    bool ok = true;
    std::mt19937_64 g(kSeed + 3);
    std::uniform_real_distribution<double> u(0.0, 0.25);
    for (int i = 0; i < 1000; ++i) {
        const double y = u(g), f = u(g);
        if (y == f) continue;
        const auto r = measures::evaluate(measures::measure_spec("msMAPE"), std::vector{window({y}, {f})});
        // Winsorised denominator: the term times 0.6 recovers 200 |e|.
        const double denom = 200.0 * std::abs(y - f) / *r.value;
        ok = ok && rel_close(denom, 0.6, 1e-15) && r.flags.count("winsorised") == 1;
    }
    const double edge = *measure("msMAPE", {window({0.25}, {-0.25})});
    ok = ok && edge == 200.0 * 0.5 / 0.6;
    return {ok, fmt("denominator 0.6 on 1000 winsorised pairs, edge |y|+|f|=0.5 term %.15g", edge)};
}

// 4 ---------------------------------------------------------------------------
Outcome mase_self() {
    std::mt19937_64 g(kSeed + 4);
    std::uniform_int_distribution<std::size_t> len(3, 60);
    std::normal_distribution<double> z(0.0, 5.0);
    double worst = 0.0;
    std::size_t done = 0;
    while (done < kMaseSeries) {
        std::vector<double> y(len(g));
        for (auto& v : y) v = z(g);
        std::vector<double> actual(y.begin() + 1, y.end()), forecast(y.begin(), y.end() - 1);
        auto w = window(actual, forecast, y);
        const auto v = measure("MASE", {w});
        if (!v) continue;  // constant series
        worst = std::max(worst, std::abs(*v - 1.0));
        ++done;
    }
    return {worst <= kMaseTol, fmt("max |MASE - 1| = %.3g over %zu series", worst, done)};
}

// 5 ---------------------------------------------------------------------------
Outcome oracle_match() {
    std::mt19937_64 g(kSeed + 5);
    double worst = 0.0;
    std::string worst_name;
    std::size_t mismatched_definedness = 0, compared = 0;
    for (std::size_t rep = 0; rep < kOracleFrames; ++rep) {
        const auto raw = testsupport::random_frame(g);
        const auto frame = testsupport::to_frame(raw);
        const auto wins = frame.windows("model", "bench");
        for (const auto& spec : measures::registry()) {
            const auto got = measures::evaluate(spec, wins).value;
            const auto want = testsupport::oracle::evaluate(spec.name, raw);
            if (got.has_value() != want.has_value()) {
                ++mismatched_definedness;
                continue;
            }
            if (!got) continue;
            ++compared;
            const double scale = std::max(std::abs(*got), std::abs(*want));
            const double rel = scale == 0.0 ? 0.0 : std::abs(*got - *want) / scale;
            if (rel > worst) worst = rel, worst_name = spec.name;
        }
    }
    return {worst <= kOracleRelTol && mismatched_definedness == 0,
            fmt("%zu measures x %zu frames, %zu values compared, max rel diff %.3g (%s), definedness mismatches %zu",
                measures::registry().size(), kOracleFrames, compared, worst, worst_name.c_str(), mismatched_definedness)};
}

// 6 ---------------------------------------------------------------------------
Outcome scale_equivariance() {
    std::mt19937_64 g(kSeed + 6);
    std::uniform_real_distribution<double> logalpha(std::log(1e-3), std::log(1e3));
    const std::vector<std::string> equivariant{"MAE", "RMSE", "ME"};
    const std::vector<std::string> invariant{"MAPE", "sMAPE", "MASE", "WAPE", "MRAE", "RelMAE", "CORR"};
    std::size_t failures = 0;
    std::string first;
    auto per_series_mae = [](const std::vector<core::Window>& w, bool bench) {
        std::vector<double> out;
        for (const auto& x : w) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.horizon(); ++k) s += std::abs(x.actual[k] - (bench ? x.benchmark[k] : x.forecast[k]));
            out.push_back(s / static_cast<double>(x.horizon()));
        }
        return out;
    };
    for (std::size_t rep = 0; rep < kScaleCases; ++rep) {
        const auto raw = testsupport::random_frame(g);
        const double alpha = std::exp(logalpha(g));
        const auto a = testsupport::to_frame(raw).windows("model", "bench");
        const auto b = testsupport::to_frame(testsupport::scaled(raw, alpha)).windows("model", "bench");
        auto fail = [&](const std::string& what) {
            if (failures++ == 0) first = what + fmt(" (case %zu, alpha %.4g)", rep, alpha);
        };
        for (const auto& m : equivariant) {
            const auto x = measure(m, a), y = measure(m, b);
            if (x.has_value() != y.has_value() || (x && !rel_close(*y, alpha * *x, kScaleRelTol))) fail(m);
        }
        for (const auto& m : invariant) {
            const auto x = measure(m, a), y = measure(m, b);
            if (x.has_value() != y.has_value() || (x && !rel_close(*y, *x, kScaleRelTol) && std::abs(*y - *x) > 1e-12)) fail(m);
        }
        const auto ra = measures::rank_models({{"model", per_series_mae(a, false)}, {"bench", per_series_mae(a, true)}});
        const auto rb = measures::rank_models({{"model", per_series_mae(b, false)}, {"bench", per_series_mae(b, true)}});
        if (ra.ranks != rb.ranks) fail("ranks");
    }
    return {failures == 0, fmt("%zu cases, %zu violations%s%s", kScaleCases, failures, failures ? ", first " : "",
                               first.c_str())};
}

// 7 ---------------------------------------------------------------------------
Outcome embed_counts() {
    std::size_t bad = 0, checked = 0;
    for (std::size_t n = 2; n <= kEmbedMaxN; ++n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
        const auto s = core::TimeSeries::from_values("e", v);
        for (std::size_t p = 1; p < n; ++p) {
            const auto m = core::embed(s, p);
            ++checked;
            bool ok = m.rows() == n - p;
            for (std::size_t r = 0; ok && r < m.rows(); ++r) {
                const auto lags = m.predictors(r);
                for (std::size_t j = 0; j < p; ++j) ok = ok && lags[j] == static_cast<double>(r + j);
                ok = ok && m.target(r) == static_cast<double>(r + p);
            }
            bad += !ok;
        }
    }
    return {bad == 0, fmt("%zu (n,p) pairs, %zu wrong", checked, bad)};
}

// 8 ---------------------------------------------------------------------------
Outcome leakage_guard() {
    std::mt19937_64 g(kSeed + 8);
    std::size_t folds = 0, leaking = 0, mutations = 0, missed = 0;
    for (std::size_t c = 0; c < kLeakCases; ++c) {
        const std::size_t n = 11 + g() % 190;
        partition::SplitSpec s;
        s.scheme = g() % 4 == 0 ? partition::Scheme::FixedOrigin : partition::Scheme::RollingOrigin;
        s.horizon = 1 + g() % 10;
        s.initial_train = 1 + g() % (n - s.horizon);
        s.stride = 1 + g() % 5;
        if (g() % 2) {
            s.window = partition::WindowKind::Rolling;
            s.window_length = 1 + g() % s.initial_train;
        }
        std::vector<double> v(n, 1.0);
        const auto series = core::TimeSeries::from_values("l", v);
        for (const auto& f : partition::make_splits(series, s)) {
            ++folds;
            const bool clean = *std::max_element(f.train.begin(), f.train.end()) < *std::min_element(f.test.begin(), f.test.end());
            if (!clean || !partition::leakage_check(f, true).passed) ++leaking;
            // Mutations: a test index copied into train, or a later index appended.
            auto dup = f;
            dup.train.push_back(f.test[g() % f.test.size()]);
            auto late = f;
            late.train.push_back(f.test.back() + 1 + g() % 3);
            for (const auto* m : {&dup, &late}) {
                ++mutations;
                if (partition::leakage_check(*m, true).passed) ++missed;
            }
        }
    }
    return {leaking == 0 && missed == 0,
            fmt("%zu folds from %zu specs, %zu leaking; %zu mutations, %zu missed", folds, kLeakCases, leaking, mutations,
                missed)};
}

// 9 ---------------------------------------------------------------------------
struct CvRun {
    double cv_rmse;
    double oos_rmse;
    bool lb_reject;
};

CvRun cv_once(std::uint64_t seed, std::size_t order) {
    synth::DgpSpec d;
    d.kind = synth::DgpKind::Ar;
    d.ar = {0.5, 0.3};
    d.length = kCvLength + kOosLength;
    d.seed = seed;
    const auto full = synth::generate(d);
    const auto all = full.values();
    std::vector<double> head(all.begin(), all.begin() + kCvLength);
    const auto series = core::TimeSeries::from_values("cv", head);
    const auto m = core::embed(series, order);

    std::vector<double> residual(m.rows(), 0.0);
    double sse = 0.0;
    for (const auto& fold : partition::kfold_splits(m, kCvFolds, derive_seed(seed, 1))) {
        const auto model = arfit::fit(m, fold.train, true);
        for (auto row : fold.test) {
            residual[row] = m.target(row) - arfit::predict(model, m.predictors(row));
            sse += residual[row] * residual[row];
        }
    }
    const double cv = std::sqrt(sse / static_cast<double>(m.rows()));

    const auto model = arfit::fit(m, {}, true);
    double oos = 0.0;
    for (std::size_t t = kCvLength; t < all.size(); ++t) {
        const double e = all[t] - arfit::predict(model, std::span<const double>(all.data() + t - order, order));
        oos += e * e;
    }
    oos = std::sqrt(oos / static_cast<double>(kOosLength));
    return {cv, oos, stats::ljung_box(residual, kLbLags, order).reject};
}

Outcome kfold_validity() {
    double rel_sum = 0.0, cv1 = 0.0, oos1 = 0.0;
    std::size_t rejects = 0;
    for (std::size_t r = 0; r < kCvReps; ++r) {
        const auto good = cv_once(derive_seed(kSeed + 9, r), 2);
        rel_sum += std::abs(good.cv_rmse - good.oos_rmse) / good.oos_rmse;
        const auto under = cv_once(derive_seed(kSeed + 9, r), 1);
        cv1 += under.cv_rmse;
        oos1 += under.oos_rmse;
        rejects += under.lb_reject;
    }
    const double mean_rel = rel_sum / kCvReps;
    const double power = static_cast<double>(rejects) / kCvReps;
    const bool under_est = cv1 < oos1;
    return {mean_rel < kCvRelTol && under_est && power > kLbPower,
            fmt("AR(2): mean |CV-OOS|/OOS = %.4f (< %.2f); AR(1): mean CV %.4f vs OOS %.4f (%s), LB power %.3f (> %.1f)",
                mean_rel, kCvRelTol, cv1 / kCvReps, oos1 / kCvReps, under_est ? "under" : "not under", power, kLbPower)};
}

// 10 --------------------------------------------------------------------------
Outcome naive_optimality() {
    double naive = 0.0, ar = 0.0;
    for (std::size_t r = 0; r < kRwReps; ++r) {
        synth::DgpSpec d;
        d.kind = synth::DgpKind::RandomWalk;
        d.length = kRwLength;
        d.seed = derive_seed(kSeed + 10, r);
        const auto walk = synth::generate(d);
        const auto y = walk.values();
        const std::size_t origin = kRwLength - kRwHorizon;
        std::span<const double> train(y.data(), origin);
        const auto model = arfit::fit(train, 1, true);
        const auto fa = arfit::forecast(model, train, kRwHorizon);
        double sn = 0.0, sa = 0.0;
        for (std::size_t k = 0; k < kRwHorizon; ++k) {
            sn += std::pow(y[origin + k] - y[origin - 1], 2);
            sa += std::pow(y[origin + k] - fa[k], 2);
        }
        naive += sn / kRwHorizon;
        ar += sa / kRwHorizon;
    }
    naive /= kRwReps;
    ar /= kRwReps;
    return {naive <= ar, fmt("mean MSE naive %.4f vs AR(1)+intercept %.4f", naive, ar)};
}

// 11 --------------------------------------------------------------------------
Outcome calibration() {
    std::mt19937_64 g(kSeed + 11);
    std::normal_distribution<double> z;
    auto draw = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = z(g);
        return v;
    };
    std::map<std::string, std::size_t> rejects;
    for (std::size_t r = 0; r < kSizeReps; ++r) {
        rejects["ljung-box"] += stats::ljung_box(draw(500), kLbLags).reject;
        const auto a = draw(200), b = draw(200);
        rejects["diebold-mariano"] += stats::diebold_mariano(a, b).reject;
        rejects["wilcoxon"] += stats::wilcoxon_rank_sum(draw(40), draw(40)).reject;
        std::map<std::string, std::vector<double>> scores;
        for (const char* m : {"A", "B", "C", "D"}) scores[m] = draw(50);
        rejects["friedman"] += stats::friedman(measures::rank_models(scores)).reject;
    }
    bool ok = true;
    std::string detail;
    for (const auto& [name, n] : rejects) {
        const double rate = static_cast<double>(n) / kSizeReps;
        ok = ok && rate >= kSizeLo && rate <= kSizeHi;
        detail += fmt("%s%s %.4f", detail.empty() ? "" : ", ", name.c_str(), rate);
    }
    return {ok, detail + fmt(" (band [%.2f, %.2f])", kSizeLo, kSizeHi)};
}

// 12 --------------------------------------------------------------------------
Outcome nemenyi_scaling() {
    bool halves = true;
    double worst = 0.0;
    for (std::size_t k : {3u, 5u, 10u}) {
        for (double alpha : {0.05, 0.10}) {
            const double q = testsupport::studentized_range_quantile(k, alpha) / std::sqrt(2.0);
            for (std::size_t n : {5u, 10u, 24u, 100u, 333u}) {
                const double cd = stats::critical_distance(k, n, alpha);
                halves = halves && stats::critical_distance(k, 4 * n, alpha) == cd / 2.0;
                const double want = q * std::sqrt(static_cast<double>(k * (k + 1)) / (6.0 * static_cast<double>(n)));
                worst = std::max(worst, std::abs(cd - want));
            }
        }
    }
    return {halves && worst <= kCdTol,
            fmt("CD(4N) == CD(N)/2: %s; max |CD - quadrature CD| = %.3g", halves ? "exact" : "no", worst)};
}

// 13 --------------------------------------------------------------------------
Outcome advisor_fidelity() {
    const auto golden = testsupport::read_golden(FCEVAL_TEST_DATA "/checklist_golden.txt");
    const auto& table = advisor::builtin_rule_table();
    std::size_t wrong = 0;
    bool rows_ok = golden.size() == 20 && table.rows.size() == golden.size();
    for (std::size_t i = 0; rows_ok && i < golden.size(); ++i) {
        rows_ok = table.rows[i].row == golden[i].row;
        for (std::size_t c = 0; c < advisor::kColumns; ++c) {
            const auto p = testsupport::single_column_profile(static_cast<advisor::Column>(c));
            wrong += table.rows[i].marks[c] != golden[i].marks[c];
            wrong += advisor::verdict_for(p, table.rows[i]) != std::max(golden[i].marks[0], golden[i].marks[c]);
        }
    }
    auto lb = [](double p) {
        stats::TestResult r;
        r.test = "ljung-box";
        r.p_value = p;
        r.reject = p < 0.05;
        return r;
    };
    std::size_t advisories = 0;
    for (auto mc : {advisor::ModelClass::PureAr, advisor::ModelClass::Stateful, advisor::ModelClass::Unknown})
        advisories += advisor::recommend_partitioning({5000}, mc).scheme == "rolling-origin" ? 1 : 0;
    const bool long_ok = advisories == 3;
    const bool kfold_ok = advisor::recommend_partitioning({60}, advisor::ModelClass::PureAr, lb(0.4)).scheme == "kfold";
    const bool improve_ok =
        advisor::recommend_partitioning({60}, advisor::ModelClass::PureAr, lb(0.001)).scheme == "improve-model";
    return {rows_ok && wrong == 0 && long_ok && kfold_ok && improve_ok,
            fmt("%zu golden rows, %zu mark mismatches; advisories long/kfold/improve: %s/%s/%s", golden.size(), wrong,
                long_ok ? "ok" : "wrong", kfold_ok ? "ok" : "wrong", improve_ok ? "ok" : "wrong")};
}

// 14 --------------------------------------------------------------------------
Outcome pitfall_suite() {
    std::size_t failed = 0;
    std::string names;
    for (const auto& s : pitfalls::list_scenarios()) {
        const auto a = pitfalls::run_scenario(s.name, kSeed);
        const auto b = pitfalls::run_scenario(s.name, kSeed);
        if (!a.passed || a.values != b.values) {
            ++failed;
            names += " " + s.name;
        }
    }
    return {failed == 0, fmt("%zu scenarios, %zu failing%s", pitfalls::list_scenarios().size(), failed, names.c_str())};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"sMAPE boundary and range", smape_boundary},
        {"MAAPE boundary", maape_boundary},
        {"msMAPE winsorised denominator", msmape_floor},
        {"MASE self-consistency", mase_self},
        {"oracle equivalence", oracle_match},
        {"scale equivariance and invariance", scale_equivariance},
        {"embedding row count", embed_counts},
        {"leakage guard", leakage_guard},
        {"k-fold validity for AR models", kfold_validity},
        {"naive optimality on random walks", naive_optimality},
        {"test size calibration", calibration},
        {"Nemenyi critical distance", nemenyi_scaling},
        {"advisor fidelity", advisor_fidelity},
        {"pitfall suite", pitfall_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
