#include "fceval/pitfalls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "fceval/arfit.hpp"
#include "fceval/core.hpp"
#include "fceval/error.hpp"
#include "fceval/measures.hpp"
#include "fceval/random.hpp"
#include "fceval/synth.hpp"
#include "io_format.hpp"

namespace fceval::pitfalls {

namespace {

using core::Window;
using Values = std::vector<double>;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Run {
    ScenarioResult result;
    std::ostringstream plot;

    void record(const std::string& key, double v) { result.values.emplace_back(key, v); }

    void plot_window(const Window& w, const std::string& model) {
        const auto base = static_cast<std::size_t>(w.origin);
        for (std::size_t k = 0; k < w.horizon(); ++k) {
            plot << w.series_id << ',' << base + k + 1 << ',' << io::format_double(w.actual[k]) << ',' << model
                 << ',' << io::format_double(w.forecast[k]) << '\n';
        }
    }
};

double measure(const std::string& name, const std::vector<Window>& windows) {
    const auto r = measures::evaluate(measures::measure_spec(name), windows);
    return r.value.value_or(kNan);
}

Values slice(std::span<const double> v, std::size_t from, std::size_t to) {
    return Values(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to));
}

/// Window on positions [origin, origin + h) of `y` with the given forecasts.
Window window_at(const std::string& id, std::span<const double> y, std::size_t origin, Values forecast,
                 Values benchmark = {}) {
    Window w;
    w.series_id = id;
    w.origin = static_cast<std::int64_t>(origin);
    w.train = slice(y, 0, origin);
    w.actual = slice(y, origin, origin + forecast.size());
    w.forecast = std::move(forecast);
    w.benchmark = std::move(benchmark);
    return w;
}

Values normals(std::uint64_t seed, std::size_t n, double sd = 1.0) {
    Rng rng(seed);
    Values v(n);
    for (auto& x : v) x = sd * rng.normal();
    return v;
}

bool same(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// Scenarios -------------------------------------------------------------------

bool naive_optimality(Run& run, std::uint64_t seed) {
    constexpr std::size_t kSeries = 200, kLength = 1000, kH = 10;
    double mse_naive = 0.0, mse_ar = 0.0;
    std::size_t naive_wins = 0;
    for (std::size_t i = 0; i < kSeries; ++i) {
        synth::DgpSpec spec;
        spec.kind = synth::DgpKind::RandomWalk;
        spec.length = kLength;
        spec.seed = derive_seed(seed, i);
        spec.id = "rw" + std::to_string(i + 1);
        const auto s = synth::generate(spec);
        const auto y = s.values();
        const std::size_t origin = kLength - kH;
        const auto history = y.first(origin);
        const auto model = arfit::fit(history, 1, true);
        const std::vector<Window> naive{window_at(s.id(), y, origin, Values(kH, y[origin - 1]))};
        const std::vector<Window> ar{window_at(s.id(), y, origin, arfit::forecast(model, history, kH))};
        const double a = measure("MSE", naive), b = measure("MSE", ar);
        mse_naive += a;
        mse_ar += b;
        if (a <= b) ++naive_wins;
        if (i == 0) {
            run.plot_window(naive.front(), "naive");
            run.plot_window(ar.front(), "ar1_levels");
        }
    }
    mse_naive /= kSeries;
    mse_ar /= kSeries;
    run.record("series", kSeries);
    run.record("mean_mse_naive", mse_naive);
    run.record("mean_mse_ar_levels", mse_ar);
    run.record("naive_win_fraction", static_cast<double>(naive_wins) / kSeries);
    return mse_naive <= mse_ar;
}

/// Two models on a strongly seasonal series: A misses the peaks, B misses
/// the troughs by 90% of A's total absolute miss.
bool mape_seasonal(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::Seasonal;
    spec.length = 72;
    spec.level = 50.0;
    spec.amplitude = 40.0;
    spec.period = 12;
    spec.noise_sd = 0.5;
    spec.seed = seed;
    spec.id = "seasonal";
    const auto s = synth::generate(spec);
    const auto y = s.values();
    const std::size_t origin = 48, h = 24;
    Values a(y.begin() + origin, y.end()), b = a;
    double miss_a = 0.0, trough_gap = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        const double v = y[origin + k];
        if (v > spec.level + 0.7 * spec.amplitude) miss_a += 0.4 * (v - spec.level);
        if (v < spec.level - 0.7 * spec.amplitude) trough_gap += spec.level - v;
    }
    const double c = trough_gap > 0.0 ? 0.9 * miss_a / trough_gap : 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        const double v = y[origin + k];
        if (v > spec.level + 0.7 * spec.amplitude) a[k] = v - 0.4 * (v - spec.level);
        if (v < spec.level - 0.7 * spec.amplitude) b[k] = v + c * (spec.level - v);
    }
    const std::vector<Window> wa{window_at(s.id(), y, origin, a)}, wb{window_at(s.id(), y, origin, b)};
    run.plot_window(wa.front(), "misses_peaks");
    run.plot_window(wb.front(), "misses_troughs");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double mape_a = measure("MAPE", wa), mape_b = measure("MAPE", wb);
    run.record("MAE_misses_peaks", mae_a);
    run.record("MAE_misses_troughs", mae_b);
    run.record("MAPE_misses_peaks", mape_a);
    run.record("MAPE_misses_troughs", mape_b);
    return mae_a > mae_b && mape_a < mape_b;
}

/// Rolling one-step windows over the last `h` points with the naive
/// benchmark; the model misses each actual by `errors`.
std::vector<Window> rolling_one_step(const core::TimeSeries& s, std::size_t h, const Values& errors) {
    const auto y = s.values();
    std::vector<Window> out;
    for (std::size_t k = 0; k < h; ++k) {
        const std::size_t origin = y.size() - h + k;
        out.push_back(window_at(s.id(), y, origin, {y[origin] - errors[k]}, {y[origin - 1]}));
    }
    return out;
}

/// Series A flips sign every step (AR with a large negative coefficient);
/// series B is a smooth, low-variance AR. The model's misses on A are 10%
/// larger than on B, yet the naive benchmark is so poor on A that MRAE
/// ranks A far better.
bool mrae_negative_ar(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::Ar;
    spec.length = 300;
    spec.level = 50.0;
    spec.ar = {-0.8};
    spec.noise_sd = 1.0;
    spec.seed = derive_seed(seed, 0);
    spec.id = "A";
    const auto sa = synth::generate(spec);
    spec.ar = {0.8};
    spec.noise_sd = 0.2;
    spec.seed = derive_seed(seed, 1);
    spec.id = "B";
    const auto sb = synth::generate(spec);
    const std::size_t h = 100;
    const Values z = normals(derive_seed(seed, 2), h, 0.5);
    Values za(h);
    std::transform(z.begin(), z.end(), za.begin(), [](double v) { return 1.1 * v; });
    const auto wa = rolling_one_step(sa, h, za), wb = rolling_one_step(sb, h, z);
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double mrae_a = measure("MRAE", wa), mrae_b = measure("MRAE", wb);
    run.record("MAE_A", mae_a);
    run.record("MAE_B", mae_b);
    run.record("MRAE_A", mrae_a);
    run.record("MRAE_B", mrae_b);
    run.record("MdRAE_A", measure("MdRAE", wa));
    run.record("MdRAE_B", measure("MdRAE", wb));
    for (std::size_t k = 0; k < 20; ++k) {
        run.plot_window(wa[k], "model");
        run.plot_window(wb[k], "model");
    }
    return mae_a > mae_b && mrae_a < mrae_b;
}

/// Linear-trend series A and flat series B share the noise draws and the
/// model's per-step misses. The fixed-origin naive benchmark drifts away on A.
bool mrae_trend(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::LinearTrend;
    spec.length = 80;
    spec.level = 20.0;
    spec.slope = 2.0;
    spec.seed = derive_seed(seed, 0);
    spec.id = "trended";
    const auto sa = synth::generate(spec);
    spec.slope = 0.0;
    spec.id = "flat";
    const auto sb = synth::generate(spec);
    const std::size_t origin = 60, h = 20;
    const Values u = normals(derive_seed(seed, 1), h);
    auto build = [&](const core::TimeSeries& s) {
        const auto y = s.values();
        Values f(h);
        for (std::size_t k = 0; k < h; ++k) f[k] = y[origin + k] - u[k];
        return std::vector<Window>{window_at(s.id(), y, origin, f, Values(h, y[origin - 1]))};
    };
    const auto wa = build(sa), wb = build(sb);
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double mrae_a = measure("MRAE", wa), mrae_b = measure("MRAE", wb);
    run.record("MAE_trended", mae_a);
    run.record("MAE_flat", mae_b);
    run.record("MRAE_trended", mrae_a);
    run.record("MRAE_flat", mrae_b);
    run.record("RelMAE_trended", measure("RelMAE", wa));
    run.record("RelMAE_flat", measure("RelMAE", wb));
    return same(mae_a, mae_b) && mrae_a < 0.5 * mrae_b;
}

/// The same horizon misses on an upward-trending series and on a flat one:
/// the horizon-aggregate scale shrinks the trended series' share.
bool wape_trend(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::LinearTrend;
    spec.length = 80;
    spec.level = 20.0;
    spec.slope = 3.0;
    spec.seed = derive_seed(seed, 0);
    spec.id = "trended";
    const auto sa = synth::generate(spec);
    spec.slope = 0.0;
    spec.id = "flat";
    const auto sb = synth::generate(spec);
    const std::size_t origin = 60, h = 20;
    const Values u = normals(derive_seed(seed, 1), h, 2.0);
    auto build = [&](const core::TimeSeries& s) {
        const auto y = s.values();
        Values f(h);
        for (std::size_t k = 0; k < h; ++k) f[k] = y[origin + k] - u[k];
        return std::vector<Window>{window_at(s.id(), y, origin, f)};
    };
    const auto wa = build(sa), wb = build(sb);
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double wape_a = measure("WAPE", wa), wape_b = measure("WAPE", wb);
    run.record("MAE_trended", mae_a);
    run.record("MAE_flat", mae_b);
    run.record("WAPE_trended", wape_a);
    run.record("WAPE_flat", wape_b);
    return same(mae_a, mae_b) && wape_a < 0.5 * wape_b;
}

/// On an exponential trend, one model misses the last (largest) step and the
/// other the first step, each by the same amount.
bool log_exp_trend(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::ExponentialTrend;
    spec.length = 60;
    spec.rate = 0.1;
    spec.scale = 1.0;
    spec.noise_sd = 1.0;
    spec.seed = seed;
    spec.id = "exp";
    const auto s = synth::generate(spec);
    const auto y = s.values();
    const std::size_t origin = 40, h = 20;
    const double d = 0.5 * y[origin];
    Values late(y.begin() + origin, y.end()), early = late;
    late[h - 1] -= d;
    early[0] -= d;
    const std::vector<Window> wl{window_at(s.id(), y, origin, late)}, we{window_at(s.id(), y, origin, early)};
    run.plot_window(wl.front(), "misses_late");
    run.plot_window(we.front(), "misses_early");
    const double mae_l = measure("MAE", wl), mae_e = measure("MAE", we);
    const double rmsle_l = measure("RMSLE", wl), rmsle_e = measure("RMSLE", we);
    run.record("miss", d);
    run.record("MAE_misses_late", mae_l);
    run.record("MAE_misses_early", mae_e);
    run.record("RMSE_misses_late", measure("RMSE", wl));
    run.record("RMSE_misses_early", measure("RMSE", we));
    run.record("RMSLE_misses_late", rmsle_l);
    run.record("RMSLE_misses_early", rmsle_e);
    return same(mae_l, mae_e) && rmsle_l < 0.5 * rmsle_e;
}

/// Two random-walk histories that meet at the same origin value and share
/// the horizon: B's training path is A's mirrored about the origin value,
/// so the in-sample mean differs while every horizon error is identical.
bool smae_unit_root(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::RandomWalk;
    spec.length = 120;
    spec.level = 100.0;
    spec.noise_sd = 3.0;
    spec.seed = seed;
    spec.id = "A";
    const auto sa = synth::generate(spec);
    const std::size_t origin = 100, h = 20;
    Values ya(sa.values().begin(), sa.values().end()), yb = ya;
    const double pivot = ya[origin - 1];
    for (std::size_t t = 0; t < origin; ++t) yb[t] = 2.0 * pivot - ya[t];
    const Values u = normals(derive_seed(seed, 1), h, 2.0);
    Values f(h);
    for (std::size_t k = 0; k < h; ++k) f[k] = ya[origin + k] - u[k];
    const std::vector<Window> wa{window_at("A", ya, origin, f)}, wb{window_at("B", yb, origin, f)};
    const double mean_a = std::accumulate(ya.begin(), ya.begin() + origin, 0.0) / origin;
    const double mean_b = std::accumulate(yb.begin(), yb.begin() + origin, 0.0) / origin;
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double smae_a = measure("sMAE", wa), smae_b = measure("sMAE", wb);
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    run.record("train_mean_A", mean_a);
    run.record("train_mean_B", mean_b);
    run.record("MAE_A", mae_a);
    run.record("MAE_B", mae_b);
    run.record("sMAE_A", smae_a);
    run.record("sMAE_B", smae_b);
    // Distortion direction: the lower in-sample level inflates sMAE.
    const bool direction = (mean_a < mean_b) == (smae_a > smae_b);
    const double ratio = std::max(smae_a, smae_b) / std::min(smae_a, smae_b);
    run.record("sMAE_ratio", ratio);
    return same(mae_a, mae_b) && direction && ratio > 1.05;
}

/// A heteroscedastic series whose swings widen over time. Model A misses the
/// high swings, model B the low swings with 90% of A's absolute miss.
bool mape_heteroscedastic(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::Heteroscedastic;
    spec.length = 120;
    spec.level = 40.0;
    spec.noise_sd = 1.5;
    spec.sd_growth = 4.0;
    spec.seed = seed;
    spec.id = "hetero";
    const auto s = synth::generate(spec);
    const auto y = s.values();
    const std::size_t origin = 90, h = 30;
    Values a(y.begin() + origin, y.end()), b = a;
    double miss_a = 0.0, low_gap = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        const double v = y[origin + k];
        if (v > spec.level) miss_a += v - spec.level;
        if (v < spec.level) low_gap += spec.level - v;
    }
    const double c = low_gap > 0.0 ? 0.9 * miss_a / low_gap : 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        const double v = y[origin + k];
        if (v > spec.level) a[k] = spec.level;
        if (v < spec.level) b[k] = v + c * (spec.level - v);
    }
    const std::vector<Window> wa{window_at(s.id(), y, origin, a)}, wb{window_at(s.id(), y, origin, b)};
    run.plot_window(wa.front(), "misses_highs");
    run.plot_window(wb.front(), "misses_lows");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double mape_a = measure("MAPE", wa), mape_b = measure("MAPE", wb);
    run.record("MAE_misses_highs", mae_a);
    run.record("MAE_misses_lows", mae_b);
    run.record("MAPE_misses_highs", mape_a);
    run.record("MAPE_misses_lows", mape_b);
    run.record("RMSLE_misses_highs", measure("RMSLE", wa));
    run.record("RMSLE_misses_lows", measure("RMSLE", wb));
    return mae_a > mae_b && mape_a < mape_b;
}

/// Series A drops to a lower regime halfway through the horizon; B stays.
/// Both models make one identical miss at a first-regime step.
bool wape_break_horizon(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::StructuralBreak;
    spec.length = 80;
    spec.level = 100.0;
    spec.noise_sd = 2.0;
    spec.break_index = 71;
    spec.shift = -60.0;
    spec.seed = seed;
    spec.id = "A";
    const auto sa = synth::generate(spec);
    spec.shift = 0.0;
    spec.id = "B";
    const auto sb = synth::generate(spec);
    const std::size_t origin = 60, h = 20, x = 4;
    auto build = [&](const core::TimeSeries& s) {
        const auto y = s.values();
        Values f(y.begin() + origin, y.end());
        f[x] -= 15.0;
        return std::vector<Window>{window_at(s.id(), y, origin, f)};
    };
    const auto wa = build(sa), wb = build(sb);
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double wape_a = measure("WAPE", wa), wape_b = measure("WAPE", wb);
    run.record("actual_at_miss_A", sa.values()[origin + x]);
    run.record("actual_at_miss_B", sb.values()[origin + x]);
    run.record("horizon", h);
    run.record("MAE_A", mae_a);
    run.record("MAE_B", mae_b);
    run.record("WAPE_A", wape_a);
    run.record("WAPE_B", wape_b);
    return same(sa.values()[origin + x], sb.values()[origin + x]) && same(mae_a, mae_b) && wape_a > wape_b;
}

/// Series A has a level shift inside the training region; from the shift on
/// it equals B. Horizon actuals and forecasts coincide.
bool smae_break_training(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::StructuralBreak;
    spec.length = 80;
    spec.level = 50.0;
    spec.noise_sd = 2.0;
    spec.break_index = 31;
    spec.shift = 50.0;
    spec.seed = seed;
    spec.id = "A";
    const auto sa = synth::generate(spec);
    spec.level = 100.0;
    spec.shift = 0.0;
    spec.id = "B";
    const auto sb = synth::generate(spec);
    const std::size_t origin = 60, h = 20;
    const Values u = normals(derive_seed(seed, 1), h, 3.0);
    Values f(h);
    for (std::size_t k = 0; k < h; ++k) f[k] = sb.values()[origin + k] - u[k];
    const std::vector<Window> wa{window_at("A", sa.values(), origin, f)}, wb{window_at("B", sb.values(), origin, f)};
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double smae_a = measure("sMAE", wa), smae_b = measure("sMAE", wb);
    bool horizon_equal = true;
    for (std::size_t k = 0; k < h; ++k) horizon_equal &= same(wa.front().actual[k], wb.front().actual[k]);
    run.record("MAE_A", mae_a);
    run.record("MAE_B", mae_b);
    run.record("sMAE_A", smae_a);
    run.record("sMAE_B", smae_b);
    run.record("sMSE_A", measure("sMSE", wa));
    run.record("sMSE_B", measure("sMSE", wb));
    return horizon_equal && same(mae_a, mae_b) && smae_a > smae_b;
}

/// The level jumps right after the origin. The model adapts most of the way,
/// the naive forecast not at all; the in-sample scale knows nothing of it.
bool mase_break_origin(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::StructuralBreak;
    spec.length = 80;
    spec.level = 10.0;
    spec.noise_sd = 1.0;
    spec.break_index = 61;
    spec.shift = 20.0;
    spec.seed = seed;
    spec.id = "break";
    const auto s = synth::generate(spec);
    const auto y = s.values();
    const std::size_t origin = 60, h = 20;
    Values f(h);
    for (std::size_t k = 0; k < h; ++k) f[k] = spec.level + 0.75 * spec.shift;
    const std::vector<Window> w{window_at(s.id(), y, origin, f)};
    const std::vector<Window> naive{window_at(s.id(), y, origin, Values(h, y[origin - 1]))};
    run.plot_window(w.front(), "model");
    run.plot_window(naive.front(), "naive");
    const double mase = measure("MASE", w);
    const double mae_model = measure("MAE", w), mae_naive = measure("MAE", naive);
    run.record("MASE_model", mase);
    run.record("MAE_model", mae_model);
    run.record("MAE_naive_out_of_sample", mae_naive);
    return mase > 1.0 && mae_model < mae_naive;
}

core::TimeSeries intermittent_series(std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::Intermittent;
    spec.length = 200;
    spec.zero_probability = 0.7;
    spec.demand_rate = 3.0;
    spec.seed = seed;
    spec.id = "sparse";
    return synth::generate(spec);
}

/// Constant-zero forecasts against the in-sample mean on sparse demand.
bool mae_intermittent_zeros(Run& run, std::uint64_t seed) {
    const auto s = intermittent_series(seed);
    const auto y = s.values();
    const std::size_t origin = 100, h = 100;
    const double mean = std::accumulate(y.begin(), y.begin() + origin, 0.0) / origin;
    const std::vector<Window> zeros{window_at(s.id(), y, origin, Values(h, 0.0))};
    const std::vector<Window> means{window_at(s.id(), y, origin, Values(h, mean))};
    run.plot_window(zeros.front(), "zeros");
    run.plot_window(means.front(), "mean");
    const double mae_z = measure("MAE", zeros), mae_m = measure("MAE", means);
    const double rmse_z = measure("RMSE", zeros), rmse_m = measure("RMSE", means);
    run.record("zero_fraction", measures::zero_fraction(y));
    run.record("MAE_zeros", mae_z);
    run.record("MAE_mean", mae_m);
    run.record("RMSE_zeros", rmse_z);
    run.record("RMSE_mean", rmse_m);
    return mae_z < mae_m && rmse_z > rmse_m;
}

/// At zero actuals, a near-miss and a wild miss score the same maximal
/// percentage terms.
bool smape_intermittent_boundary(Run& run, std::uint64_t seed) {
    const auto s = intermittent_series(seed);
    const auto y = s.values();
    Values zeros_at;
    for (std::size_t t = 100; t < y.size(); ++t)
        if (y[t] == 0.0) zeros_at.push_back(static_cast<double>(t));
    auto build = [&](double f) {
        std::vector<Window> out;
        for (double t : zeros_at) out.push_back(window_at(s.id(), y, static_cast<std::size_t>(t), {f}));
        return out;
    };
    const auto close = build(0.01), wild = build(5.0);
    const double smape_c = measure("sMAPE", close), smape_w = measure("sMAPE", wild);
    const double maape_c = measure("MAAPE", close), maape_w = measure("MAAPE", wild);
    const double mae_c = measure("MAE", close), mae_w = measure("MAE", wild);
    const auto mape = measures::evaluate(measures::measure_spec("MAPE"), close);
    run.record("zero_actual_steps", static_cast<double>(zeros_at.size()));
    run.record("sMAPE_close", smape_c);
    run.record("sMAPE_wild", smape_w);
    run.record("MAAPE_close", maape_c);
    run.record("MAAPE_wild", maape_w);
    run.record("MAE_close", mae_c);
    run.record("MAE_wild", mae_w);
    run.record("MAPE_undefined_terms", static_cast<double>(mape.n_undefined));
    const double half_pi = std::acos(0.0);
    return !zeros_at.empty() && smape_c == 200.0 && smape_w == 200.0 && same(maape_c, half_pi, 1e-12) &&
           same(maape_w, half_pi, 1e-12) && mae_c < mae_w && !mape.value.has_value();
}

/// Series A equals B except for one unexpectedly low horizon value; the
/// robust model forecasts both identically.
bool mape_low_outlier(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::StructuralBreak;  // a flat level with noise
    spec.length = 80;
    spec.level = 50.0;
    spec.noise_sd = 2.0;
    spec.break_index = 1;
    spec.seed = seed;
    spec.id = "B";
    const auto sb = synth::generate(spec);
    synth::OutlierInjection inj;
    inj.indices = {70};
    inj.direction = synth::Direction::Low;
    const auto injected = synth::inject_outliers(sb, inj, derive_seed(seed, 1));
    const std::size_t origin = 60, h = 20;
    const Values u = normals(derive_seed(seed, 2), h);
    Values f(h);
    for (std::size_t k = 0; k < h; ++k) f[k] = sb.values()[origin + k] - u[k];
    const std::vector<Window> wa{window_at("A", injected.series.values(), origin, f)};
    const std::vector<Window> wb{window_at("B", sb.values(), origin, f)};
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    const double mape_a = measure("MAPE", wa), mape_b = measure("MAPE", wb);
    const double mdape_a = measure("MdAPE", wa), mdape_b = measure("MdAPE", wb);
    run.record("outlier_value", injected.log.front().after);
    run.record("MAPE_A", mape_a);
    run.record("MAPE_B", mape_b);
    run.record("MdAPE_A", mdape_a);
    run.record("MdAPE_B", mdape_b);
    // The single low value moves the mean by far more than the median.
    const double mean_shift = mape_a - mape_b, median_shift = std::abs(mdape_a - mdape_b);
    run.record("MdAPE_shift_over_MAPE_shift", median_shift / mean_shift);
    return mape_a > 2.0 * mape_b && median_shift < 0.1 * mean_shift;
}

/// A high outlier at the origin of series A drags the fixed-origin naive
/// benchmark; the model forecasts A and B identically.
bool mrae_origin_outlier(Run& run, std::uint64_t seed) {
    synth::DgpSpec spec;
    spec.kind = synth::DgpKind::StructuralBreak;
    spec.length = 80;
    spec.level = 50.0;
    spec.noise_sd = 2.0;
    spec.break_index = 1;
    spec.seed = seed;
    spec.id = "B";
    const auto sb = synth::generate(spec);
    const std::size_t origin = 60, h = 20;
    synth::OutlierInjection inj;
    inj.indices = {origin - 1};
    inj.magnitude = 3.0;
    const auto sa = synth::inject_outliers(sb, inj, derive_seed(seed, 1)).series;
    const Values u = normals(derive_seed(seed, 2), h);
    Values f(h);
    for (std::size_t k = 0; k < h; ++k) f[k] = sb.values()[origin + k] - u[k];
    const std::vector<Window> wa{window_at("A", sa.values(), origin, f, Values(h, sa.values()[origin - 1]))};
    const std::vector<Window> wb{window_at("B", sb.values(), origin, f, Values(h, sb.values()[origin - 1]))};
    run.plot_window(wa.front(), "model");
    run.plot_window(wb.front(), "model");
    const double mae_a = measure("MAE", wa), mae_b = measure("MAE", wb);
    const double mrae_a = measure("MRAE", wa), mrae_b = measure("MRAE", wb);
    run.record("MAE_A", mae_a);
    run.record("MAE_B", mae_b);
    run.record("MRAE_A", mrae_a);
    run.record("MRAE_B", mrae_b);
    return same(mae_a, mae_b) && mrae_a < 0.5 * mrae_b;
}

/// Forecasts shifted up by ten track the actuals perfectly in correlation.
bool corr_bias(Run& run, std::uint64_t seed) {
    std::vector<Window> biased, noisy;
    for (std::size_t i = 0; i < 5; ++i) {
        synth::DgpSpec spec;
        spec.kind = synth::DgpKind::Seasonal;
        spec.length = 60;
        spec.level = 30.0;
        spec.amplitude = 8.0;
        spec.noise_sd = 1.0;
        spec.seed = derive_seed(seed, i);
        spec.id = "s" + std::to_string(i + 1);
        const auto s = synth::generate(spec);
        const auto y = s.values();
        const std::size_t origin = 48, h = 12;
        const Values u = normals(derive_seed(seed, 100 + i), h, 1.5);
        Values fa(h), fb(h);
        for (std::size_t k = 0; k < h; ++k) {
            fa[k] = y[origin + k] + 10.0;
            fb[k] = y[origin + k] + u[k];
        }
        biased.push_back(window_at(s.id(), y, origin, fa));
        noisy.push_back(window_at(s.id(), y, origin, fb));
    }
    run.plot_window(biased.front(), "biased");
    run.plot_window(noisy.front(), "unbiased_noisy");
    const double corr_a = measure("CORR", biased), corr_b = measure("CORR", noisy);
    const double me_a = measure("ME", biased);
    const double mae_a = measure("MAE", biased), mae_b = measure("MAE", noisy);
    run.record("CORR_biased", corr_a);
    run.record("CORR_unbiased", corr_b);
    run.record("ME_biased", me_a);
    run.record("MAE_biased", mae_a);
    run.record("MAE_unbiased", mae_b);
    return same(corr_a, 1.0, 1e-12) && same(me_a, -10.0, 1e-9) && corr_a > corr_b && mae_a > mae_b;
}

/// Model A is exact on one series and far off on the rest; model B is
/// moderately off everywhere.
bool gm_zero_collapse(Run& run, std::uint64_t seed) {
    std::vector<Window> a, b;
    const std::size_t origin = 40, h = 10;
    for (std::size_t i = 0; i < 5; ++i) {
        synth::DgpSpec spec;
        spec.kind = synth::DgpKind::RandomWalk;
        spec.length = origin + h;
        spec.level = 100.0;
        spec.seed = derive_seed(seed, i);
        spec.id = "s" + std::to_string(i + 1);
        const auto s = synth::generate(spec);
        const auto y = s.values();
        const Values u = normals(derive_seed(seed, 100 + i), h);
        Values fa(h), fb(h);
        for (std::size_t k = 0; k < h; ++k) {
            fa[k] = i == 0 ? y[origin + k] : y[origin + k] + 5.0;
            fb[k] = y[origin + k] + u[k];
        }
        a.push_back(window_at(s.id(), y, origin, fa));
        b.push_back(window_at(s.id(), y, origin, fb));
    }
    run.plot_window(a.front(), "exact_once");
    run.plot_window(b.front(), "moderate");
    const auto ga = measures::evaluate(measures::measure_spec("GMAE"), a);
    const double gmae_a = ga.value.value_or(kNan), gmae_b = measure("GMAE", b);
    const double mae_a = measure("MAE", a), mae_b = measure("MAE", b);
    run.record("GMAE_exact_once", gmae_a);
    run.record("GMAE_moderate", gmae_b);
    run.record("MAE_exact_once", mae_a);
    run.record("MAE_moderate", mae_b);
    run.record("geomean_zero_flagged", ga.flags.count("geomean_zero") ? 1.0 : 0.0);
    return gmae_a < gmae_b && mae_a > mae_b && ga.flags.count("geomean_zero") == 1;
}

struct Entry {
    ScenarioInfo info;
    std::function<bool(Run&, std::uint64_t)> body;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t = {
            {{"corr-bias", "Other Measures",
              "forecasts offset by +10 from the actuals on five seasonal series, against unbiased noisy forecasts",
              {"CORR", "ME", "MAE"},
              "CORR(biased) = 1 and ME(biased) = -10, CORR(biased) > CORR(unbiased) while MAE(biased) > MAE(unbiased)"},
             corr_bias},
            {{"gm-zero-collapse", "Summary Operators",
              "one model exact on one series and 5 units off elsewhere, another about 1 unit off everywhere",
              {"GMAE", "MAE"},
              "GMAE(exact-once) < GMAE(moderate) with the geomean_zero flag, while MAE(exact-once) > MAE(moderate)"},
             gm_zero_collapse},
            {{"log-exp-trend", "Trends",
              "equal-sized misses at the last and the first horizon step of an exponential trend",
              {"MAE", "RMSE", "RMSLE"},
              "MAE equal, RMSLE(late miss) < 0.5 * RMSLE(early miss)"},
             log_exp_trend},
            {{"mae-intermittent-zeros", "Intermittent Series",
              "constant-zero forecasts against the in-sample mean on demand with 70% zeros",
              {"MAE", "RMSE"},
              "MAE prefers the zero forecasts, RMSE prefers the mean forecasts"},
             mae_intermittent_zeros},
            {{"mape-heteroscedastic", "Heteroscedasticity",
              "one model misses the widening high swings, the other the low swings by 90% of that amount",
              {"MAE", "MAPE", "RMSLE"},
              "MAE(misses highs) > MAE(misses lows) yet MAPE(misses highs) < MAPE(misses lows)"},
             mape_heteroscedastic},
            {{"mape-low-outlier", "Outliers",
              "identical forecasts on two series that differ only by one low horizon outlier",
              {"MAPE", "MdAPE"},
              "MAPE(with outlier) > 2 * MAPE(clean) while MdAPE moves by less than a tenth of the MAPE shift"},
             mape_low_outlier},
            {{"mape-seasonal", "Seasonality",
              "one model misses the seasonal peaks, the other the troughs by 90% of that absolute amount",
              {"MAE", "MAPE"},
              "MAE(misses peaks) > MAE(misses troughs) yet MAPE(misses peaks) < MAPE(misses troughs)"},
             mape_seasonal},
            {{"mase-break-origin", "Structural Breaks (with Level Shifts)",
              "a level jump right after the origin; the model adapts three quarters of the way",
              {"MASE", "MAE"},
              "MASE(model) > 1 although MAE(model) < MAE(naive) out of sample"},
             mase_break_origin},
            {{"mrae-negative-ar", "Count Data Well above Zero with Stationarity",
              "rolling one-step forecasts on a sign-flipping AR series and on a smooth AR series, naive benchmark",
              {"MAE", "MRAE", "MdRAE"},
              "MAE(A) > MAE(B) yet MRAE(A) < MRAE(B)"},
             mrae_negative_ar},
            {{"mrae-origin-outlier", "Outliers",
              "a high outlier at the forecast origin of one of two otherwise equal series, fixed-origin naive benchmark",
              {"MAE", "MRAE"},
              "MAE equal, MRAE(with outlier) < 0.5 * MRAE(clean)"},
             mrae_origin_outlier},
            {{"mrae-trend", "Trends",
              "identical misses on a trended and a flat series, fixed-origin naive benchmark",
              {"MAE", "MRAE", "RelMAE"},
              "MAE equal, MRAE(trended) < 0.5 * MRAE(flat)"},
             mrae_trend},
            {{"naive-optimality", "Unit Roots",
              "200 seeded random walks (n = 1000, h = 10): naive against an AR(1) with intercept fitted on levels",
              {"MSE"},
              "mean MSE(naive) <= mean MSE(AR on levels)"},
             naive_optimality},
            {{"smae-break-training", "Structural Breaks (with Level Shifts)",
              "a level shift inside the training region; horizons and forecasts identical",
              {"MAE", "sMAE", "sMSE"},
              "MAE equal, sMAE(shifted history) > sMAE(stable history)"},
             smae_break_training},
            {{"smae-unit-root", "Unit Roots",
              "two random-walk histories mirrored about a shared origin value, identical horizons and forecasts",
              {"MAE", "sMAE"},
              "MAE equal, sMAE differs by more than 5% in the direction of the lower in-sample mean"},
             smae_unit_root},
            {{"smape-intermittent-boundary", "Intermittent Series",
              "forecasts of 0.01 and of 5 at every zero actual of a sparse horizon",
              {"sMAPE", "MAAPE", "MAE", "MAPE"},
              "sMAPE = 200 and MAAPE = pi/2 for both, MAPE undefined, while MAE separates them"},
             smape_intermittent_boundary},
            {{"wape-break-horizon", "Structural Breaks (with Level Shifts)",
              "a downward regime change inside the horizon of one series; one identical miss in the first regime",
              {"MAE", "WAPE"},
              "same actual at the miss, MAE equal, WAPE(with break) > WAPE(without)"},
             wape_break_horizon},
            {{"wape-trend", "Trends",
              "identical misses on a steep upward trend and on a flat series",
              {"MAE", "WAPE"},
              "MAE equal, WAPE(trended) < 0.5 * WAPE(flat)"},
             wape_trend},
        };
        std::sort(t.begin(), t.end(), [](const Entry& x, const Entry& y) { return x.info.name < y.info.name; });
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<ScenarioInfo>& list_scenarios() {
    static const std::vector<ScenarioInfo> infos = [] {
        std::vector<ScenarioInfo> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

const std::vector<std::string>& required_topics() {
    static const std::vector<std::string> topics = {
        "Count Data Well above Zero with Stationarity",
        "Seasonality",
        "Trends",
        "Unit Roots",
        "Heteroscedasticity",
        "Structural Breaks (with Level Shifts)",
        "Intermittent Series",
        "Outliers",
    };
    return topics;
}

ScenarioResult run_scenario(const std::string& name, std::uint64_t seed) {
    const auto& all = entries();
    const auto it = std::find_if(all.begin(), all.end(), [&](const Entry& e) { return e.info.name == name; });
    if (it == all.end()) throw ConfigError("unknown pitfall scenario '" + name + "'");
    Run run;
    run.result.name = it->info.name;
    run.result.topic = it->info.topic;
    run.result.seed = seed;
    run.result.predicate = it->info.predicate;
    run.plot << "series_id,t,actual,model,forecast\n";
    run.result.passed = it->body(run, seed);
    run.result.plot_csv = run.plot.str();
    return std::move(run.result);
}

}  // namespace fceval::pitfalls
