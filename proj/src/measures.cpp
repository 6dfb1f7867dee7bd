#include "fceval/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fceval/error.hpp"

namespace fceval::measures {

using core::Window;

namespace {

MeasureSpec make(std::string name, BaseKind base, TermOp op, Order order = Order::Pooled,
                 Summariser sh = Summariser::Mean, Summariser ss = Summariser::Mean,
                 Root root = Root::None) {
    MeasureSpec s;
    s.name = std::move(name);
    s.base = base;
    s.op = op;
    s.order = order;
    s.summariser_horizon = sh;
    s.summariser_series = ss;
    s.root = root;
    s.needs_benchmark = base == BaseKind::Relative || base == BaseKind::RelativeMae ||
                        base == BaseKind::RelativeRmse;
    return s;
}

std::vector<MeasureSpec> build_registry() {
    using B = BaseKind;
    using T = TermOp;
    using O = Order;
    using S = Summariser;
    const auto P = O::Pooled;
    const auto HS = O::HorizonThenSeries;
    const auto M = S::Mean;
    const auto Md = S::Median;
    const auto G = S::GeometricMean;
    std::vector<MeasureSpec> r;

    r.push_back(make("ME", B::Raw, T::Signed));
    auto err_std = make("ErrorStd", B::Raw, T::Squared, P, M, M, Root::Final);
    err_std.alias_of = "RMSE";
    r.push_back(err_std);
    r.push_back(make("MSE", B::Raw, T::Squared));
    r.push_back(make("RMSE", B::Raw, T::Squared, P, M, M, Root::Final));
    r.push_back(make("MAE", B::Raw, T::Absolute));
    r.push_back(make("MdAE", B::Raw, T::Absolute, P, Md));
    r.push_back(make("RMdSE", B::Raw, T::Squared, P, Md, M, Root::Final));
    r.push_back(make("GMAE", B::Raw, T::Absolute, P, G));
    r.push_back(make("GRMSE", B::Raw, T::Squared, P, G, M, Root::Final));

    r.push_back(make("MAPE", B::Percentage, T::Absolute));
    r.push_back(make("MdAPE", B::Percentage, T::Absolute, P, Md));
    r.push_back(make("RMSPE", B::Percentage, T::Squared, P, M, M, Root::Final));
    r.push_back(make("RMdSPE", B::Percentage, T::Squared, P, Md, M, Root::Final));
    r.push_back(make("sMAPE", B::Symmetric, T::Absolute));
    r.push_back(make("sMdAPE", B::Symmetric, T::Absolute, P, Md));
    r.push_back(make("msMAPE", B::ModSymmetric, T::Absolute));
    r.push_back(make("MAAPE", B::Arctan, T::Signed));

    r.push_back(make("WAPE", B::WindowAbs, T::Absolute, HS));
    r.push_back(make("sWAPE", B::WindowSym, T::Absolute, HS));
    r.push_back(make("WRMSPE", B::WindowRootAbs, T::Squared, HS, M, M, Root::PerSeries));
    r.push_back(make("RTAE", B::WindowClamped, T::Absolute, HS));
    r.push_back(make("sME", B::InSample, T::Signed));
    r.push_back(make("sMSE", B::InSample, T::Squared));
    r.push_back(make("sMAE", B::InSample, T::Absolute));
    r.push_back(make("ND", B::PooledAbs, T::Absolute));
    r.push_back(make("NRMSE", B::PooledAbs, T::Squared, P, M, M, Root::Final));

    r.push_back(make("MRAE", B::Relative, T::Absolute));
    r.push_back(make("MdRAE", B::Relative, T::Absolute, P, Md));
    r.push_back(make("GMRAE", B::Relative, T::Absolute, P, G));
    r.push_back(make("RMRSE", B::Relative, T::Squared, P, M, M, Root::Final));
    r.push_back(make("RGRMSE", B::Relative, T::Squared, P, G, M, Root::Final));

    r.push_back(make("RelMAE", B::RelativeMae, T::Absolute, HS));
    r.push_back(make("RelMSE", B::RelativeRmse, T::Squared, HS));
    r.push_back(make("RelRMSE", B::RelativeRmse, T::Squared, HS, M, M, Root::PerSeries));
    r.push_back(make("RSE", B::PooledDeviation, T::Squared, P, M, M, Root::Final));
    auto avg = make("AvgRelMAE", B::RelativeMae, T::Absolute, HS, M, G);
    avg.horizon_weighted_series = true;
    r.push_back(avg);

    r.push_back(make("MASE", B::Scaled, T::Absolute));
    r.push_back(make("MdASE", B::Scaled, T::Absolute, P, Md));
    r.push_back(make("RMSSE", B::ScaledSquared, T::Squared, P, M, M, Root::Final));

    r.push_back(make("RMSLE", B::Log, T::Squared, P, M, M, Root::Final));
    auto nw = make("NWRMSLE", B::Log, T::Squared, P, M, M, Root::Final);
    nw.weighted = true;
    r.push_back(nw);

    r.push_back(make("MSR", B::Rate, T::Squared));
    r.push_back(make("MAR", B::Rate, T::Absolute));
    auto wmae = make("WMAE", B::Raw, T::Absolute);
    wmae.weighted = true;
    r.push_back(wmae);
    r.push_back(make("CORR", B::Correlation, T::Signed, HS));
    return r;
}

const std::map<std::string, std::vector<std::string>>& families() {
    static const std::map<std::string, std::vector<std::string>> f = {
        {"scale-dependent", {"ME", "ErrorStd", "MSE", "RMSE", "MAE", "MdAE", "RMdSE", "GMAE", "GRMSE"}},
        {"percentage", {"MAPE", "MdAPE", "RMSPE", "RMdSPE", "sMAPE", "sMdAPE", "msMAPE", "MAAPE"}},
        {"aggregate-scaling",
         {"WAPE", "sWAPE", "WRMSPE", "RTAE", "sME", "sMSE", "sMAE", "ND", "NRMSE"}},
        {"relative-error", {"MRAE", "MdRAE", "GMRAE", "RMRSE", "RGRMSE"}},
        {"relative", {"RelMAE", "RelMSE", "RelRMSE", "RSE", "AvgRelMAE"}},
        {"scaled", {"MASE", "MdASE", "RMSSE"}},
        {"transform", {"RMSLE", "NWRMSLE"}},
        {"other", {"MSR", "MAR", "WMAE", "CORR"}},
    };
    return f;
}

MeasureSpec family_spec(const std::string& family, const std::string& name) {
    const auto& members = families().at(family);
    if (std::find(members.begin(), members.end(), name) == members.end())
        throw ConfigError("measure '" + name + "' is not in the " + family + " family");
    return measure_spec(name);
}

// -- per-window scales -------------------------------------------------------

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// In-sample naive error at the given lag: mean |y_t - y_{t-lag}| (or of the
/// squares) over the training values.
double naive_scale(std::span<const double> train, std::size_t lag, bool squared) {
    if (lag < 1) throw DomainError("scale lag must be >= 1");
    if (train.size() < lag + 1) {
        throw InsufficientDataError("in-sample scale needs at least " + std::to_string(lag + 1) +
                                    " training values, got " + std::to_string(train.size()));
    }
    double acc = 0.0;
    for (std::size_t t = lag; t < train.size(); ++t) {
        const double d = train[t] - train[t - lag];
        acc += squared ? d * d : std::abs(d);
    }
    return acc / static_cast<double>(train.size() - lag);
}

struct Scope {
    double pooled_abs = 0.0;
    double pooled_dev = 0.0;
};

Scope pooled_scope(std::span<const Window> windows) {
    double sum_abs = 0.0;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& w : windows) {
        for (double y : w.actual) {
            sum_abs += std::abs(y);
            sum += y;
            ++n;
        }
    }
    Scope s;
    if (n == 0) return s;
    s.pooled_abs = sum_abs / static_cast<double>(n);
    const double mean = sum / static_cast<double>(n);
    double dev = 0.0;
    for (const auto& w : windows)
        for (double y : w.actual) dev += (y - mean) * (y - mean);
    s.pooled_dev = std::sqrt(dev / static_cast<double>(n));
    return s;
}

using Terms = std::vector<std::vector<std::optional<double>>>;

double apply_op(TermOp op, double t) {
    switch (op) {
        case TermOp::Signed: return t;
        case TermOp::Absolute: return std::abs(t);
        case TermOp::Squared: return t * t;
    }
    return t;
}

/// e / d with a zero or non-finite quotient treated as undefined.
std::optional<double> ratio(double e, double d) {
    if (d == 0.0) return std::nullopt;
    const double q = e / d;
    if (!std::isfinite(q)) return std::nullopt;
    return q;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2) return std::nullopt;
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Terms compute_terms(const MeasureSpec& spec, std::span<const Window> windows,
                    std::set<std::string>& flags) {
    const auto& c = spec.constants;
    const Scope scope = (spec.base == BaseKind::PooledAbs || spec.base == BaseKind::PooledDeviation)
                            ? pooled_scope(windows)
                            : Scope{};
    if (spec.base == BaseKind::PooledAbs && scope.pooled_abs == 0.0) flags.insert("zero_scale");
    if (spec.base == BaseKind::PooledDeviation && scope.pooled_dev == 0.0) flags.insert("zero_scale");
    if (spec.base == BaseKind::ModSymmetric && !(c.epsilon + c.threshold > 0.0))
        throw ConfigError("msMAPE needs threshold + epsilon > 0");
    if (spec.base == BaseKind::WindowClamped && !(c.clamp > 0.0))
        throw ConfigError("RTAE regularisation constant must be > 0");

    Terms terms;
    terms.reserve(windows.size());
    for (const auto& w : windows) {
        const std::size_t h = w.horizon();
        if (w.forecast.size() != h) throw DomainError("window " + w.label() + ": forecast length mismatch");
        if (spec.needs_benchmark && w.benchmark.size() != h) {
            throw ConfigError("measure " + spec.name + " needs benchmark forecasts (window " +
                              w.label() + ")");
        }
        std::vector<std::optional<double>> row(h);

        if (spec.base == BaseKind::Correlation) {
            auto r = pearson(w.actual, w.forecast);
            if (!r) flags.insert("zero_variance");
            terms.push_back({r});
            continue;
        }

        // Window-level scale, where the kind has one.
        double scale = 1.0;
        bool scale_known = true;
        auto mean_abs = [&](auto f) {
            double acc = 0.0;
            for (std::size_t k = 0; k < h; ++k) acc += f(k);
            return acc / static_cast<double>(h);
        };
        switch (spec.base) {
            case BaseKind::WindowAbs:
                scale = mean_abs([&](std::size_t k) { return std::abs(w.actual[k]); });
                break;
            case BaseKind::WindowSym:
                scale = mean_abs([&](std::size_t k) {
                    return std::abs(w.actual[k]) + std::abs(w.forecast[k]);
                });
                break;
            case BaseKind::WindowClamped: {
                const double m = mean_abs([&](std::size_t k) { return std::abs(w.actual[k]); });
                if (m < c.clamp) flags.insert("clamped");
                scale = std::max(c.clamp, m);
                break;
            }
            case BaseKind::WindowRootAbs:
                scale = std::sqrt(mean_abs([&](std::size_t k) { return std::abs(w.actual[k]); }));
                break;
            case BaseKind::PooledAbs: scale = scope.pooled_abs; break;
            case BaseKind::PooledDeviation: scale = scope.pooled_dev; break;
            case BaseKind::InSample:
                if (w.train.empty()) throw InsufficientDataError("window " + w.label() + " has no training values");
                scale = mean_of(w.train);
                break;
            case BaseKind::RelativeMae:
                scale = mean_abs([&](std::size_t k) { return std::abs(w.actual[k] - w.benchmark[k]); });
                break;
            case BaseKind::RelativeRmse:
                scale = std::sqrt(mean_abs([&](std::size_t k) {
                    const double eb = w.actual[k] - w.benchmark[k];
                    return eb * eb;
                }));
                break;
            case BaseKind::Scaled:
            case BaseKind::ScaledSquared: {
                if (spec.scale_mode == ScaleMode::MultiStep) {
                    scale_known = false;
                    break;
                }
                std::size_t lag = 1;
                if (spec.scale_mode == ScaleMode::Seasonal) {
                    if (!w.period) throw ConfigError("seasonal scale needs a period for series '" + w.series_id + "'");
                    lag = *w.period;
                }
                const bool sq = spec.base == BaseKind::ScaledSquared;
                scale = naive_scale(w.train, lag, sq);
                if (sq) scale = std::sqrt(scale);
                break;
            }
            default:
                scale_known = false;
                break;
        }
        if (scale_known && scale == 0.0) flags.insert("zero_scale");

        double cumulative = 0.0;
        if (spec.base == BaseKind::Rate) {
            if (w.train.empty()) throw InsufficientDataError("window " + w.label() + " has no training values");
            cumulative = std::accumulate(w.train.begin(), w.train.end(), 0.0);
        }

        for (std::size_t k = 0; k < h; ++k) {
            const double y = w.actual[k];
            const double f = w.forecast[k];
            const double e = y - f;
            std::optional<double> t;
            switch (spec.base) {
                case BaseKind::Raw: t = e; break;
                case BaseKind::Percentage: t = ratio(100.0 * e, y); break;
                case BaseKind::Symmetric:
                    // Scaling after the division keeps the term inside [-200, 200].
                    t = ratio(e, std::abs(y) + std::abs(f));
                    if (t) *t *= 200.0;
                    break;
                case BaseKind::ModSymmetric: {
                    const double raw = std::abs(y) + std::abs(f) + c.epsilon;
                    const double floor = c.threshold + c.epsilon;
                    if (raw <= floor) flags.insert("winsorised");
                    t = ratio(200.0 * e, std::max(raw, floor));
                    break;
                }
                case BaseKind::Arctan:
                    if (y == 0.0) {
                        if (e != 0.0) t = std::numbers::pi / 2.0;
                    } else {
                        t = std::atan(std::abs(e / y));
                    }
                    break;
                case BaseKind::Relative: t = ratio(e, w.actual[k] - w.benchmark[k]); break;
                case BaseKind::Scaled:
                case BaseKind::ScaledSquared:
                    if (spec.scale_mode == ScaleMode::MultiStep) {
                        const bool sq = spec.base == BaseKind::ScaledSquared;
                        double s = naive_scale(w.train, k + 1, sq);
                        if (sq) s = std::sqrt(s);
                        if (s == 0.0) flags.insert("zero_scale");
                        t = ratio(e, s);
                    } else {
                        t = ratio(e, scale);
                    }
                    break;
                case BaseKind::Log:
                    if (y < 0.0 || f < 0.0) {
                        throw DomainError("log error needs non-negative actuals and forecasts (window " +
                                          w.label() + ", step " + std::to_string(k + 1) + ")");
                    }
                    t = std::log((y + 1.0) / (f + 1.0));
                    break;
                case BaseKind::Rate:
                    cumulative += y;
                    t = f - cumulative / static_cast<double>(w.train.size() + k + 1);
                    break;
                case BaseKind::InSample:
                    if (spec.op == TermOp::Absolute) {
                        // |e| over the (possibly negative) in-sample mean
                        t = ratio(std::abs(e), scale);
                        if (t) {
                            row[k] = *t;
                            continue;
                        }
                    } else {
                        t = ratio(e, scale);
                    }
                    break;
                default: t = ratio(e, scale); break;
            }
            if (t && std::isfinite(*t)) row[k] = apply_op(spec.op, *t);
        }
        terms.push_back(std::move(row));
    }
    return terms;
}

// -- aggregation core (shared with summarize) --------------------------------

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    const double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return 0.5 * (lo + hi);
}

double summarise(Summariser op, std::span<const double> v, std::span<const double> w,
                 std::set<std::string>* flags) {
    if (v.empty()) throw DomainError("cannot summarise an empty set");
    const bool weighted = !w.empty();
    if (weighted && w.size() != v.size()) throw ConfigError("weight count does not match values");
    double wsum = 0.0;
    if (weighted) {
        for (double x : w) wsum += x;
        if (!(wsum > 0.0)) throw ConfigError("weights must have a positive sum");
    }
    switch (op) {
        case Summariser::Mean: {
            double acc = 0.0;
            if (!weighted) {
                for (double x : v) acc += x;
                return acc / static_cast<double>(v.size());
            }
            for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * v[i];
            return acc / wsum;
        }
        case Summariser::Median:
            if (weighted) throw ConfigError("weighted medians are not supported");
            return median_of(std::vector<double>(v.begin(), v.end()));
        case Summariser::GeometricMean: {
            double acc = 0.0;
            bool zero = false;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i] < 0.0) throw DomainError("geometric mean over a negative value");
                const double wi = weighted ? w[i] : 1.0;
                if (v[i] == 0.0) {
                    if (wi > 0.0) zero = true;
                    continue;
                }
                acc += wi * std::log(v[i]);
            }
            if (zero) {
                if (flags) flags->insert("geomean_zero");
                return 0.0;
            }
            return std::exp(acc / (weighted ? wsum : static_cast<double>(v.size())));
        }
    }
    return 0.0;
}

struct AggregationInput {
    Order order;
    Summariser op_h;
    Summariser op_s;
    Root root = Root::None;
    const std::vector<double>* step_weights = nullptr;
    const std::vector<double>* series_weights = nullptr;
};

/// Aggregates defined terms; rows with no defined terms drop out.
std::optional<double> aggregate(const Terms& terms, const AggregationInput& in,
                                std::set<std::string>& flags) {
    auto sw = [&](std::size_t k) { return in.step_weights ? (*in.step_weights)[k] : 1.0; };
    auto rw = [&](std::size_t i) { return in.series_weights ? (*in.series_weights)[i] : 1.0; };
    const bool any_w = in.step_weights || in.series_weights;
    std::optional<double> out;

    if (in.order == Order::Pooled) {
        std::vector<double> v, w;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t k = 0; k < terms[i].size(); ++k) {
                if (!terms[i][k]) continue;
                v.push_back(*terms[i][k]);
                w.push_back(rw(i) * sw(k));
            }
        }
        if (v.empty()) return std::nullopt;
        out = summarise(in.op_h, v, any_w ? std::span<const double>(w) : std::span<const double>{}, &flags);
    } else if (in.order == Order::HorizonThenSeries) {
        std::vector<double> s, ws;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            std::vector<double> v, w;
            for (std::size_t k = 0; k < terms[i].size(); ++k) {
                if (!terms[i][k]) continue;
                v.push_back(*terms[i][k]);
                w.push_back(sw(k));
            }
            if (v.empty()) continue;
            double x = summarise(in.op_h, v,
                                 in.step_weights ? std::span<const double>(w) : std::span<const double>{},
                                 &flags);
            if (in.root == Root::PerSeries) x = std::sqrt(x);
            s.push_back(x);
            ws.push_back(rw(i));
        }
        if (s.empty()) return std::nullopt;
        out = summarise(in.op_s, s,
                        in.series_weights ? std::span<const double>(ws) : std::span<const double>{},
                        &flags);
    } else {
        std::size_t hmax = 0;
        for (const auto& row : terms) hmax = std::max(hmax, row.size());
        std::vector<double> per_step, wk;
        for (std::size_t k = 0; k < hmax; ++k) {
            std::vector<double> v, w;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                if (k >= terms[i].size() || !terms[i][k]) continue;
                v.push_back(*terms[i][k]);
                w.push_back(rw(i));
            }
            if (v.empty()) continue;
            per_step.push_back(summarise(
                in.op_s, v, in.series_weights ? std::span<const double>(w) : std::span<const double>{},
                &flags));
            wk.push_back(sw(k));
        }
        if (per_step.empty()) return std::nullopt;
        out = summarise(in.op_h, per_step,
                        in.step_weights ? std::span<const double>(wk) : std::span<const double>{},
                        &flags);
    }
    if (in.root == Root::Final) out = std::sqrt(*out);
    return out;
}

void check_weights(const WeightVector& wv, std::size_t expected, const char* axis) {
    if (wv.weights.size() != expected) {
        throw ConfigError(std::string("weight vector length ") + std::to_string(wv.weights.size()) +
                          " does not match the " + axis + " axis (" + std::to_string(expected) + ")");
    }
    double sum = 0.0;
    for (double w : wv.weights) {
        if (!std::isfinite(w) || w < 0.0) throw ConfigError("weights must be finite and non-negative");
        sum += w;
    }
    if (!(sum > 0.0)) throw ConfigError("weights must not all be zero");
}

MeasureResult evaluate_windows(const MeasureSpec& spec, std::span<const Window> windows) {
    if (windows.empty()) throw DomainError("measure " + spec.name + " evaluated on an empty frame");
    MeasureResult res;
    res.name = spec.name;
    Terms terms = compute_terms(spec, windows, res.flags);

    std::size_t total = 0;
    std::string first_undefined;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        for (std::size_t k = 0; k < terms[i].size(); ++k) {
            ++total;
            if (!terms[i][k]) {
                if (res.n_undefined == 0) {
                    first_undefined = windows[i].label() +
                                      (spec.base == BaseKind::Correlation ? std::string{}
                                                                          : " step " + std::to_string(k + 1));
                }
                ++res.n_undefined;
            }
        }
    }
    res.n_used = total - res.n_undefined;
    if (res.n_undefined > 0) {
        res.flags.insert("undefined_terms");
        if (spec.policy == UndefinedPolicy::Error) {
            throw UndefinedValueError(spec.name + ": " + std::to_string(res.n_undefined) +
                                      " undefined term(s), first at " + first_undefined);
        }
    }

    std::vector<double> step_w, series_w;
    AggregationInput in{spec.order, spec.summariser_horizon, spec.summariser_series, spec.root};
    if (spec.weights) {
        if (spec.weights->axis == WeightAxis::Step) {
            std::size_t hmax = 0;
            for (const auto& row : terms) hmax = std::max(hmax, row.size());
            if (spec.base == BaseKind::Correlation) hmax = 1;
            check_weights(*spec.weights, hmax, "step");
            step_w = spec.weights->weights;
            in.step_weights = &step_w;
        } else {
            check_weights(*spec.weights, windows.size(), "series");
            series_w = spec.weights->weights;
            in.series_weights = &series_w;
        }
    }
    if (spec.horizon_weighted_series) {
        if (in.series_weights) {
            for (std::size_t i = 0; i < windows.size(); ++i) series_w[i] *= static_cast<double>(windows[i].horizon());
        } else {
            for (const auto& w : windows) series_w.push_back(static_cast<double>(w.horizon()));
            in.series_weights = &series_w;
        }
    }

    if (res.n_undefined > 0 && spec.policy == UndefinedPolicy::Propagate) {
        res.value = std::nullopt;
    } else {
        res.value = aggregate(terms, in, res.flags);
        if (!res.value) res.flags.insert("empty");
    }
    return res;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<MeasureSpec>& registry() {
    static const std::vector<MeasureSpec> r = build_registry();
    return r;
}

std::optional<MeasureSpec> find_measure(const std::string& name) {
    for (const auto& s : registry())
        if (s.name == name) return s;
    return std::nullopt;
}

MeasureSpec measure_spec(const std::string& name) {
    auto s = find_measure(name);
    if (!s) throw ConfigError("unknown measure '" + name + "'");
    return *s;
}

std::string to_string(UndefinedPolicy p) {
    switch (p) {
        case UndefinedPolicy::Propagate: return "propagate";
        case UndefinedPolicy::SkipAndCount: return "skip";
        case UndefinedPolicy::Error: return "error";
    }
    return "propagate";
}

std::optional<UndefinedPolicy> parse_policy(const std::string& text) {
    if (text == "propagate") return UndefinedPolicy::Propagate;
    if (text == "skip" || text == "skip-and-count") return UndefinedPolicy::SkipAndCount;
    if (text == "error") return UndefinedPolicy::Error;
    return std::nullopt;
}

std::optional<ScaleMode> parse_scale_mode(const std::string& text) {
    if (text == "lag1" || text == "naive") return ScaleMode::Lag1;
    if (text == "seasonal") return ScaleMode::Seasonal;
    if (text == "multistep" || text == "multi-step") return ScaleMode::MultiStep;
    return std::nullopt;
}

std::string to_string(ScaleMode m) {
    switch (m) {
        case ScaleMode::Lag1: return "lag1";
        case ScaleMode::Seasonal: return "seasonal";
        case ScaleMode::MultiStep: return "multistep";
    }
    return "lag1";
}

MeasureResult evaluate(const MeasureSpec& spec, std::span<const Window> windows) {
    MeasureResult res = evaluate_windows(spec, windows);
    res.per_series.reserve(windows.size());
    if (windows.size() == 1) {
        res.per_series.emplace_back(windows[0].label(), res.value);
        return res;
    }
    MeasureSpec single = spec;
    // Per-window breakdown never throws for undefined terms; the overall
    // result already applied the policy.
    if (single.policy == UndefinedPolicy::Error) single.policy = UndefinedPolicy::Propagate;
    if (single.weights && single.weights->axis == WeightAxis::Series) single.weights.reset();
    for (const auto& w : windows) {
        auto own = single;
        // Shorter windows use the leading step weights.
        if (own.weights && own.weights->axis == WeightAxis::Step && own.base != BaseKind::Correlation &&
            own.weights->weights.size() > w.horizon())
            own.weights->weights.resize(w.horizon());
        auto one = evaluate_windows(own, std::span<const Window>(&w, 1));
        res.per_series.emplace_back(w.label(), one.value);
    }
    return res;
}

std::vector<std::string> family_members(const std::string& family) {
    auto it = families().find(family);
    if (it == families().end()) throw ConfigError("unknown measure family '" + family + "'");
    return it->second;
}

MeasureResult scale_dependent_measures(std::span<const Window> w, const std::string& name,
                                       UndefinedPolicy policy) {
    auto s = family_spec("scale-dependent", name);
    s.policy = policy;
    return evaluate(s, w);
}

MeasureResult percentage_measures(std::span<const Window> w, const std::string& name,
                                  UndefinedPolicy policy, const Constants& constants) {
    auto s = family_spec("percentage", name);
    s.policy = policy;
    s.constants = constants;
    return evaluate(s, w);
}

MeasureResult aggregate_scaling_measures(std::span<const Window> w, const std::string& name,
                                         UndefinedPolicy policy, const Constants& constants) {
    auto s = family_spec("aggregate-scaling", name);
    s.policy = policy;
    s.constants = constants;
    return evaluate(s, w);
}

MeasureResult relative_error_measures(std::span<const Window> w, const std::string& name,
                                      UndefinedPolicy policy) {
    auto s = family_spec("relative-error", name);
    s.policy = policy;
    return evaluate(s, w);
}

MeasureResult relative_measures(std::span<const Window> w, const std::string& name,
                                UndefinedPolicy policy) {
    auto s = family_spec("relative", name);
    s.policy = policy;
    return evaluate(s, w);
}

MeasureResult scaled_measures(std::span<const Window> w, const std::string& name, ScaleMode mode,
                              UndefinedPolicy policy) {
    auto s = family_spec("scaled", name);
    s.policy = policy;
    s.scale_mode = mode;
    return evaluate(s, w);
}

MeasureResult transform_measures(std::span<const Window> w, const std::string& name,
                                 const std::optional<WeightVector>& weights, UndefinedPolicy policy) {
    auto s = family_spec("transform", name);
    s.policy = policy;
    if (weights && !s.weighted) throw ConfigError("RMSLE takes no weights; use NWRMSLE");
    s.weights = weights;
    return evaluate(s, w);
}

MeasureResult other_measures(std::span<const Window> w, const std::string& name,
                             const std::optional<WeightVector>& weights, UndefinedPolicy policy) {
    auto s = family_spec("other", name);
    s.policy = policy;
    if (weights && !s.weighted) throw ConfigError(name + " takes no weights");
    s.weights = weights;
    return evaluate(s, w);
}

// ---------------------------------------------------------------------------

double apply_summariser(Summariser op, std::span<const double> values, std::span<const double> weights) {
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("cannot summarise non-finite values");
    return summarise(op, values, weights, nullptr);
}

double summarize(const std::vector<std::vector<double>>& values, Order order, Summariser op_h,
                 Summariser op_s, const std::optional<WeightVector>& weights) {
    Terms terms;
    std::size_t hmax = 0;
    bool any = false;
    for (const auto& row : values) {
        std::vector<std::optional<double>> r;
        for (double v : row) {
            if (!std::isfinite(v)) throw DomainError("cannot summarise non-finite values");
            if (op_h == Summariser::GeometricMean || op_s == Summariser::GeometricMean) {
                if (v < 0.0) throw DomainError("geometric mean over a negative value");
            }
            r.emplace_back(v);
            any = true;
        }
        hmax = std::max(hmax, row.size());
        terms.push_back(std::move(r));
    }
    if (!any) throw DomainError("cannot summarise an empty set");
    std::vector<double> sw, rw;
    AggregationInput in{order, op_h, op_s};
    if (weights) {
        if (weights->axis == WeightAxis::Step) {
            check_weights(*weights, hmax, "step");
            sw = weights->weights;
            in.step_weights = &sw;
        } else {
            check_weights(*weights, values.size(), "series");
            rw = weights->weights;
            in.series_weights = &rw;
        }
    }
    std::set<std::string> flags;
    return *aggregate(terms, in, flags);
}

// ---------------------------------------------------------------------------

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t q = i; q <= j; ++q) ranks[idx[q]] = r;
        i = j + 1;
    }
    return ranks;
}

RankTable rank_models(const std::map<std::string, std::vector<double>>& scores, bool ascending,
                      const std::vector<std::string>& items) {
    if (scores.empty()) throw DomainError("no models to rank");
    const std::size_t n = scores.begin()->second.size();
    if (n == 0) throw DomainError("no items to rank");
    RankTable t;
    for (const auto& [model, v] : scores) {
        if (v.size() != n)
            throw DomainError("model '" + model + "' is scored on a different series set");
        for (double x : v)
            if (!std::isfinite(x)) throw DomainError("model '" + model + "' has an undefined score");
        t.models.push_back(model);
    }
    if (!items.empty() && items.size() != n) throw DomainError("item labels do not match scores");
    t.items = items;
    if (t.items.empty())
        for (std::size_t i = 0; i < n; ++i) t.items.push_back(std::to_string(i + 1));
    t.mean_ranks.assign(t.models.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (const auto& [model, v] : scores) row.push_back(ascending ? v[i] : -v[i]);
        auto r = average_ranks(row);
        for (std::size_t m = 0; m < r.size(); ++m) t.mean_ranks[m] += r[m];
        t.ranks.push_back(std::move(r));
    }
    for (double& r : t.mean_ranks) r /= static_cast<double>(n);
    return t;
}

double probability_better(std::span<const double> model, std::span<const double> benchmark) {
    if (model.empty() || model.size() != benchmark.size())
        throw DomainError("PB needs aligned, non-empty value collections");
    std::size_t wins = 0;
    for (std::size_t i = 0; i < model.size(); ++i)
        if (model[i] < benchmark[i]) ++wins;
    return 100.0 * static_cast<double>(wins) / static_cast<double>(model.size());
}

double critical_event_percentage(std::span<const double> values, double margin) {
    if (values.empty()) throw DomainError("critical-event percentage needs values");
    std::size_t hits = 0;
    for (double v : values)
        if (v > margin) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(values.size());
}

RankCountResult rank_count_measures(const std::map<std::string, std::vector<double>>& per_series,
                                    const std::string& model, std::span<const double> benchmark_values,
                                    double margin) {
    if (per_series.empty()) throw DomainError("rank/count measures need values");
    auto it = per_series.find(model);
    if (it == per_series.end()) throw ConfigError("model '" + model + "' not among scored models");
    RankCountResult r;
    r.pb = probability_better(it->second, benchmark_values);
    r.critical = critical_event_percentage(it->second, margin);
    auto table = rank_models(per_series, true);
    for (std::size_t m = 0; m < table.models.size(); ++m) r.mean_ranks[table.models[m]] = table.mean_ranks[m];
    return r;
}

double zero_fraction(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const auto zeros = std::count(values.begin(), values.end(), 0.0);
    return static_cast<double>(zeros) / static_cast<double>(values.size());
}

}  // namespace fceval::measures
