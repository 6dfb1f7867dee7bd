#include "fceval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "fceval/error.hpp"
#include "fceval/random.hpp"
#include "io_format.hpp"

namespace fceval::synth {

std::string to_string(DgpKind k) {
    switch (k) {
        case DgpKind::RandomWalk: return "random-walk";
        case DgpKind::Ar: return "ar";
        case DgpKind::LinearTrend: return "linear-trend";
        case DgpKind::ExponentialTrend: return "exponential-trend";
        case DgpKind::Seasonal: return "seasonal";
        case DgpKind::Heteroscedastic: return "heteroscedastic";
        case DgpKind::StructuralBreak: return "structural-break";
        case DgpKind::Intermittent: return "intermittent";
        case DgpKind::Composite: return "composite";
    }
    return "random-walk";
}

std::optional<DgpKind> parse_kind(const std::string& text) {
    for (auto k : {DgpKind::RandomWalk, DgpKind::Ar, DgpKind::LinearTrend, DgpKind::ExponentialTrend,
                   DgpKind::Seasonal, DgpKind::Heteroscedastic, DgpKind::StructuralBreak, DgpKind::Intermittent,
                   DgpKind::Composite}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

bool ar_stationary(const std::vector<double>& phi) {
    std::vector<double> a = phi;
    for (std::size_t m = a.size(); m > 0; --m) {
        const double k = a[m - 1];
        if (!(std::abs(k) < 1.0)) return false;
        std::vector<double> next(m - 1);
        for (std::size_t j = 0; j + 1 < m; ++j) next[j] = (a[j] + k * a[m - 2 - j]) / (1.0 - k * k);
        a = std::move(next);
    }
    return true;
}

void DgpSpec::validate() const {
    if (length < 1) throw ConfigError("DGP length must be >= 1");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw ConfigError("noise_sd must be finite and >= 0");
    if (noise == Noise::StudentT && !(t_df > 0.0)) throw ConfigError("Student-t noise needs df > 0");
    for (double p : ar)
        if (!std::isfinite(p)) throw ConfigError("AR coefficients must be finite");
    if (!(zero_probability >= 0.0 && zero_probability <= 1.0))
        throw ConfigError("zero_probability must lie in [0, 1]");
    switch (kind) {
        case DgpKind::Ar:
            if (ar.empty()) throw ConfigError("ar kind needs at least one coefficient");
            if (!ar_stationary(ar) && !unit_root)
                throw ConfigError("AR polynomial is not stationary; set unit_root to allow it");
            break;
        case DgpKind::Seasonal:
            if (period < 2) throw ConfigError("seasonal period must be >= 2");
            break;
        case DgpKind::StructuralBreak:
            if (break_index < 1 || break_index > length)
                throw ConfigError("break_index must lie within 1..length");
            break;
        case DgpKind::Intermittent:
            if (!(demand_rate >= 0.0) || !std::isfinite(demand_rate))
                throw ConfigError("demand_rate must be finite and >= 0");
            break;
        case DgpKind::Heteroscedastic:
            if (!(sd_growth >= -1.0)) throw ConfigError("sd_growth must be >= -1");
            break;
        case DgpKind::Composite:
            if (components.empty()) throw ConfigError("composite kind needs components");
            for (const auto& c : components) {
                if (c.length != length) throw ConfigError("composite components must share the length");
                c.validate();
            }
            break;
        default:
            break;
    }
    if (kind != DgpKind::Ar && unit_root) throw ConfigError("unit_root applies to the ar kind only");
}

namespace {

double draw_noise(const DgpSpec& s, Rng& rng) {
    if (s.noise_sd == 0.0) return 0.0;
    const double z = s.noise == Noise::Gaussian ? rng.normal() : rng.student_t(s.t_df);
    return s.noise_sd * z;
}

}  // namespace

core::TimeSeries generate(const DgpSpec& s) {
    s.validate();
    Rng rng(s.seed);
    const std::size_t n = s.length;
    std::vector<double> y(n, 0.0);
    std::optional<int> freq;
    switch (s.kind) {
        case DgpKind::RandomWalk:
            y[0] = s.level;
            for (std::size_t t = 1; t < n; ++t) y[t] = y[t - 1] + draw_noise(s, rng);
            break;
        case DgpKind::Ar: {
            const std::size_t p = s.ar.size();
            const std::size_t burn = s.unit_root ? 0 : s.burn_in;
            std::vector<double> x(burn + n + p, 0.0);
            for (std::size_t t = p; t < x.size(); ++t) {
                double v = draw_noise(s, rng);
                for (std::size_t i = 0; i < p; ++i) v += s.ar[i] * x[t - 1 - i];
                x[t] = v;
            }
            for (std::size_t t = 0; t < n; ++t) y[t] = s.level + x[p + burn + t];
            break;
        }
        case DgpKind::LinearTrend:
            for (std::size_t t = 0; t < n; ++t)
                y[t] = s.level + s.slope * static_cast<double>(t + 1) + draw_noise(s, rng);
            break;
        case DgpKind::ExponentialTrend:
            for (std::size_t t = 0; t < n; ++t)
                y[t] = s.level + s.scale * std::exp(s.rate * static_cast<double>(t + 1)) + draw_noise(s, rng);
            break;
        case DgpKind::Seasonal:
            freq = static_cast<int>(s.period);
            for (std::size_t t = 0; t < n; ++t) {
                const double phase = 2.0 * std::numbers::pi * static_cast<double>(t + 1) / static_cast<double>(s.period);
                y[t] = s.level + s.amplitude * std::sin(phase) + draw_noise(s, rng);
            }
            break;
        case DgpKind::Heteroscedastic:
            for (std::size_t t = 0; t < n; ++t) {
                const double frac = n > 1 ? static_cast<double>(t) / static_cast<double>(n - 1) : 0.0;
                y[t] = s.level + (1.0 + s.sd_growth * frac) * draw_noise(s, rng);
            }
            break;
        case DgpKind::StructuralBreak:
            for (std::size_t t = 0; t < n; ++t)
                y[t] = s.level + (t + 1 >= s.break_index ? s.shift : 0.0) + draw_noise(s, rng);
            break;
        case DgpKind::Intermittent:
            for (std::size_t t = 0; t < n; ++t) {
                if (rng.uniform() < s.zero_probability) {
                    y[t] = 0.0;
                } else {
                    y[t] = static_cast<double>(rng.poisson(s.demand_rate) + 1);
                }
            }
            break;
        case DgpKind::Composite:
            for (std::size_t c = 0; c < s.components.size(); ++c) {
                DgpSpec part = s.components[c];
                part.seed = derive_seed(s.seed, c);
                const auto comp = generate(part);
                if (part.kind == DgpKind::Seasonal) freq = static_cast<int>(part.period);
                for (std::size_t t = 0; t < n; ++t) y[t] += comp.values()[t];
            }
            for (std::size_t t = 0; t < n; ++t) y[t] += s.level + draw_noise(s, rng);
            break;
    }
    for (double v : y)
        if (!std::isfinite(v)) throw DomainError("DGP produced a non-finite value; reduce the length or growth");
    return core::TimeSeries::from_values(s.id, std::move(y), freq);
}

Injected inject_outliers(const core::TimeSeries& series, const OutlierInjection& spec, std::uint64_t seed) {
    if (!std::isfinite(spec.magnitude)) throw ConfigError("outlier magnitude must be finite");
    if (spec.mode == MagnitudeMode::Multiply && spec.magnitude == 0.0)
        throw ConfigError("multiplicative outlier magnitude must be nonzero");
    const std::size_t n = series.size();
    std::set<std::size_t> where(spec.indices.begin(), spec.indices.end());
    for (auto i : where) {
        if (i >= n) {
            throw DomainError("outlier index " + std::to_string(i) + " outside series of length " +
                              std::to_string(n));
        }
    }
    Rng rng(seed);
    if (spec.rate) {
        if (!(*spec.rate >= 0.0 && *spec.rate <= 1.0)) throw ConfigError("outlier rate must lie in [0, 1]");
        for (std::size_t i = 0; i < n; ++i)
            if (rng.uniform() < *spec.rate) where.insert(i);
    }
    std::vector<double> v(series.values().begin(), series.values().end());
    Injected out{series, {}};
    for (auto i : where) {
        bool high = spec.direction == Direction::High;
        if (spec.direction == Direction::Both) high = rng.uniform() < 0.5;
        const double before = v[i];
        if (spec.mode == MagnitudeMode::Multiply) {
            v[i] = high ? v[i] * spec.magnitude : v[i] / spec.magnitude;
        } else {
            v[i] = high ? v[i] + spec.magnitude : v[i] - spec.magnitude;
        }
        out.log.push_back({i, before, v[i]});
    }
    std::vector<std::int64_t> ts(series.timestamps().begin(), series.timestamps().end());
    out.series = core::TimeSeries(series.id(), std::move(ts), std::move(v), series.frequency());
    return out;
}

std::string series_to_csv(const core::TimeSeries& series, bool header) {
    std::ostringstream os;
    if (header) os << "series_id,timestamp,value\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        os << series.id() << ',' << series.timestamps()[i] << ',' << io::format_double(series.values()[i]) << '\n';
    return os.str();
}

}  // namespace fceval::synth
