#include "fceval/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "fceval/error.hpp"

namespace fceval::stats {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

double two_sided_normal(double z) {
    const boost::math::normal_distribution<> nd;
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(nd, std::abs(z))));
}

void decide(TestResult& r) {
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    r.reject = r.p_value < r.alpha;
}

TestResult tie_result(std::string name, double alpha, std::string note) {
    TestResult r;
    r.test = std::move(name);
    r.alpha = alpha;
    r.tie = true;
    r.p_value = 1.0;
    r.notes.push_back(std::move(note));
    return r;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sum over tie groups of t^3 - t for a sample.
double tie_term(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        acc += t * t * t - t;
        i = j + 1;
    }
    return acc;
}

// Infinite-df studentized range quantiles over sqrt(2), k = 2..20.
constexpr std::array<double, 19> kQ001 = {
    2.5758293035, 2.9134943378, 3.1132503453, 3.2546859715, 3.3637403685, 3.4522128234, 3.5264706985,
    3.5903386986, 3.6462915484, 3.6960208999, 3.7407331678, 3.7813182411, 3.8184508563, 3.8526544765,
    3.8843431545, 3.9138498871, 3.9414463675, 3.9673570833, 3.9917695942};
constexpr std::array<double, 19> kQ005 = {
    1.9599639845, 2.3437005864, 2.5690317725, 2.7277743709, 2.8497054196, 2.9483200175, 3.0308784496,
    3.1017303413, 3.1636835771, 3.2186536073, 3.2680039245, 3.3127385934, 3.3536177519, 3.3912302838,
    3.4260413794, 3.4584247073, 3.4886847994, 3.5170730087, 3.5437991315};
constexpr std::array<double, 19> kQ010 = {
    1.6448536270, 2.0522927305, 2.2913414969, 2.4595157643, 2.5885206019, 2.6927321010, 2.7798836082,
    2.8546064312, 2.9198888401, 2.9777682513, 3.0296941832, 3.0767334683, 3.1196933331, 3.1591988189,
    3.1957434330, 3.2297234009, 3.2614614896, 3.2912239866, 3.3192330595};

}  // namespace

TestResult ljung_box(std::span<const double> x, std::size_t lags, std::size_t fitted_params, double alpha) {
    check_alpha(alpha);
    const std::size_t n = x.size();
    if (lags < 1) throw DomainError("Ljung-Box needs lags >= 1");
    if (n <= lags) {
        throw InsufficientDataError("Ljung-Box needs more residuals (" + std::to_string(n) + ") than lags (" +
                                    std::to_string(lags) + ")");
    }
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("Ljung-Box residuals must be finite");
    const double m = mean_of(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (c0 == 0.0) throw DomainError("Ljung-Box: constant residuals have undefined autocorrelation");
    double q = 0.0;
    const auto nd = static_cast<double>(n);
    for (std::size_t k = 1; k <= lags; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) ck += (x[t] - m) * (x[t - k] - m);
        const double rho = ck / c0;
        q += rho * rho / (nd - static_cast<double>(k));
    }
    q *= nd * (nd + 2.0);
    const std::size_t df = lags > fitted_params ? std::max<std::size_t>(1, lags - fitted_params) : 1;
    TestResult r;
    r.test = "ljung-box";
    r.alpha = alpha;
    r.statistic = q;
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(df)), q));
    r.details["lags"] = static_cast<double>(lags);
    r.details["df"] = static_cast<double>(df);
    r.details["n"] = nd;
    decide(r);
    return r;
}

TestResult diebold_mariano(std::span<const double> loss_a, std::span<const double> loss_b, std::size_t h,
                           bool harvey, double alpha) {
    check_alpha(alpha);
    if (loss_a.size() != loss_b.size()) throw DomainError("Diebold-Mariano needs aligned loss sequences");
    const std::size_t n = loss_a.size();
    if (n < 4) throw InsufficientDataError("Diebold-Mariano needs at least 4 loss pairs");
    if (h < 1 || h >= n) throw DomainError("Diebold-Mariano horizon must satisfy 1 <= h < n");
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = loss_a[t] - loss_b[t];
    const double dbar = mean_of(d);
    const auto nd = static_cast<double>(n);
    auto gamma = [&](std::size_t j) {
        double acc = 0.0;
        for (std::size_t t = j; t < n; ++t) acc += (d[t] - dbar) * (d[t - j] - dbar);
        return acc / nd;
    };
    const double g0 = gamma(0);
    const std::string name = harvey ? "diebold-mariano-hln" : "diebold-mariano";
    if (g0 <= 0.0) return tie_result(name, alpha, "loss differential has zero variance; forecasts tie");
    double v = g0;
    for (std::size_t j = 1; j < h; ++j) v += 2.0 * gamma(j);
    TestResult r;
    r.test = name;
    r.alpha = alpha;
    if (v <= 0.0) {
        v = g0;
        r.notes.push_back("long-run variance not positive; fell back to the lag-0 variance");
        r.details["variance_fallback"] = 1.0;
    }
    double stat = dbar / std::sqrt(v / nd);
    const auto hd = static_cast<double>(h);
    if (harvey) {
        stat *= std::sqrt((nd + 1.0 - 2.0 * hd + hd * (hd - 1.0) / nd) / nd);
        const boost::math::students_t dist(nd - 1.0);
        r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(stat)));
    } else {
        r.p_value = two_sided_normal(stat);
    }
    r.statistic = stat;
    r.details["mean_differential"] = dbar;
    r.details["long_run_variance"] = v;
    r.details["horizon"] = hd;
    r.details["n"] = nd;
    decide(r);
    return r;
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha) {
    check_alpha(alpha);
    if (a.empty() || b.empty()) throw InsufficientDataError("rank-sum test needs two non-empty samples");
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    for (double v : all)
        if (!std::isfinite(v)) throw DomainError("rank-sum test values must be finite");
    const auto ranks = measures::average_ranks(all);
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w += ranks[i];
    const auto n1 = static_cast<double>(a.size());
    const auto n2 = static_cast<double>(b.size());
    const double nn = n1 + n2;
    const double expected = n1 * (nn + 1.0) / 2.0;
    const double var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term(all) / (nn * (nn - 1.0)));
    if (!(var > 0.0)) return tie_result("wilcoxon-rank-sum", alpha, "all values identical; samples tie");
    TestResult r;
    r.test = "wilcoxon-rank-sum";
    r.alpha = alpha;
    r.statistic = (w - expected) / std::sqrt(var);
    r.p_value = two_sided_normal(*r.statistic);
    r.details["rank_sum"] = w;
    r.details["n1"] = n1;
    r.details["n2"] = n2;
    decide(r);
    return r;
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha) {
    check_alpha(alpha);
    if (a.size() != b.size() || a.empty()) throw DomainError("signed-rank test needs aligned non-empty samples");
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] - b[i];
        if (!std::isfinite(x)) throw DomainError("signed-rank test values must be finite");
        if (x != 0.0) d.push_back(x);
    }
    if (d.empty()) return tie_result("wilcoxon-signed-rank", alpha, "all differences zero; samples tie");
    std::vector<double> mag(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
    const auto ranks = measures::average_ranks(mag);
    double wplus = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0.0) wplus += ranks[i];
    const auto n = static_cast<double>(d.size());
    const double expected = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(mag) / 48.0;
    if (!(var > 0.0)) return tie_result("wilcoxon-signed-rank", alpha, "degenerate rank variance");
    TestResult r;
    r.test = "wilcoxon-signed-rank";
    r.alpha = alpha;
    r.statistic = (wplus - expected) / std::sqrt(var);
    r.p_value = two_sided_normal(*r.statistic);
    r.details["w_plus"] = wplus;
    r.details["n_nonzero"] = n;
    decide(r);
    return r;
}

TestResult friedman(const measures::RankTable& table, double alpha) {
    check_alpha(alpha);
    const std::size_t n = table.ranks.size();
    const std::size_t k = table.models.size();
    if (n < 2 || k < 2) {
        throw InsufficientDataError("Friedman test needs N >= 2 series and k >= 2 models (got N=" +
                                    std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    std::vector<double> sums(k, 0.0);
    double ties = 0.0;
    for (const auto& row : table.ranks) {
        if (row.size() != k) throw DomainError("incomplete rank table");
        for (std::size_t j = 0; j < k; ++j) sums[j] += row[j];
        ties += tie_term(row);
    }
    const auto nd = static_cast<double>(n);
    const auto kd = static_cast<double>(k);
    double spread = 0.0;
    for (double s : sums) spread += (s - nd * (kd + 1.0) / 2.0) * (s - nd * (kd + 1.0) / 2.0);
    const double denom = nd * kd * (kd + 1.0) - ties / (kd - 1.0);
    TestResult r;
    r.test = "friedman";
    r.alpha = alpha;
    r.details["N"] = nd;
    r.details["k"] = kd;
    r.details["df"] = kd - 1.0;
    r.details["tie_correction"] = ties;
    if (denom <= 0.0 || spread == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        decide(r);
        return r;
    }
    const double chi2 = 12.0 * spread / denom;
    r.statistic = chi2;
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(kd - 1.0), chi2));
    decide(r);
    return r;
}

// ---------------------------------------------------------------------------

std::string to_string(AdjustMethod m) {
    switch (m) {
        case AdjustMethod::Holm: return "holm";
        case AdjustMethod::Hochberg: return "hochberg";
        case AdjustMethod::BonferroniDunn: return "bonferroni-dunn";
    }
    return "holm";
}

std::optional<AdjustMethod> parse_adjust(const std::string& text) {
    if (text == "holm") return AdjustMethod::Holm;
    if (text == "hochberg") return AdjustMethod::Hochberg;
    if (text == "bonferroni-dunn" || text == "bonferroni") return AdjustMethod::BonferroniDunn;
    return std::nullopt;
}

std::vector<double> p_adjust(std::span<const double> p, AdjustMethod method) {
    if (p.empty()) throw DomainError("p_adjust needs at least one p-value");
    for (double x : p)
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("p-values must lie in [0, 1]");
    const std::size_t m = p.size();
    const auto md = static_cast<double>(m);
    std::vector<double> out(m);
    if (method == AdjustMethod::BonferroniDunn) {
        for (std::size_t i = 0; i < m; ++i) out[i] = std::min(1.0, md * p[i]);
        return out;
    }
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    if (method == AdjustMethod::Holm) {
        double running = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double v = std::min(1.0, (md - static_cast<double>(r)) * p[idx[r]]);
            running = std::max(running, v);
            out[idx[r]] = running;
        }
    } else {
        double running = 1.0;
        for (std::size_t r = m; r-- > 0;) {
            const double v = std::min(1.0, (md - static_cast<double>(r)) * p[idx[r]]);
            running = std::min(running, v);
            out[idx[r]] = running;
        }
    }
    return out;
}

double nemenyi_q(std::size_t k, double alpha) {
    if (k < 2 || k > kMaxNemenyiModels) {
        throw ConfigError("Nemenyi quantile table covers 2 <= k <= " + std::to_string(kMaxNemenyiModels) +
                          " models (got " + std::to_string(k) + ")");
    }
    const std::array<double, 19>* table = nullptr;
    if (std::abs(alpha - 0.01) < 1e-12) table = &kQ001;
    if (std::abs(alpha - 0.05) < 1e-12) table = &kQ005;
    if (std::abs(alpha - 0.10) < 1e-12) table = &kQ010;
    if (!table) throw ConfigError("Nemenyi quantiles are tabled for alpha in {0.01, 0.05, 0.10}");
    return (*table)[k - 2];
}

double critical_distance(std::size_t k, std::size_t n, double alpha) {
    if (n < 1) throw InsufficientDataError("critical distance needs N >= 1");
    const auto kd = static_cast<double>(k);
    return nemenyi_q(k, alpha) * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

std::vector<std::vector<std::string>> nonsignificant_groups(const std::vector<std::string>& models,
                                                            const std::vector<PairResult>& pairs) {
    const std::size_t k = models.size();
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < k; ++i) pos[models[i]] = i;
    // Adjacency of the "not significantly different" relation.
    std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, true));
    for (std::size_t i = 0; i < k; ++i) adj[i][i] = false;
    for (const auto& p : pairs) {
        if (!p.significant) continue;
        const auto a = pos.at(p.a), b = pos.at(p.b);
        adj[a][b] = adj[b][a] = false;
    }
    std::vector<std::vector<std::size_t>> cliques;
    std::function<void(std::vector<std::size_t>, std::vector<std::size_t>, std::vector<std::size_t>)> bk =
        [&](std::vector<std::size_t> r, std::vector<std::size_t> p, std::vector<std::size_t> x) {
            if (p.empty() && x.empty()) {
                if (r.size() >= 2) cliques.push_back(r);
                return;
            }
            while (!p.empty()) {
                const std::size_t v = p.front();
                std::vector<std::size_t> r2 = r, p2, x2;
                r2.push_back(v);
                for (auto u : p)
                    if (adj[v][u]) p2.push_back(u);
                for (auto u : x)
                    if (adj[v][u]) x2.push_back(u);
                bk(r2, p2, x2);
                p.erase(p.begin());
                x.push_back(v);
            }
        };
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), std::size_t{0});
    bk({}, all, {});
    std::vector<std::vector<std::string>> out;
    for (auto& c : cliques) {
        std::sort(c.begin(), c.end());
        std::vector<std::string> g;
        for (auto i : c) g.push_back(models[i]);
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end());
    return out;
}

PostHocResult nemenyi_cd(const measures::RankTable& table, double alpha, std::optional<bool> friedman_rejected) {
    check_alpha(alpha);
    const std::size_t k = table.models.size();
    const std::size_t n = table.ranks.size();
    PostHocResult r;
    r.method = "nemenyi";
    r.alpha = alpha;
    r.models = table.models;
    r.mean_ranks = table.mean_ranks;
    r.critical_distance = critical_distance(k, n, alpha);
    if (friedman_rejected && !*friedman_rejected)
        r.warnings.push_back("Friedman test did not reject; post-hoc differences should be read with care");
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            PairResult p;
            p.a = table.models[i];
            p.b = table.models[j];
            p.rank_difference = table.mean_ranks[i] - table.mean_ranks[j];
            p.significant = std::abs(p.rank_difference) > *r.critical_distance;
            r.pairwise.push_back(p);
        }
    }
    r.groups = nonsignificant_groups(r.models, r.pairwise);
    return r;
}

PostHocResult p_adjust(const std::map<std::pair<std::string, std::string>, double>& pairwise_p,
                       AdjustMethod method, double alpha) {
    check_alpha(alpha);
    if (pairwise_p.empty()) throw DomainError("p_adjust needs at least one comparison");
    std::vector<double> raw;
    std::set<std::string> names;
    for (const auto& [key, p] : pairwise_p) {
        raw.push_back(p);
        names.insert(key.first);
        names.insert(key.second);
    }
    const auto adj = p_adjust(raw, method);
    PostHocResult r;
    r.method = to_string(method);
    r.alpha = alpha;
    r.models.assign(names.begin(), names.end());
    std::size_t i = 0;
    for (const auto& [key, p] : pairwise_p) {
        PairResult pr;
        pr.a = key.first;
        pr.b = key.second;
        pr.p_raw = p;
        pr.p_adjusted = adj[i++];
        pr.significant = *pr.p_adjusted < alpha;
        r.pairwise.push_back(pr);
    }
    r.groups = nonsignificant_groups(r.models, r.pairwise);
    return r;
}

// ---------------------------------------------------------------------------

CdLayout cd_diagram_data(const PostHocResult& ph) {
    CdLayout l;
    l.critical_distance = ph.critical_distance;
    l.axis_max = std::max<double>(1.0, static_cast<double>(ph.models.size()));
    std::map<std::string, double> rank;
    for (std::size_t i = 0; i < ph.models.size(); ++i) {
        const double r = i < ph.mean_ranks.size() ? ph.mean_ranks[i] : static_cast<double>(i + 1);
        rank[ph.models[i]] = r;
        l.positions.emplace_back(ph.models[i], r);
    }
    std::stable_sort(l.positions.begin(), l.positions.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& g : ph.groups) {
        CdBar bar;
        bar.models = g;
        std::sort(bar.models.begin(), bar.models.end(),
                  [&](const auto& a, const auto& b) { return rank[a] < rank[b]; });
        bar.lo = rank[bar.models.front()];
        bar.hi = rank[bar.models.back()];
        l.bars.push_back(std::move(bar));
    }
    std::sort(l.bars.begin(), l.bars.end(), [](const CdBar& a, const CdBar& b) {
        return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    });
    return l;
}

std::string render_cd_svg(const CdLayout& l) {
    const double width = 640.0, margin = 60.0;
    const double span = std::max(1.0, l.axis_max - l.axis_min);
    auto xpos = [&](double r) { return margin + (r - l.axis_min) / span * (width - 2 * margin); };
    const double axis_y = 60.0;
    const std::size_t nb = l.bars.size();
    const double bars_top = axis_y + 25.0;
    const double labels_top = bars_top + 12.0 * static_cast<double>(nb) + 20.0;
    const double height = labels_top + 18.0 * static_cast<double>(l.positions.size()) + 20.0;
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "  <line x1=\"" << xpos(l.axis_min) << "\" y1=\"" << axis_y << "\" x2=\"" << xpos(l.axis_max)
       << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
    for (int r = static_cast<int>(std::ceil(l.axis_min)); r <= static_cast<int>(std::floor(l.axis_max)); ++r) {
        os << "  <line x1=\"" << xpos(r) << "\" y1=\"" << axis_y - 5 << "\" x2=\"" << xpos(r) << "\" y2=\""
           << axis_y << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"" << xpos(r) << "\" y=\"" << axis_y - 9 << "\" text-anchor=\"middle\">" << r
           << "</text>\n";
    }
    if (l.critical_distance) {
        const double cd = *l.critical_distance;
        os << "  <line x1=\"" << xpos(l.axis_min) << "\" y1=\"20\" x2=\"" << xpos(l.axis_min + cd)
           << "\" y2=\"20\" stroke=\"black\" stroke-width=\"2\"/>\n";
        os << "  <text x=\"" << xpos(l.axis_min + cd / 2) << "\" y=\"15\" text-anchor=\"middle\">CD = " << cd
           << "</text>\n";
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const double y = bars_top + 12.0 * static_cast<double>(b);
        os << "  <line class=\"group\" x1=\"" << xpos(l.bars[b].lo) - 3 << "\" y1=\"" << y << "\" x2=\""
           << xpos(l.bars[b].hi) + 3 << "\" y2=\"" << y << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
    }
    for (std::size_t i = 0; i < l.positions.size(); ++i) {
        const auto& [name, r] = l.positions[i];
        const double y = labels_top + 18.0 * static_cast<double>(i);
        const bool left = r <= (l.axis_min + l.axis_max) / 2.0;
        const double tx = left ? margin - 10 : width - margin + 10;
        os << "  <polyline points=\"" << xpos(r) << "," << axis_y << " " << xpos(r) << "," << y << " " << tx
           << "," << y << "\" fill=\"none\" stroke=\"gray\"/>\n";
        os << "  <text x=\"" << tx + (left ? -4 : 4) << "\" y=\"" << y + 4 << "\" text-anchor=\""
           << (left ? "end" : "start") << "\">" << name << " (" << r << ")</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_cd_text(const CdLayout& l, std::size_t width) {
    width = std::max<std::size_t>(width, 20);
    const double span = std::max(1.0, l.axis_max - l.axis_min);
    auto col = [&](double r) {
        return static_cast<std::size_t>(std::lround((r - l.axis_min) / span * static_cast<double>(width - 1)));
    };
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    std::string axis(width, '-');
    for (int r = static_cast<int>(std::ceil(l.axis_min)); r <= static_cast<int>(std::floor(l.axis_max)); ++r)
        axis[col(r)] = '+';
    os << "rank " << l.axis_min << " .. " << l.axis_max;
    if (l.critical_distance) os << "   CD = " << *l.critical_distance;
    os << '\n' << axis << '\n';
    for (const auto& bar : l.bars) {
        std::string line(width, ' ');
        for (std::size_t c = col(bar.lo); c <= col(bar.hi); ++c) line[c] = '=';
        os << line << "  [";
        for (std::size_t i = 0; i < bar.models.size(); ++i) os << (i ? " " : "") << bar.models[i];
        os << "]\n";
    }
    for (const auto& [name, r] : l.positions) {
        std::string line(width, ' ');
        line[col(r)] = '|';
        os << line << "  " << name << " " << r << '\n';
    }
    return os.str();
}

}  // namespace fceval::stats
