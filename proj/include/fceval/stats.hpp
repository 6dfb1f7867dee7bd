#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fceval/measures.hpp"

namespace fceval::stats {

struct TestResult {
    std::string test;
    std::optional<double> statistic;  // empty for a declared tie
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    bool tie = false;
    std::map<std::string, double> details;
    std::vector<std::string> notes;
};

TestResult ljung_box(std::span<const double> residuals, std::size_t lags, std::size_t fitted_params = 0,
                     double alpha = 0.05);

/// d_t = loss_a - loss_b; a positive statistic means A has the larger loss.
TestResult diebold_mariano(std::span<const double> loss_a, std::span<const double> loss_b,
                           std::size_t horizon = 1, bool harvey_correction = false, double alpha = 0.05);

/// Two-sample rank-sum test; the statistic is the normal score of the rank
/// sum of `a`.
TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha = 0.05);
/// Paired signed-rank variant on a - b.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

TestResult friedman(const measures::RankTable& table, double alpha = 0.05);

// Post-hoc --------------------------------------------------------------------

enum class AdjustMethod { Holm, Hochberg, BonferroniDunn };
[[nodiscard]] std::string to_string(AdjustMethod m);
[[nodiscard]] std::optional<AdjustMethod> parse_adjust(const std::string& text);

std::vector<double> p_adjust(std::span<const double> p, AdjustMethod method);

struct PairResult {
    std::string a;
    std::string b;
    double rank_difference = 0.0;
    std::optional<double> p_raw;
    std::optional<double> p_adjusted;
    bool significant = false;
};

struct PostHocResult {
    std::string method;
    double alpha = 0.05;
    std::vector<std::string> models;
    std::vector<double> mean_ranks;
    std::optional<double> critical_distance;
    std::vector<PairResult> pairwise;
    std::vector<std::vector<std::string>> groups;
    std::vector<std::string> warnings;
};

/// Studentized-range quantile at infinite df divided by sqrt(2).
double nemenyi_q(std::size_t k, double alpha);
double critical_distance(std::size_t k, std::size_t n, double alpha);
inline constexpr std::size_t kMaxNemenyiModels = 20;

/// friedman_rejected, when given and false, adds a warning instead of
/// refusing to run.
PostHocResult nemenyi_cd(const measures::RankTable& table, double alpha = 0.05,
                         std::optional<bool> friedman_rejected = std::nullopt);

/// Pairwise raw p-values keyed by (a, b) adjusted together.
PostHocResult p_adjust(const std::map<std::pair<std::string, std::string>, double>& pairwise_p,
                       AdjustMethod method, double alpha = 0.05);

/// Maximal sets (size >= 2) of models with no significant pair among them.
std::vector<std::vector<std::string>> nonsignificant_groups(const std::vector<std::string>& models,
                                                            const std::vector<PairResult>& pairs);

// CD diagram ----------------------------------------------------------------

struct CdBar {
    std::vector<std::string> models;
    double lo = 0.0;  // smallest mean rank in the group
    double hi = 0.0;
};

struct CdLayout {
    double axis_min = 1.0;
    double axis_max = 1.0;
    std::optional<double> critical_distance;
    std::vector<std::pair<std::string, double>> positions;  // sorted by mean rank
    std::vector<CdBar> bars;
};

CdLayout cd_diagram_data(const PostHocResult& posthoc);
std::string render_cd_svg(const CdLayout& layout);
std::string render_cd_text(const CdLayout& layout, std::size_t width = 60);

}  // namespace fceval::stats
