#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scholrel/composer.hpp"

namespace scholrel {

/// Logit-model coefficients; absent terms are zero.
struct ModelCoefficients {
    double intercept = 0.0;
    double beta_feat = 0.0;   // linear % featured
    double beta_feat2 = 0.0;  // quadratic % featured
    double beta_npapers = 0.0;
    double beta_claimed = 0.0;
    double beta_hindex = 0.0;
    double feat_x_claimed = 0.0;
    double feat2_x_claimed = 0.0;
    double feat_x_hindex = 0.0;
    double feat2_x_hindex = 0.0;
};

ModelCoefficients load_model_coefficients(std::istream& in);

/// Saturated 2x2 linear-probability coefficients, probability scale.
struct DiDCoefficients {
    double intercept = 0.0;      // mean(late, control)
    double early_exposure = 0.0;
    double message = 0.0;
    double interaction = 0.0;

    double cell(bool early, bool treated) const {
        return intercept + (early ? early_exposure : 0.0) + (treated ? message : 0.0) +
               (early && treated ? interaction : 0.0);
    }
};

DiDCoefficients load_did_coefficients(std::istream& in);

struct EngagementRecord {
    std::string email_id;
    std::string user_id;
    Condition condition = Condition::Control;
    bool early = false;
    bool opened = false;
    bool clicked = false;
    double pct_featured = 0.0;
    int n_papers = 0;
    bool claimed = false;
    double h_norm = 0.0;
    double n_norm = 0.0;
    std::optional<double> max_author_h;
    std::optional<double> mean_author_h;
};

std::vector<EngagementRecord> load_engagement_log(std::istream& in);
void write_engagement_log(std::ostream& out, const std::vector<EngagementRecord>& records);

/// Logistic prediction at random intercept 0.
double predict_ctr(const ModelCoefficients& coeffs, double pct_featured, double n_norm,
                   bool claimed, double h_norm);

/// Numeric argmax of predict_ctr over pct_featured in [0,1]; absent when the
/// effective quadratic in the logit is non-concave with the maximum running
/// off a boundary.
std::optional<double> peak_pct_featured(const ModelCoefficients& coeffs, bool claimed,
                                        double h_norm);

/// Fit the saturated 2x2 open-rate model on control + one treatment.
/// Throws std::runtime_error naming any empty cell.
DiDCoefficients did_fit(const std::vector<EngagementRecord>& logs);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0; // two-tailed
};

/// Throws std::invalid_argument on samples of size < 2 or zero pooled variance.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b); exposed for the t-distribution tail.
double incomplete_beta(double a, double b, double x);

/// Two-tailed p for a t statistic with df degrees of freedom.
double t_two_tailed_p(double t, double df);

/// Tricube-weighted local linear smoother; `iterations` robustness passes.
std::vector<double> lowess(const std::vector<std::pair<double, double>>& points,
                           double frac, int iterations = 0);

struct ConditionSummary {
    int n_emails = 0;
    double open_rate = 0.0;
    double ctr = 0.0;
    double mean_messages = 0.0;
    double mean_pct_featured = 0.0;
};

std::map<Condition, ConditionSummary> engagement_summary(
    const std::vector<EngagementRecord>& logs);

enum class HAggregation { Max, Mean };

struct HSample {
    std::vector<double> values;
    int excluded = 0; // papers with no author h-index available
};

/// Aggregate per-paper h-index (max or mean over authors with a record).
HSample aggregate_h(const std::vector<std::string>& paper_ids, const CorpusIndex& index,
                    HAggregation aggregation);

struct GroupStats {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
};

GroupStats group_stats(const std::vector<double>& values);

struct FairnessReport {
    GroupStats background;
    int background_excluded = 0;
    std::map<std::string, GroupStats> clicked; // group name -> stats
    std::map<std::string, int> clicked_excluded;
    // (group A, group B) -> Welch result; includes background-vs-clicked and
    // clicked-vs-clicked pairs.
    std::vector<std::tuple<std::string, std::string, WelchResult>> tests;
};

FairnessReport fairness_report(const HSample& background,
                               const std::map<std::string, HSample>& clicked_by_group);

} // namespace scholrel
