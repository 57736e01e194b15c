#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "scholrel/analytics.hpp"

namespace scholrel {

struct SimConfig {
    std::uint64_t seed = 0;
    int n_users_per_condition = 100;
    int emails_per_user = 10;
    double early_fraction = 0.5;
    DiDCoefficients open_model;
    ModelCoefficients click_model;
    std::optional<double> clicked_h_bias;
    // shape of the synthesized emails
    std::vector<Condition> conditions = {Condition::Control, Condition::DirectAuthor};
    double pct_featured = 0.25; // applied to treatment emails
    int n_papers = 10;

    /// Throws ConfigError when an implied open probability leaves [0,1].
    void validate() const;
};

SimConfig load_sim_config(std::istream& in);

/// Per-email metadata driving the engagement draws.
struct EmailMeta {
    std::string email_id;
    std::string user_id;
    Condition condition = Condition::Control;
    bool early = false;
    bool claimed = false;
    double pct_featured = 0.0;
    int n_papers = 0;
    double h_norm = 0.0;
    double n_norm = 0.0;
    std::optional<double> max_author_h;
    std::optional<double> mean_author_h;
};

/// Synthesize the email grid described by the config: for each condition,
/// n_users_per_condition users with emails_per_user emails each, the first
/// early_fraction of every user's sequence flagged early.
std::vector<EmailMeta> synth_emails(const SimConfig& config);

/// Bernoulli open per DiD cell probability; click via the logit model,
/// conditioned on opened. Deterministic given (config.seed, email ids) and
/// independent of email order.
std::vector<EngagementRecord> simulate(const SimConfig& config,
                                       const std::vector<EmailMeta>& emails);

/// Sample n_clicks paper indices (with replacement) with probability
/// proportional to h^bias; bias 0 is uniform. Used by the fairness audit.
std::vector<std::size_t> sample_clicked(std::uint64_t seed,
                                        const std::vector<double>& paper_h,
                                        int n_clicks, double bias);

} // namespace scholrel
