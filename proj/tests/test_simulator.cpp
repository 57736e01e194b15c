#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "scholrel/simulator.hpp"

using namespace scholrel;

namespace {

SimConfig b2_config(std::uint64_t seed, int n_users) {
    SimConfig c;
    c.seed = seed;
    c.n_users_per_condition = n_users;
    c.emails_per_user = 10;
    c.early_fraction = 0.5;
    c.open_model.intercept = 0.256;
    c.open_model.early_exposure = -0.037;
    c.open_model.message = 0.045;
    c.open_model.interaction = -0.031;
    c.click_model.intercept = -8.20;
    return c;
}

std::string log_bytes(const std::vector<EngagementRecord>& records) {
    std::ostringstream out;
    write_engagement_log(out, records);
    return out.str();
}

} // namespace

TEST_CASE("certain opens and impossible clicks") {
    SimConfig c;
    c.seed = 5;
    c.n_users_per_condition = 20;
    c.emails_per_user = 5;
    c.open_model.intercept = 1.0; // every cell opens
    c.click_model.intercept = -1000.0;
    const auto emails = synth_emails(c);
    const auto records = simulate(c, emails);
    REQUIRE(records.size() == emails.size());
    for (const auto& r : records) {
        CHECK(r.opened);
        CHECK_FALSE(r.clicked);
    }
}

TEST_CASE("same seed gives byte-identical logs") {
    const auto config = b2_config(42, 50);
    const auto emails = synth_emails(config);
    CHECK(log_bytes(simulate(config, emails)) == log_bytes(simulate(config, emails)));
}

TEST_CASE("per-email draws are independent of email order") {
    const auto config = b2_config(7, 30);
    auto emails = synth_emails(config);
    const auto forward = simulate(config, emails);
    std::reverse(emails.begin(), emails.end());
    auto reversed = simulate(config, emails);
    std::reverse(reversed.begin(), reversed.end());
    CHECK(log_bytes(forward) == log_bytes(reversed));
}

TEST_CASE("clicked implies opened") {
    auto config = b2_config(11, 100);
    config.click_model.intercept = 2.0; // high click probability to exercise the path
    const auto records = simulate(config, synth_emails(config));
    bool any_clicked = false;
    for (const auto& r : records) {
        if (r.clicked) {
            any_clicked = true;
            CHECK(r.opened);
        }
    }
    CHECK(any_clicked);
}

TEST_CASE("synth_emails builds the early/late grid") {
    const auto config = b2_config(1, 4);
    const auto emails = synth_emails(config);
    CHECK(emails.size() == 2u * 4u * 10u); // two conditions
    int early = 0;
    for (const auto& m : emails) {
        early += m.early ? 1 : 0;
        if (m.condition == Condition::Control)
            CHECK(m.pct_featured == 0.0);
        else
            CHECK(m.pct_featured == doctest::Approx(0.25));
    }
    CHECK(early == static_cast<int>(emails.size()) / 2);
}

TEST_CASE("did_fit recovers the configured open model") {
    const auto config = b2_config(2024, 800); // 2000 emails per cell
    const auto records = simulate(config, synth_emails(config));
    const auto fit = did_fit(records);
    const long n_cell = 800L * 10L / 2L;
    auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / n_cell); };
    const double se_lc = se(0.256), se_ec = se(0.219), se_lt = se(0.301), se_et = se(0.233);
    CHECK(std::fabs(fit.intercept - 0.256) < 3.0 * se_lc);
    CHECK(std::fabs(fit.early_exposure + 0.037) < 3.0 * std::hypot(se_lc, se_ec));
    CHECK(std::fabs(fit.message - 0.045) < 3.0 * std::hypot(se_lc, se_lt));
    CHECK(std::fabs(fit.interaction + 0.031) <
          3.0 * std::sqrt(se_lc * se_lc + se_ec * se_ec + se_lt * se_lt + se_et * se_et));
}

TEST_CASE("open indicators show no serial correlation") {
    const auto config = b2_config(99, 2000); // 20000 control emails in sequence order
    const auto records = simulate(config, synth_emails(config));
    std::vector<double> opens;
    for (const auto& r : records)
        if (r.condition == Condition::Control && !r.early)
            opens.push_back(r.opened ? 1.0 : 0.0);
    REQUIRE(opens.size() >= 10000);
    const double n = static_cast<double>(opens.size());
    const double mean = std::accumulate(opens.begin(), opens.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < opens.size(); ++i) {
        den += (opens[i] - mean) * (opens[i] - mean);
        if (i + 1 < opens.size())
            num += (opens[i] - mean) * (opens[i + 1] - mean);
    }
    const double r1 = num / den;
    CHECK(std::fabs(r1) < 4.0 / std::sqrt(n)); // inside the null band
}

TEST_CASE("config validation rejects out-of-range probabilities") {
    SimConfig c;
    c.open_model.intercept = 0.9;
    c.open_model.message = 0.3; // implied treated cell 1.2
    CHECK_THROWS_AS(c.validate(), ConfigError);

    std::istringstream bad(R"({"open_model": {"intercept": -0.1}})");
    CHECK_THROWS_AS(load_sim_config(bad), ConfigError);
    std::istringstream unknown(R"({"conditions": ["bogus"]})");
    CHECK_THROWS_AS(load_sim_config(unknown), ConfigError);
}

TEST_CASE("load_sim_config parses nested models") {
    std::istringstream in(R"({
        "seed": 9, "n_users_per_condition": 3, "emails_per_user": 4,
        "early_fraction": 0.25, "pct_featured": 0.4, "n_papers": 12,
        "open_model": {"intercept": 0.3, "message": 0.1},
        "click_model": {"intercept": -2.0, "beta_feat": 1.0},
        "conditions": ["control", "citation"], "clicked_h_bias": 1.5
    })");
    const auto c = load_sim_config(in);
    CHECK(c.seed == 9);
    CHECK(c.open_model.message == 0.1);
    CHECK(c.click_model.beta_feat == 1.0);
    CHECK(c.conditions == std::vector<Condition>{Condition::Control, Condition::Citation});
    CHECK(c.clicked_h_bias == 1.5);
    // early_fraction 0.25 of 4 emails -> exactly the first email is early
    const auto emails = synth_emails(c);
    int early = 0;
    for (const auto& m : emails)
        early += m.early ? 1 : 0;
    CHECK(early == 2 * 3 * 1);
}

TEST_CASE("sample_clicked weights draws by h^bias") {
    std::vector<double> h{1.0, 2.0, 4.0, 8.0};
    const auto biased = sample_clicked(3, h, 20000, 1.0);
    const auto uniform = sample_clicked(3, h, 20000, 0.0);
    std::array<int, 4> nb{}, nu{};
    for (auto i : biased)
        ++nb[i];
    for (auto i : uniform)
        ++nu[i];
    // expected biased proportions 1/15, 2/15, 4/15, 8/15
    CHECK(std::fabs(nb[3] / 20000.0 - 8.0 / 15.0) < 0.02);
    CHECK(std::fabs(nb[0] / 20000.0 - 1.0 / 15.0) < 0.02);
    for (int i = 0; i < 4; ++i)
        CHECK(std::fabs(nu[i] / 20000.0 - 0.25) < 0.02);

    CHECK_THROWS_AS(sample_clicked(1, {}, 5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_clicked(1, {0.0, 0.0}, 5, 1.0), std::invalid_argument);
}
