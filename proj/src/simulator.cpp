#include "scholrel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "scholrel/rng.hpp"

namespace scholrel {

using nlohmann::json;

void SimConfig::validate() const {
    for (bool early : {false, true})
        for (bool treated : {false, true}) {
            const double p = open_model.cell(early, treated);
            if (p < 0.0 || p > 1.0)
                throw ConfigError("open probability outside [0,1] for cell (early=" +
                                  std::to_string(early) + ", treated=" +
                                  std::to_string(treated) + "): " + std::to_string(p));
        }
    if (early_fraction < 0.0 || early_fraction > 1.0)
        throw ConfigError("early_fraction must be in [0,1]");
    if (pct_featured < 0.0 || pct_featured > 1.0)
        throw ConfigError("pct_featured must be in [0,1]");
}

SimConfig load_sim_config(std::istream& in) {
    json j = json::parse(in);
    SimConfig c;
    c.seed = j.value("seed", 0ULL);
    c.n_users_per_condition = j.value("n_users_per_condition", c.n_users_per_condition);
    c.emails_per_user = j.value("emails_per_user", c.emails_per_user);
    c.early_fraction = j.value("early_fraction", c.early_fraction);
    c.pct_featured = j.value("pct_featured", c.pct_featured);
    c.n_papers = j.value("n_papers", c.n_papers);
    if (j.contains("clicked_h_bias") && !j["clicked_h_bias"].is_null())
        c.clicked_h_bias = j["clicked_h_bias"].get<double>();
    if (j.contains("open_model")) {
        std::istringstream s(j["open_model"].dump());
        c.open_model = load_did_coefficients(s);
    }
    if (j.contains("click_model")) {
        std::istringstream s(j["click_model"].dump());
        c.click_model = load_model_coefficients(s);
    }
    if (j.contains("conditions")) {
        c.conditions.clear();
        for (const auto& v : j["conditions"]) {
            auto cond = condition_from_string(v.get<std::string>());
            if (!cond)
                throw ConfigError("unknown condition '" + v.get<std::string>() + "'");
            c.conditions.push_back(*cond);
        }
    }
    c.validate();
    return c;
}

std::vector<EmailMeta> synth_emails(const SimConfig& config) {
    std::vector<EmailMeta> emails;
    const int early_count =
        static_cast<int>(std::floor(config.early_fraction * config.emails_per_user + 1e-9));
    for (Condition cond : config.conditions) {
        for (int u = 0; u < config.n_users_per_condition; ++u) {
            const std::string user_id =
                std::string(to_string(cond)) + "-u" + std::to_string(u);
            for (int e = 0; e < config.emails_per_user; ++e) {
                EmailMeta m;
                m.email_id = user_id + "-e" + std::to_string(e);
                m.user_id = user_id;
                m.condition = cond;
                m.early = e < early_count;
                m.pct_featured = cond == Condition::Control ? 0.0 : config.pct_featured;
                m.n_papers = config.n_papers;
                m.n_norm = 1.0;
                emails.push_back(std::move(m));
            }
        }
    }
    return emails;
}

std::vector<EngagementRecord> simulate(const SimConfig& config,
                                       const std::vector<EmailMeta>& emails) {
    config.validate();
    std::vector<EngagementRecord> records;
    records.reserve(emails.size());
    for (const auto& m : emails) {
        CounterRng rng(config.seed, m.email_id);
        const bool treated = m.condition != Condition::Control;
        const double p_open = config.open_model.cell(m.early, treated);
        EngagementRecord r;
        r.email_id = m.email_id;
        r.user_id = m.user_id;
        r.condition = m.condition;
        r.early = m.early;
        r.pct_featured = m.pct_featured;
        r.n_papers = m.n_papers;
        r.claimed = m.claimed;
        r.h_norm = m.h_norm;
        r.n_norm = m.n_norm;
        r.max_author_h = m.max_author_h;
        r.mean_author_h = m.mean_author_h;
        r.opened = rng.next_unit() < p_open;
        if (r.opened) {
            const double p_click =
                predict_ctr(config.click_model, m.pct_featured, m.n_norm, m.claimed, m.h_norm);
            r.clicked = rng.next_unit() < p_click;
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<std::size_t> sample_clicked(std::uint64_t seed,
                                        const std::vector<double>& paper_h,
                                        int n_clicks, double bias) {
    if (paper_h.empty())
        throw std::invalid_argument("sample_clicked: no papers");
    std::vector<double> cumulative(paper_h.size());
    double total = 0.0;
    for (std::size_t i = 0; i < paper_h.size(); ++i) {
        const double w = bias == 0.0 ? 1.0 : std::pow(std::max(paper_h[i], 0.0), bias);
        total += w;
        cumulative[i] = total;
    }
    if (total <= 0.0)
        throw std::invalid_argument("sample_clicked: all weights zero");
    CounterRng rng(seed, "clicked-papers");
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(n_clicks));
    for (int k = 0; k < n_clicks; ++k) {
        const double u = rng.next_unit() * total;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
    }
    return out;
}

} // namespace scholrel
