// scholrel — relevance-message generation and engagement analytics CLI.
//
// Subcommands: ingest, generate, render, simulate, analyze, predict-ctr.
// Exit codes: 0 success, 1 internal error, 2 input error, 3 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scholrel/analytics.hpp"
#include "scholrel/composer.hpp"
#include "scholrel/corpus.hpp"
#include "scholrel/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scholrel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

struct RunConfig {
    std::string papers_path;
    std::string authors_path;
    std::string users_path;
    std::string recs_path;
    std::string condition = "control";
    double cap = 0.5;
    double a = 2.0;
    double b = 1.0;
    double log_base = 0.0; // 0 = natural log
    std::uint64_t seed = 0;
    double avg_h_index = 1.0;
    double avg_email_length = 1.0;
    std::string out_dir = ".";
    std::string templates_path;
    std::string date; // used in digest filenames
    bool exclude_negative = false;
};

std::string today() {
    std::time_t t = std::time(nullptr);
    char buf[16];
    std::strftime(buf, sizeof(buf), "%Y-%m-%d", std::localtime(&t));
    return buf;
}

/// SCHOLREL_CONFIG may point at a JSON RunConfig; flags override its values.
RunConfig config_from_env() {
    RunConfig c;
    const char* path = std::getenv("SCHOLREL_CONFIG");
    if (!path)
        return c;
    std::ifstream in(path);
    if (!in)
        throw ConfigError(std::string("cannot open SCHOLREL_CONFIG file: ") + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("SCHOLREL_CONFIG must contain one JSON object");
    c.papers_path = j.value("papers", c.papers_path);
    c.authors_path = j.value("authors", c.authors_path);
    c.users_path = j.value("users", c.users_path);
    c.recs_path = j.value("recs", c.recs_path);
    c.condition = j.value("condition", c.condition);
    c.cap = j.value("cap", c.cap);
    c.a = j.value("a", c.a);
    c.b = j.value("b", c.b);
    c.log_base = j.value("log_base", c.log_base);
    c.seed = j.value("seed", c.seed);
    c.avg_h_index = j.value("avg_h_index", c.avg_h_index);
    c.avg_email_length = j.value("avg_email_length", c.avg_email_length);
    c.out_dir = j.value("out", c.out_dir);
    c.templates_path = j.value("templates", c.templates_path);
    c.date = j.value("date", c.date);
    c.exclude_negative = j.value("exclude_negative_from_sources", c.exclude_negative);
    return c;
}

void validate(const RunConfig& c) {
    if (c.cap < 0.0 || c.cap > 1.0)
        throw ConfigError("cap must be in [0,1]");
    if (c.avg_h_index <= 0.0 || c.avg_email_length <= 0.0)
        throw ConfigError("normalization divisors must be > 0");
    if (c.a <= 0.0 || c.b <= 0.0)
        throw ConfigError("scoring weights a and b must be > 0");
    if (c.log_base != 0.0 && c.log_base <= 1.0)
        throw ConfigError("log base must be > 1");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IngestError("cannot open file: " + path, 0);
    return in;
}

CorpusIndex load_index(const RunConfig& cfg) {
    auto papers = open_input(cfg.papers_path);
    auto authors = open_input(cfg.authors_path);
    return ingest_corpus(papers, authors);
}

std::vector<UserProfile> load_users(const RunConfig& cfg) {
    auto in = open_input(cfg.users_path);
    return ingest_users(in);
}

struct RecLine {
    std::string user_id;
    std::string feed_id;
    std::vector<std::string> paper_ids;
};

std::vector<RecLine> load_recs(const std::string& path) {
    auto in = open_input(path);
    std::vector<RecLine> recs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw IngestError("malformed recommendation record", lineno);
        RecLine r;
        r.user_id = j.value("user", "");
        r.feed_id = j.value("feed_id", "");
        if (r.user_id.empty() || r.feed_id.empty() || !j.contains("papers"))
            throw IngestError("recommendation record needs 'user', 'feed_id', 'papers'", lineno);
        for (const auto& v : j["papers"])
            r.paper_ids.push_back(v.get<std::string>());
        recs.push_back(std::move(r));
    }
    return recs;
}

ModelCoefficients load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open coefficient file: " + path);
    return load_model_coefficients(in);
}

MessageTemplateSet templates_for(const RunConfig& cfg) {
    if (cfg.templates_path.empty())
        return default_templates();
    std::ifstream in(cfg.templates_path);
    if (!in)
        throw ConfigError("cannot open template file: " + cfg.templates_path);
    return load_templates(in);
}

int cmd_ingest(const RunConfig& cfg) {
    const CorpusIndex index = load_index(cfg);
    std::size_t n_users = 0;
    if (!cfg.users_path.empty())
        n_users = load_users(cfg).size();
    std::cout << "papers: " << index.papers.size() << "\n"
              << "authors: " << index.authors.size() << "\n"
              << "users: " << n_users << "\n"
              << "citation edges: "
              << [&] {
                     long n = 0;
                     for (const auto& [id, c] : index.incoming_citations)
                         n += c;
                     return n;
                 }()
              << "\n";
    return kExitOk;
}

Condition parse_condition(const std::string& name) {
    auto c = condition_from_string(name);
    if (!c)
        throw CLI::ValidationError("condition", "unknown condition '" + name + "'");
    return *c;
}

int generate_impl(const RunConfig& cfg, bool write_metadata, bool write_text, bool write_html) {
    const Condition condition = parse_condition(cfg.condition);
    const CorpusIndex index = load_index(cfg);
    const auto users = load_users(cfg);
    const auto recs = load_recs(cfg.recs_path);

    std::map<std::string, const UserProfile*> by_id;
    for (const auto& u : users)
        by_id[u.id] = &u;

    AssembleOptions opts;
    opts.scoring = {cfg.a, cfg.b, cfg.log_base};
    opts.sources.exclude_negative_from_sources = cfg.exclude_negative;
    opts.templates = templates_for(cfg);

    fs::create_directories(cfg.out_dir);
    const std::string date = cfg.date.empty() ? today() : cfg.date;
    std::ofstream meta;
    if (write_metadata) {
        meta.open(fs::path(cfg.out_dir) / "emails.jsonl", std::ios::trunc);
        if (!meta)
            throw std::runtime_error("cannot write emails.jsonl");
    }

    for (const auto& rec : recs) {
        auto it = by_id.find(rec.user_id);
        if (it == by_id.end()) {
            std::cerr << "warning: unknown user '" << rec.user_id << "', skipped\n";
            continue;
        }
        const AlertEmail email = assemble_email(*it->second, rec.feed_id, rec.paper_ids,
                                                condition, cfg.cap, cfg.seed, index, opts);
        if (email.skipped > 0)
            std::cerr << "warning: " << email.skipped << " unresolvable paper id(s) in "
                      << rec.user_id << "/" << rec.feed_id << "\n";
        const std::string stem = rec.user_id + "_" + rec.feed_id + "_" + date;
        if (write_text) {
            std::ofstream out(fs::path(cfg.out_dir) / (stem + ".txt"), std::ios::trunc);
            out << render_digest(email, DigestFormat::Text);
        }
        if (write_html) {
            std::ofstream out(fs::path(cfg.out_dir) / (stem + ".html"), std::ios::trunc);
            out << render_digest(email, DigestFormat::Html);
        }
        if (write_metadata) {
            meta << json{{"email_id", stem},
                         {"user", rec.user_id},
                         {"feed_id", rec.feed_id},
                         {"condition", to_string(condition)},
                         {"n_papers", email.recommendations.size()},
                         {"n_messages", email.message_count()},
                         {"pct_featured", email.pct_featured()},
                         {"kind", condition == Condition::Control ? "none"
                                                                  : to_string(condition)}}
                        .dump()
                 << "\n";
        }
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& sim_config_path,
                 const std::string& out_path) {
    std::ifstream in(sim_config_path);
    if (!in)
        throw ConfigError("cannot open simulator config: " + sim_config_path);
    SimConfig sim = load_sim_config(in);
    if (cfg.seed != 0)
        sim.seed = cfg.seed;
    const auto emails = synth_emails(sim);
    const auto records = simulate(sim, emails);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + out_path);
    write_engagement_log(out, records);
    std::cout << "emails simulated: " << records.size() << "\n";
    return kExitOk;
}

void print_summary(std::ostream& out, const std::map<Condition, ConditionSummary>& summary) {
    out << "condition,n_emails,open_rate,ctr,mean_messages,mean_pct_featured\n";
    for (const auto& [cond, s] : summary)
        out << to_string(cond) << "," << s.n_emails << "," << s.open_rate << "," << s.ctr
            << "," << s.mean_messages << "," << s.mean_pct_featured << "\n";
}

int cmd_analyze(const RunConfig& cfg, const std::string& report, const std::string& logs_path,
                const std::string& coeffs_path, bool claimed, double h_norm,
                const std::string& agg_name) {
    fs::create_directories(cfg.out_dir);
    if (report == "curve") {
        if (coeffs_path.empty())
            throw ConfigError("curve report needs --coeffs");
        const ModelCoefficients coeffs = load_model_file(coeffs_path);
        std::ofstream out(fs::path(cfg.out_dir) / "curve.csv", std::ios::trunc);
        out << "pct_featured,claimed,h_norm,p_ctr\n" << std::setprecision(12);
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            out << x << "," << (claimed ? 1 : 0) << "," << h_norm << ","
                << predict_ctr(coeffs, x, 0.0, claimed, h_norm) << "\n";
        }
        if (auto peak = peak_pct_featured(coeffs, claimed, h_norm))
            std::cout << "peak pct_featured: " << *peak << "\n";
        else
            std::cout << "peak pct_featured: none (non-concave logit)\n";
        return kExitOk;
    }

    auto in = open_input(logs_path);
    const auto logs = load_engagement_log(in);
    if (report == "summary") {
        if (logs.empty()) {
            std::cerr << "warning: empty log, nothing to summarize\n";
            return kExitOk;
        }
        const auto summary = engagement_summary(logs);
        print_summary(std::cout, summary);
        std::ofstream out(fs::path(cfg.out_dir) / "summary.csv", std::ios::trunc);
        print_summary(out, summary);
        return kExitOk;
    }
    if (report == "did") {
        // one fit per treatment condition present, each against Control
        std::set<Condition> treatments;
        for (const auto& r : logs)
            if (r.condition != Condition::Control)
                treatments.insert(r.condition);
        json out_json = json::object();
        for (Condition t : treatments) {
            std::vector<EngagementRecord> subset;
            for (const auto& r : logs)
                if (r.condition == Condition::Control || r.condition == t)
                    subset.push_back(r);
            const DiDCoefficients c = did_fit(subset);
            std::cout << to_string(t) << ": intercept=" << c.intercept
                      << " early_exposure=" << c.early_exposure << " message=" << c.message
                      << " interaction=" << c.interaction << "\n";
            out_json[to_string(t)] = {{"intercept", c.intercept},
                                      {"early_exposure", c.early_exposure},
                                      {"message", c.message},
                                      {"interaction", c.interaction}};
        }
        std::ofstream out(fs::path(cfg.out_dir) / "did.json", std::ios::trunc);
        out << out_json.dump(2) << "\n";
        return kExitOk;
    }
    if (report == "fairness") {
        const bool use_mean = agg_name == "mean";
        HSample background;
        std::map<std::string, HSample> clicked;
        for (const auto& r : logs) {
            const auto h = use_mean ? r.mean_author_h : r.max_author_h;
            if (!h) {
                ++background.excluded;
                continue;
            }
            background.values.push_back(*h);
            if (r.clicked)
                clicked[to_string(r.condition)].values.push_back(*h);
        }
        const FairnessReport rep = fairness_report(background, clicked);
        std::ostringstream text;
        text << std::setprecision(6);
        text << "group,n,mean,sd,median\n";
        text << "background," << rep.background.n << "," << rep.background.mean << ","
             << rep.background.sd << "," << rep.background.median << "\n";
        for (const auto& [name, s] : rep.clicked)
            text << "clicked:" << name << "," << s.n << "," << s.mean << "," << s.sd << ","
                 << s.median << "\n";
        text << "\ncomparison,t,df,p\n";
        for (const auto& [ga, gb, w] : rep.tests)
            text << ga << " vs " << gb << "," << w.t << "," << w.df << "," << w.p << "\n";
        std::cout << text.str();
        std::ofstream out(fs::path(cfg.out_dir) / "fairness.csv", std::ios::trunc);
        out << text.str();
        return kExitOk;
    }
    throw CLI::ValidationError("report", "unknown report '" + report + "'");
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    try {
        cfg = config_from_env();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    CLI::App app{"Graph-based relevance messages for scholarly alert emails"};
    app.require_subcommand(1);

    // shared flags
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--papers", cfg.papers_path, "papers.jsonl path");
        sub->add_option("--authors", cfg.authors_path, "authors.jsonl path");
        sub->add_option("--users", cfg.users_path, "users.jsonl path");
        sub->add_option("--seed", cfg.seed, "run seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
    };

    auto* ingest = app.add_subcommand("ingest", "Load a corpus and print entity counts");
    add_common(ingest);

    std::string format = "both";
    auto add_generate_flags = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--recs", cfg.recs_path, "recommendations JSONL path");
        sub->add_option("--condition", cfg.condition,
                        "control|citation|direct-author|indirect-author");
        sub->add_option("--cap", cfg.cap, "coverage cap fraction");
        sub->add_option("--a", cfg.a, "co-authorship weight");
        sub->add_option("--b", cfg.b, "citation weight");
        sub->add_option("--log-base", cfg.log_base, "log base (0 = natural)");
        sub->add_option("--templates", cfg.templates_path, "template override JSON");
        sub->add_option("--date", cfg.date, "date stamp for digest filenames");
        sub->add_flag("--exclude-negative", cfg.exclude_negative,
                      "drop negatively rated feed papers from the relevance sources");
    };
    auto* generate = app.add_subcommand("generate", "Assemble emails, render digests, emit metadata");
    add_generate_flags(generate);
    auto* render = app.add_subcommand("render", "Render digests only");
    add_generate_flags(render);
    render->add_option("--format", format, "text|html|both");

    std::string sim_config_path, logs_out = "logs.jsonl";
    auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic engagement log");
    simulate_cmd->add_option("--config", sim_config_path, "SimConfig JSON")->required();
    simulate_cmd->add_option("--logs-out", logs_out, "output JSONL path");
    simulate_cmd->add_option("--seed", cfg.seed, "override config seed");

    std::string report = "summary", logs_path, coeffs_path, agg_name = "max";
    bool claimed = false;
    double h_norm = 0.0, x_val = 0.0, n_norm = 0.0;
    auto* analyze = app.add_subcommand("analyze", "Run an analytics report");
    analyze->add_option("--report", report, "summary|did|fairness|curve");
    analyze->add_option("--logs", logs_path, "engagement log JSONL");
    analyze->add_option("--coeffs", coeffs_path, "coefficient JSON (curve report)");
    analyze->add_option("--claimed", claimed, "claimed-profile covariate");
    analyze->add_option("--h-norm", h_norm, "normalized h-index covariate");
    analyze->add_option("--aggregation", agg_name, "max|mean (fairness report)");
    analyze->add_option("--out", cfg.out_dir, "output directory");

    auto* predict = app.add_subcommand("predict-ctr", "Evaluate the logit CTR model once");
    predict->add_option("--coeffs", coeffs_path, "coefficient JSON")->required();
    predict->add_option("--x", x_val, "pct featured")->required();
    predict->add_option("--claimed", claimed, "claimed-profile covariate");
    predict->add_option("--h-norm", h_norm, "normalized h-index covariate");
    predict->add_option("--n-norm", n_norm, "normalized email length covariate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitInput;
    }

    try {
        validate(cfg);
        if (ingest->parsed())
            return cmd_ingest(cfg);
        if (generate->parsed())
            return generate_impl(cfg, true, true, true);
        if (render->parsed()) {
            if (format != "text" && format != "html" && format != "both")
                throw CLI::ValidationError("format", "unknown format '" + format + "'");
            return generate_impl(cfg, false, format != "html", format != "text");
        }
        if (simulate_cmd->parsed())
            return cmd_simulate(cfg, sim_config_path, logs_out);
        if (analyze->parsed())
            return cmd_analyze(cfg, report, logs_path, coeffs_path, claimed, h_norm, agg_name);
        if (predict->parsed()) {
            const ModelCoefficients coeffs = load_model_file(coeffs_path);
            std::cout << std::setprecision(12)
                      << predict_ctr(coeffs, x_val, n_norm, claimed, h_norm) << "\n";
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
