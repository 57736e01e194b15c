#include "scholrel/composer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace scholrel {

const char* to_string(Condition c) {
    switch (c) {
    case Condition::Control: return "control";
    case Condition::Citation: return "citation";
    case Condition::DirectAuthor: return "direct-author";
    case Condition::IndirectAuthor: return "indirect-author";
    }
    return "?";
}

std::optional<Condition> condition_from_string(const std::string& name) {
    if (name == "control") return Condition::Control;
    if (name == "citation") return Condition::Citation;
    if (name == "direct-author") return Condition::DirectAuthor;
    if (name == "indirect-author") return Condition::IndirectAuthor;
    return std::nullopt;
}

MessageTemplateSet default_templates() {
    return {
        {"citation.prefix", "Also cites: "},
        {"citation.authored", "{count} {papers} you authored"},
        {"citation.library", "{count} {papers} in your library"},
        {"citation.feed", "{count} {papers} in your feed"},
        {"citation.library_feed_merged", "{count} {papers} in your library and feeds"},
        {"direct.authored", "co-authored {count} {papers} with you"},
        {"direct.library", "authored {count} {papers} in your library"},
        {"direct.feed", "authored {count} {papers} in your feed"},
        {"direct.cited", "authored {count} {papers} you cited"},
        {"direct.library_feed_merged", "authored {count} {papers} in your library and feeds"},
        {"indirect.line1.coauthored", "{author}* has co-authored {count} {papers} with {indirect}."},
        {"indirect.line1.cited", "{author}* has authored {count} {papers} that {indirect} cited."},
        {"indirect.line2.coauthored", "You co-authored {count} {papers} with {indirect}."},
        {"indirect.line2.cited", "You cited {count} of {indirect}'s papers."},
        {"indirect.line2.saved", "You saved {count} of {indirect}'s papers in the library."},
        {"indirect.line2.morelikethis",
         "You marked {count} of {indirect}'s papers as 'more like this'."},
    };
}

MessageTemplateSet load_templates(std::istream& in) {
    MessageTemplateSet t = default_templates();
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.is_object())
        throw std::runtime_error("template file must contain one JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw std::runtime_error("template '" + it.key() + "' must be a string");
        t[it.key()] = it.value().get<std::string>();
    }
    return t;
}

namespace {

const std::string& get_template(const MessageTemplateSet& templates, const std::string& key) {
    auto it = templates.find(key);
    if (it == templates.end())
        throw std::runtime_error("missing template '" + key + "'");
    return it->second;
}

std::string format(const std::string& tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] != '{') {
            out += tmpl[i];
            continue;
        }
        auto close = tmpl.find('}', i);
        if (close == std::string::npos)
            throw std::runtime_error("unterminated placeholder in template: " + tmpl);
        const std::string key = tmpl.substr(i + 1, close - i - 1);
        auto it = values.find(key);
        if (it == values.end())
            throw std::runtime_error("unknown template placeholder '{" + key + "}'");
        out += it->second;
        i = close;
    }
    return out;
}

std::string counted(const MessageTemplateSet& templates, const std::string& key, int count,
                    std::map<std::string, std::string> values = {}) {
    values["count"] = std::to_string(count);
    values["papers"] = count == 1 ? "paper" : "papers";
    return format(get_template(templates, key), values);
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += ", "; // comma separator between message parts
        out += parts[i];
    }
    return out;
}

// Fragment list shared by the citation and direct-author renderers: one
// fragment per source, except that when every applicable source is present
// the library and feed counts merge into the shorter variant.
std::vector<std::string> source_fragments(const std::map<SourceKind, int>& counts,
                                          const MessageTemplateSet& templates,
                                          const std::string& kind_prefix,
                                          bool cited_allowed) {
    const bool all_present =
        counts.count(SourceKind::Authored) && counts.count(SourceKind::Library) &&
        counts.count(SourceKind::Feed) &&
        (!cited_allowed || counts.count(SourceKind::Cited));
    std::vector<std::string> parts;
    if (auto it = counts.find(SourceKind::Authored); it != counts.end())
        parts.push_back(counted(templates, kind_prefix + ".authored", it->second));
    if (all_present) {
        const int merged = counts.at(SourceKind::Library) + counts.at(SourceKind::Feed);
        parts.push_back(counted(templates, kind_prefix + ".library_feed_merged", merged));
    } else {
        if (auto it = counts.find(SourceKind::Library); it != counts.end())
            parts.push_back(counted(templates, kind_prefix + ".library", it->second));
        if (auto it = counts.find(SourceKind::Feed); it != counts.end())
            parts.push_back(counted(templates, kind_prefix + ".feed", it->second));
    }
    if (cited_allowed)
        if (auto it = counts.find(SourceKind::Cited); it != counts.end())
            parts.push_back(counted(templates, kind_prefix + ".cited", it->second));
    return parts;
}

} // namespace

std::string render_message(const CitationRelation& rel, const MessageTemplateSet& templates) {
    return get_template(templates, "citation.prefix") +
           join(source_fragments(rel.counts, templates, "citation", /*cited_allowed=*/false));
}

std::string render_message(const DirectAuthorRelation& rel, const MessageTemplateSet& templates) {
    return rel.featured_name + " " +
           join(source_fragments(rel.counts, templates, "direct", /*cited_allowed=*/true));
}

std::string render_message(const IndirectRelation& rel, const MessageTemplateSet& templates) {
    const std::string line1_key = rel.line1_relation == EngageAction::CoAuthored
                                      ? "indirect.line1.coauthored"
                                      : "indirect.line1.cited";
    std::string line2_key;
    switch (rel.line2_action) {
    case EngageAction::CoAuthored: line2_key = "indirect.line2.coauthored"; break;
    case EngageAction::Cited: line2_key = "indirect.line2.cited"; break;
    case EngageAction::Saved: line2_key = "indirect.line2.saved"; break;
    case EngageAction::MoreLikeThis: line2_key = "indirect.line2.morelikethis"; break;
    }
    return counted(templates, line1_key, rel.line1_count,
                   {{"author", rel.author_name}, {"indirect", rel.indirect_name}}) +
           "\n" +
           counted(templates, line2_key, rel.line2_count,
                   {{"indirect", rel.indirect_name}});
}

int cap_limit(double cap, int n_total) {
    return static_cast<int>(std::floor(cap * static_cast<double>(n_total) + 1e-9));
}

std::vector<std::string> apply_coverage_cap(std::vector<CapCandidate> candidates,
                                            int n_total, double cap) {
    std::sort(candidates.begin(), candidates.end(),
              [](const CapCandidate& a, const CapCandidate& b) {
                  if (a.strength != b.strength)
                      return a.strength > b.strength;
                  return a.paper_id < b.paper_id;
              });
    const std::size_t k = std::min(candidates.size(),
                                   static_cast<std::size_t>(std::max(0, cap_limit(cap, n_total))));
    std::vector<std::string> selected;
    selected.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        selected.push_back(candidates[i].paper_id);
    return selected;
}

int AlertEmail::message_count() const {
    int n = 0;
    for (const auto& r : recommendations)
        n += r.message.has_value() ? 1 : 0;
    return n;
}

double AlertEmail::pct_featured() const {
    if (recommendations.empty())
        return 0.0;
    return static_cast<double>(message_count()) /
           static_cast<double>(recommendations.size());
}

AlertEmail assemble_email(const UserProfile& user, const std::string& feed_id,
                          const std::vector<std::string>& paper_ids,
                          Condition condition, double cap, std::uint64_t seed,
                          const CorpusIndex& index, const AssembleOptions& opts) {
    AlertEmail email;
    email.user_id = user.id;
    email.feed_id = feed_id;
    email.condition = condition;
    email.cap = cap;

    std::vector<const Paper*> papers;
    for (const auto& pid : paper_ids) {
        if (const Paper* p = index.find_paper(pid))
            papers.push_back(p);
        else
            ++email.skipped;
    }
    const int n_total = static_cast<int>(papers.size());

    std::map<std::string, std::string> messages;
    std::vector<CapCandidate> candidates;
    auto candidates_map = condition == Condition::IndirectAuthor
                              ? candidate_indirect_authors(user, index)
                              : std::map<std::string, EngagementBreakdown>{};
    for (const Paper* p : papers) {
        switch (condition) {
        case Condition::Control:
            break;
        case Condition::Citation:
            if (auto rel = extract_citation_relation(user, *p, index, opts.sources)) {
                candidates.push_back({p->id, static_cast<double>(relation_strength(rel->counts))});
                messages[p->id] = render_message(*rel, opts.templates);
            }
            break;
        case Condition::DirectAuthor:
            if (auto rel = extract_direct_author_relation(user, *p, index, seed, opts.sources)) {
                candidates.push_back({p->id, static_cast<double>(relation_strength(rel->counts))});
                messages[p->id] = render_message(*rel, opts.templates);
            }
            break;
        case Condition::IndirectAuthor:
            if (auto rel = rank_triplets(user, *p, index, opts.scoring, candidates_map)) {
                candidates.push_back({p->id, rel->triplet.score});
                messages[p->id] = render_message(*rel, opts.templates);
            }
            break;
        }
    }

    std::set<std::string> selected;
    for (auto& id : apply_coverage_cap(std::move(candidates), n_total, cap))
        selected.insert(std::move(id));

    for (const Paper* p : papers) {
        Recommendation rec;
        rec.paper_id = p->id;
        rec.title = p->title;
        if (selected.count(p->id))
            rec.message = messages.at(p->id);
        email.recommendations.push_back(std::move(rec));
    }
    return email;
}

namespace {

std::string html_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

} // namespace

std::string render_digest(const AlertEmail& email, DigestFormat format) {
    std::ostringstream out;
    const std::string header = "Feed alert: " + email.feed_id + " (user " + email.user_id +
                               ", " + to_string(email.condition) + ")";
    if (format == DigestFormat::Text) {
        out << header << "\n";
        for (const auto& rec : email.recommendations) {
            out << rec.title << "\n";
            if (rec.message) {
                std::istringstream lines(*rec.message);
                std::string line;
                while (std::getline(lines, line))
                    out << "  ↳ " << line << "\n";
            }
        }
        return out.str();
    }
    out << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>"
        << html_escape(header) << "</title></head>\n<body>\n<h1>" << html_escape(header)
        << "</h1>\n<ul>\n";
    for (const auto& rec : email.recommendations) {
        out << "<li>" << html_escape(rec.title);
        if (rec.message)
            out << "<br><span class=\"relevance-message\">"
                << replace_all(html_escape(*rec.message), "\n", "<br>") << "</span>";
        out << "</li>\n";
    }
    out << "</ul>\n</body>\n</html>\n";
    return out.str();
}

} // namespace scholrel
