#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scholrel/indirect.hpp"
#include "scholrel/relevance.hpp"

namespace scholrel {

enum class Condition { Control, Citation, DirectAuthor, IndirectAuthor };

const char* to_string(Condition c);
std::optional<Condition> condition_from_string(const std::string& name);

/// Key -> template string; placeholders are written {name}.
using MessageTemplateSet = std::map<std::string, std::string>;

MessageTemplateSet default_templates();

/// Overlay a JSON object of key -> string overrides on the defaults.
MessageTemplateSet load_templates(std::istream& in);

std::string render_message(const CitationRelation& rel, const MessageTemplateSet& templates);
std::string render_message(const DirectAuthorRelation& rel, const MessageTemplateSet& templates);
/// Two lines joined by '\n'.
std::string render_message(const IndirectRelation& rel, const MessageTemplateSet& templates);

/// floor(cap * n_total)
int cap_limit(double cap, int n_total);

struct CapCandidate {
    std::string paper_id;
    double strength = 0.0;
};

/// Top min(|candidates|, floor(cap*n_total)) by strength, ties by paper id.
std::vector<std::string> apply_coverage_cap(std::vector<CapCandidate> candidates,
                                            int n_total, double cap);

struct Recommendation {
    std::string paper_id;
    std::string title;
    std::optional<std::string> message;
};

struct AlertEmail {
    std::string user_id;
    std::string feed_id;
    Condition condition = Condition::Control;
    double cap = 0.5;
    std::vector<Recommendation> recommendations;
    int skipped = 0; // unresolvable paper ids dropped during assembly

    int message_count() const;
    double pct_featured() const; // messages / papers, 0 for an empty email
};

struct AssembleOptions {
    ScoringParams scoring;
    SourceOptions sources;
    MessageTemplateSet templates = default_templates();
};

AlertEmail assemble_email(const UserProfile& user, const std::string& feed_id,
                          const std::vector<std::string>& paper_ids,
                          Condition condition, double cap, std::uint64_t seed,
                          const CorpusIndex& index, const AssembleOptions& opts = {});

enum class DigestFormat { Text, Html };

/// Pure: byte-identical output for identical emails.
std::string render_digest(const AlertEmail& email, DigestFormat format);

} // namespace scholrel
