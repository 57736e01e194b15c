#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scholrel/errors.hpp"

namespace scholrel {

enum class Rating { Positive, Negative };

struct Paper {
    std::string id;
    std::string title;
    std::vector<std::string> authors; // ordered byline, non-empty
    int year = 0;
    std::set<std::string> references; // may contain ids absent from the corpus
};

struct Author {
    std::string id;
    std::string display_name;
    std::optional<int> h_index; // trusted when supplied, recomputed otherwise
};

struct Feed {
    std::string feed_id;
    std::string name;
    std::map<std::string, Rating> ratings; // paper id -> rating
};

struct UserProfile {
    std::string id;
    std::set<std::string> authored;
    std::set<std::string> library;
    std::vector<Feed> feeds;
    bool claimed_profile = false;
    std::optional<int> h_index;
};

/// Immutable after ingestion; safe for concurrent reads.
struct CorpusIndex {
    std::map<std::string, Paper> papers;
    std::map<std::string, Author> authors;
    std::map<std::string, std::set<std::string>> by_author; // author -> paper ids
    std::map<std::string, int> incoming_citations; // only for papers in the corpus

    const Paper* find_paper(const std::string& id) const;

    /// Papers authored by `author_id` (empty set if unknown).
    const std::set<std::string>& papers_of(const std::string& author_id) const;

    /// Display name if an author record exists, else the raw id.
    std::string author_name(const std::string& id) const;

    /// Supplied h-index when the author record carries one, otherwise
    /// recomputed from the corpus incoming-citation counts.
    int author_h(const std::string& id) const;
};

/// Parse papers.jsonl / authors.jsonl. Throws IngestError on a malformed
/// record or a duplicate id, naming the offending line.
CorpusIndex ingest_corpus(std::istream& papers_stream, std::istream& authors_stream);

/// Parse users.jsonl.
std::vector<UserProfile> ingest_users(std::istream& users_stream);

/// Largest h such that at least h of the counts are >= h.
int compute_h_index(std::vector<int> citation_counts);

/// Union of references over the user's resolvable authored papers, minus the
/// user's own authored papers. Unresolvable ids are skipped.
std::set<std::string> user_cited_set(const UserProfile& user, const CorpusIndex& index);

/// Papers appearing in any of the user's feeds. When exclude_negative is set
/// only positively rated papers count.
std::set<std::string> feed_papers(const UserProfile& user, bool exclude_negative = false);

/// Feed papers the user rated `more like this`.
std::set<std::string> positively_rated(const UserProfile& user);

} // namespace scholrel
