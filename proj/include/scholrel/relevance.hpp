#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "scholrel/corpus.hpp"

namespace scholrel {

enum class SourceKind { Authored, Library, Feed, Cited };

const char* to_string(SourceKind kind);

struct SourceOptions {
    // Feed papers with a negative rating still count as feed members unless
    // this flag is set.
    bool exclude_negative_from_sources = false;
};

/// Citation-based relation: the alert paper cites papers from the user
/// relevant sources {Authored, Library, Feed}.
struct CitationRelation {
    std::string paper_id;
    std::map<SourceKind, int> counts; // only positive entries, Cited never present
    std::map<std::string, int> feed_breakdown; // feed id -> cited count
};

/// Direct author-based relation: the alert paper is authored by an author
/// with papers in the user relevant sources (all four kinds).
struct DirectAuthorRelation {
    std::string paper_id;
    std::string featured_author;
    std::string featured_name;
    std::map<SourceKind, int> counts; // only positive entries
};

/// Absent when the alert paper cites no paper from any source.
std::optional<CitationRelation> extract_citation_relation(
    const UserProfile& user, const Paper& paper, const CorpusIndex& index,
    const SourceOptions& opts = {});

/// Absent when no author of the alert paper has any paper in the user
/// relevant sources. Among tied top authors the featured one is chosen by a
/// deterministic draw keyed on (rng_seed, paper id). The alert paper itself
/// never counts; the user-as-author is never featured.
std::optional<DirectAuthorRelation> extract_direct_author_relation(
    const UserProfile& user, const Paper& paper, const CorpusIndex& index,
    std::uint64_t rng_seed, const SourceOptions& opts = {});

/// Total evidence in a relation; the strength used under the coverage cap.
int relation_strength(const std::map<SourceKind, int>& counts);

} // namespace scholrel
