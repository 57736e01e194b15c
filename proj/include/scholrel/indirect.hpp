#pragma once

#include <map>
#include <optional>
#include <string>

#include "scholrel/corpus.hpp"

namespace scholrel {

struct ScoringParams {
    double a = 2.0;        // co-authorship weight
    double b = 1.0;        // citation weight
    double log_base = 0.0; // 0 means natural log
};

enum class EngageAction { CoAuthored, Cited, Saved, MoreLikeThis };

const char* to_string(EngageAction action);

/// Per-action counts of an indirect author's papers the user engaged with.
struct EngagementBreakdown {
    int co_authored = 0;
    int cited = 0;
    int saved = 0;
    int more_like_this = 0;

    int total() const { return co_authored + cited + saved + more_like_this; }
    int count(EngageAction action) const;
};

struct Triplet {
    std::string author_i;
    std::string indirect_j;
    std::string user_u;
    int co_authored_ij = 0;
    int cited_ij = 0; // distinct papers of i cited by any of j's papers
    int engaged_ju = 0;
    int h_index_j = 0;
    double relevance = 0.0; // a*log(co+1) + b*log(cited+1)
    double influence = 0.0; // log(engaged) * h_index_j, log taken literally
    double score = 0.0;     // relevance * influence
};

struct IndirectRelation {
    std::string paper_id;
    Triplet triplet;
    EngageAction line1_relation; // CoAuthored or Cited only
    int line1_count = 0;
    EngageAction line2_action;
    int line2_count = 0;
    std::string author_name;
    std::string indirect_name;
};

/// Per-action engagement of the user with author j's papers.
EngagementBreakdown engagement_of(const UserProfile& user, const std::string& j,
                                  const CorpusIndex& index);

/// All authors j != user with total engagement >= 1.
std::map<std::string, EngagementBreakdown> candidate_indirect_authors(
    const UserProfile& user, const CorpusIndex& index);

/// Throws std::invalid_argument when j has zero engagement or i == j.
Triplet score_triplet(const std::string& i, const std::string& j,
                      const UserProfile& user, const CorpusIndex& index,
                      const ScoringParams& params = {});

/// Max-score triplet over (alert-paper author i, candidate j), candidates
/// excluding the alert paper's own authors and the user. Absent when no pair
/// scores above zero. Equal scores break lexicographically on (i, j).
std::optional<IndirectRelation> rank_triplets(const UserProfile& user,
                                              const Paper& paper,
                                              const CorpusIndex& index,
                                              const ScoringParams& params = {});

/// Same, reusing a precomputed candidate map (one map serves every paper of
/// the same user).
std::optional<IndirectRelation> rank_triplets(
    const UserProfile& user, const Paper& paper, const CorpusIndex& index,
    const ScoringParams& params,
    const std::map<std::string, EngagementBreakdown>& candidates);

} // namespace scholrel
