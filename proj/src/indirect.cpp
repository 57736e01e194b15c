#include "scholrel/indirect.hpp"

#include <cmath>
#include <stdexcept>

namespace scholrel {

const char* to_string(EngageAction action) {
    switch (action) {
    case EngageAction::CoAuthored: return "co-authored";
    case EngageAction::Cited: return "cited";
    case EngageAction::Saved: return "saved";
    case EngageAction::MoreLikeThis: return "more-like-this";
    }
    return "?";
}

int EngagementBreakdown::count(EngageAction action) const {
    switch (action) {
    case EngageAction::CoAuthored: return co_authored;
    case EngageAction::Cited: return cited;
    case EngageAction::Saved: return saved;
    case EngageAction::MoreLikeThis: return more_like_this;
    }
    return 0;
}

namespace {

double logb(double x, double base) {
    return base > 0.0 ? std::log(x) / std::log(base) : std::log(x);
}

void tally(const std::set<std::string>& papers, const CorpusIndex& index,
           const std::string& user_id, int EngagementBreakdown::*field,
           std::map<std::string, EngagementBreakdown>& out) {
    for (const auto& pid : papers) {
        const Paper* p = index.find_paper(pid);
        if (!p)
            continue;
        for (const auto& aid : p->authors)
            if (aid != user_id)
                ++(out[aid].*field);
    }
}

} // namespace

EngagementBreakdown engagement_of(const UserProfile& user, const std::string& j,
                                  const CorpusIndex& index) {
    EngagementBreakdown bd;
    const auto& papers_j = index.papers_of(j);
    const auto cited = user_cited_set(user, index);
    for (const auto& pid : papers_j) {
        if (user.authored.count(pid))
            ++bd.co_authored;
        if (cited.count(pid))
            ++bd.cited;
        if (user.library.count(pid))
            ++bd.saved;
    }
    for (const auto& pid : positively_rated(user))
        if (papers_j.count(pid))
            ++bd.more_like_this;
    return bd;
}

std::map<std::string, EngagementBreakdown> candidate_indirect_authors(
    const UserProfile& user, const CorpusIndex& index) {
    std::map<std::string, EngagementBreakdown> out;
    tally(user.authored, index, user.id, &EngagementBreakdown::co_authored, out);
    tally(user_cited_set(user, index), index, user.id, &EngagementBreakdown::cited, out);
    tally(user.library, index, user.id, &EngagementBreakdown::saved, out);
    tally(positively_rated(user), index, user.id, &EngagementBreakdown::more_like_this, out);
    return out;
}

Triplet score_triplet(const std::string& i, const std::string& j,
                      const UserProfile& user, const CorpusIndex& index,
                      const ScoringParams& params) {
    if (i == j)
        throw std::invalid_argument("author and indirect author must differ");
    const EngagementBreakdown bd = engagement_of(user, j, index);
    if (bd.total() < 1)
        throw std::invalid_argument("indirect author '" + j + "' has no engagement");

    Triplet t;
    t.author_i = i;
    t.indirect_j = j;
    t.user_u = user.id;
    const auto& papers_i = index.papers_of(i);
    const auto& papers_j = index.papers_of(j);
    for (const auto& pid : papers_i)
        if (papers_j.count(pid))
            ++t.co_authored_ij;
    for (const auto& pid : papers_i) {
        for (const auto& qid : papers_j) {
            const Paper* q = index.find_paper(qid);
            if (q && q->references.count(pid)) {
                ++t.cited_ij;
                break;
            }
        }
    }
    t.engaged_ju = bd.total();
    t.h_index_j = index.author_h(j);
    t.relevance = params.a * logb(t.co_authored_ij + 1.0, params.log_base) +
                  params.b * logb(t.cited_ij + 1.0, params.log_base);
    // log(engaged) without +1: a single engagement yields zero influence
    t.influence = logb(static_cast<double>(t.engaged_ju), params.log_base) *
                  static_cast<double>(t.h_index_j);
    t.score = t.relevance * t.influence;
    return t;
}

std::optional<IndirectRelation> rank_triplets(const UserProfile& user,
                                              const Paper& paper,
                                              const CorpusIndex& index,
                                              const ScoringParams& params) {
    return rank_triplets(user, paper, index, params,
                         candidate_indirect_authors(user, index));
}

std::optional<IndirectRelation> rank_triplets(
    const UserProfile& user, const Paper& paper, const CorpusIndex& index,
    const ScoringParams& params,
    const std::map<std::string, EngagementBreakdown>& candidates) {
    const std::set<std::string> byline(paper.authors.begin(), paper.authors.end());

    std::optional<Triplet> best;
    std::optional<EngagementBreakdown> best_bd;
    std::set<std::string> seen_i;
    for (const auto& i : paper.authors) {
        if (!seen_i.insert(i).second)
            continue;
        for (const auto& [j, bd] : candidates) {
            if (byline.count(j) || j == user.id)
                continue;
            Triplet t = score_triplet(i, j, user, index, params);
            if (t.score <= 0.0)
                continue;
            if (!best || t.score > best->score ||
                (t.score == best->score &&
                 std::make_pair(t.author_i, t.indirect_j) <
                     std::make_pair(best->author_i, best->indirect_j))) {
                best = t;
                best_bd = bd;
            }
        }
    }
    if (!best)
        return std::nullopt;

    IndirectRelation rel;
    rel.paper_id = paper.id;
    rel.triplet = *best;
    const double wa = params.a * (params.log_base > 0.0
                                      ? std::log(best->co_authored_ij + 1.0) / std::log(params.log_base)
                                      : std::log(best->co_authored_ij + 1.0));
    const double wb = params.b * (params.log_base > 0.0
                                      ? std::log(best->cited_ij + 1.0) / std::log(params.log_base)
                                      : std::log(best->cited_ij + 1.0));
    rel.line1_relation = wa > wb ? EngageAction::CoAuthored : EngageAction::Cited;
    rel.line1_count = rel.line1_relation == EngageAction::CoAuthored ? best->co_authored_ij
                                                                     : best->cited_ij;
    // max engagement count, ties by priority CoAuthored > Cited > Saved > MoreLikeThis
    rel.line2_action = EngageAction::CoAuthored;
    rel.line2_count = best_bd->co_authored;
    for (EngageAction a : {EngageAction::Cited, EngageAction::Saved, EngageAction::MoreLikeThis}) {
        if (best_bd->count(a) > rel.line2_count) {
            rel.line2_action = a;
            rel.line2_count = best_bd->count(a);
        }
    }
    rel.author_name = index.author_name(best->author_i);
    rel.indirect_name = index.author_name(best->indirect_j);
    return rel;
}

} // namespace scholrel
