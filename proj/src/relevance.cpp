#include "scholrel/relevance.hpp"

#include <algorithm>
#include <vector>

#include "scholrel/rng.hpp"

namespace scholrel {

const char* to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::Authored: return "authored";
    case SourceKind::Library: return "library";
    case SourceKind::Feed: return "feed";
    case SourceKind::Cited: return "cited";
    }
    return "?";
}

namespace {

int intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
    // iterate the smaller set
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    int n = 0;
    for (const auto& x : small)
        n += large.count(x) ? 1 : 0;
    return n;
}

} // namespace

int relation_strength(const std::map<SourceKind, int>& counts) {
    int total = 0;
    for (const auto& [kind, n] : counts)
        total += n;
    return total;
}

std::optional<CitationRelation> extract_citation_relation(
    const UserProfile& user, const Paper& paper, const CorpusIndex& index,
    const SourceOptions& opts) {
    (void)index; // Design 1 needs only the alert paper's outgoing references
    CitationRelation rel;
    rel.paper_id = paper.id;
    if (int n = intersection_size(paper.references, user.authored))
        rel.counts[SourceKind::Authored] = n;
    if (int n = intersection_size(paper.references, user.library))
        rel.counts[SourceKind::Library] = n;
    const auto feed_set = feed_papers(user, opts.exclude_negative_from_sources);
    if (int n = intersection_size(paper.references, feed_set))
        rel.counts[SourceKind::Feed] = n;
    for (const auto& feed : user.feeds) {
        int n = 0;
        for (const auto& [pid, rating] : feed.ratings)
            if ((!opts.exclude_negative_from_sources || rating == Rating::Positive) &&
                paper.references.count(pid))
                ++n;
        if (n > 0)
            rel.feed_breakdown[feed.feed_id] = n;
    }
    if (rel.counts.empty())
        return std::nullopt;
    return rel;
}

std::optional<DirectAuthorRelation> extract_direct_author_relation(
    const UserProfile& user, const Paper& paper, const CorpusIndex& index,
    std::uint64_t rng_seed, const SourceOptions& opts) {
    const auto cited = user_cited_set(user, index);
    const auto feed_set = feed_papers(user, opts.exclude_negative_from_sources);

    struct Candidate {
        std::string author;
        std::map<SourceKind, int> counts;
        int total = 0;
    };
    std::vector<Candidate> candidates;
    std::set<std::string> seen;
    for (const auto& aid : paper.authors) {
        if (aid == user.id || !seen.insert(aid).second)
            continue;
        Candidate c;
        c.author = aid;
        std::set<std::string> pool = index.papers_of(aid);
        pool.erase(paper.id); // the alert paper never counts toward itself
        if (int n = intersection_size(pool, user.authored))
            c.counts[SourceKind::Authored] = n;
        if (int n = intersection_size(pool, user.library))
            c.counts[SourceKind::Library] = n;
        if (int n = intersection_size(pool, feed_set))
            c.counts[SourceKind::Feed] = n;
        if (int n = intersection_size(pool, cited))
            c.counts[SourceKind::Cited] = n;
        c.total = relation_strength(c.counts);
        if (c.total > 0)
            candidates.push_back(std::move(c));
    }
    if (candidates.empty())
        return std::nullopt;

    int best = 0;
    for (const auto& c : candidates)
        best = std::max(best, c.total);
    std::vector<const Candidate*> tied;
    for (const auto& c : candidates)
        if (c.total == best)
            tied.push_back(&c);
    std::sort(tied.begin(), tied.end(),
              [](const Candidate* a, const Candidate* b) { return a->author < b->author; });
    const Candidate* chosen = tied.front();
    if (tied.size() > 1) {
        CounterRng rng(rng_seed, paper.id);
        chosen = tied[rng.next_below(tied.size())];
    }

    DirectAuthorRelation rel;
    rel.paper_id = paper.id;
    rel.featured_author = chosen->author;
    rel.featured_name = index.author_name(chosen->author);
    rel.counts = chosen->counts;
    return rel;
}

} // namespace scholrel
