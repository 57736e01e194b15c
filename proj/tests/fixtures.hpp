#pragma once

// Shared helpers for building small corpora in tests: literal builders and a
// seeded random-corpus generator used by the oracle-comparison suites.

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scholrel/corpus.hpp"

namespace scholrel::testing {

inline Paper make_paper(std::string id, std::vector<std::string> authors,
                        std::set<std::string> refs = {}, int year = 2020) {
    Paper p;
    p.id = std::move(id);
    p.title = "Title of " + p.id;
    p.authors = std::move(authors);
    p.year = year;
    p.references = std::move(refs);
    return p;
}

inline CorpusIndex make_index(const std::vector<Paper>& papers,
                              const std::vector<Author>& authors = {}) {
    CorpusIndex index;
    for (const auto& p : papers)
        index.papers.emplace(p.id, p);
    for (const auto& a : authors)
        index.authors.emplace(a.id, a);
    for (const auto& [pid, paper] : index.papers) {
        for (const auto& aid : paper.authors)
            index.by_author[aid].insert(pid);
        for (const auto& ref : paper.references)
            if (index.papers.count(ref))
                ++index.incoming_citations[ref];
    }
    return index;
}

struct RandomFixture {
    CorpusIndex index;
    std::vector<UserProfile> users;
};

/// Small random corpus: up to `max_authors` authors, `max_papers` papers,
/// `max_users` users with random authored/library/feed sources.
inline RandomFixture random_fixture(std::mt19937& gen, int max_authors = 8,
                                    int max_papers = 15, int max_users = 4) {
    std::uniform_int_distribution<int> n_auth(2, max_authors);
    std::uniform_int_distribution<int> n_pap(3, max_papers);
    std::uniform_int_distribution<int> n_usr(1, max_users);
    const int na = n_auth(gen);
    const int np = n_pap(gen);
    const int nu = n_usr(gen);

    std::vector<Author> authors;
    for (int a = 0; a < na; ++a) {
        Author rec;
        rec.id = "a" + std::to_string(a);
        rec.display_name = "Author " + std::to_string(a);
        if (gen() % 3 != 0)
            rec.h_index = static_cast<int>(gen() % 40);
        authors.push_back(std::move(rec));
    }

    std::vector<Paper> papers;
    for (int p = 0; p < np; ++p) {
        const int byline = 1 + static_cast<int>(gen() % std::min(3, na));
        std::set<std::string> byline_set;
        while (static_cast<int>(byline_set.size()) < byline)
            byline_set.insert("a" + std::to_string(gen() % na));
        std::set<std::string> refs;
        for (int q = 0; q < p; ++q)
            if (gen() % 3 == 0)
                refs.insert("p" + std::to_string(q));
        if (gen() % 8 == 0)
            refs.insert("dangling" + std::to_string(gen() % 4));
        papers.push_back(make_paper(
            "p" + std::to_string(p),
            std::vector<std::string>(byline_set.begin(), byline_set.end()),
            std::move(refs)));
    }

    RandomFixture fx;
    fx.index = make_index(papers, authors);
    for (int u = 0; u < nu; ++u) {
        UserProfile user;
        user.id = "u" + std::to_string(u);
        for (int p = 0; p < np; ++p) {
            const std::string pid = "p" + std::to_string(p);
            if (gen() % 5 == 0)
                user.authored.insert(pid);
            if (gen() % 4 == 0)
                user.library.insert(pid);
        }
        if (gen() % 2 == 0) {
            Feed feed;
            feed.feed_id = "f0";
            feed.name = "Feed";
            for (int p = 0; p < np; ++p)
                if (gen() % 4 == 0)
                    feed.ratings["p" + std::to_string(p)] =
                        gen() % 4 == 0 ? Rating::Negative : Rating::Positive;
            user.feeds.push_back(std::move(feed));
        }
        fx.users.push_back(std::move(user));
    }
    return fx;
}

} // namespace scholrel::testing
