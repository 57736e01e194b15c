#include "scholrel/corpus.hpp"

#include <algorithm>

#include <json.hpp>

namespace scholrel {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, std::size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw IngestError("malformed record", lineno);
    return j;
}

std::string require_string(const json& j, const char* key, std::size_t lineno) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw IngestError(std::string("missing or non-string field '") + key + "'", lineno);
    return it->get<std::string>();
}

Paper parse_paper(const json& j, std::size_t lineno) {
    Paper p;
    p.id = require_string(j, "id", lineno);
    p.title = require_string(j, "title", lineno);
    auto a = j.find("authors");
    if (a == j.end() || !a->is_array() || a->empty())
        throw IngestError("field 'authors' must be a non-empty array", lineno);
    for (const auto& v : *a) {
        if (!v.is_string())
            throw IngestError("author ids must be strings", lineno);
        p.authors.push_back(v.get<std::string>());
    }
    auto y = j.find("year");
    if (y == j.end() || !y->is_number_integer())
        throw IngestError("missing or non-integer field 'year'", lineno);
    p.year = y->get<int>();
    if (auto r = j.find("references"); r != j.end()) {
        if (!r->is_array())
            throw IngestError("field 'references' must be an array", lineno);
        for (const auto& v : *r) {
            if (!v.is_string())
                throw IngestError("reference ids must be strings", lineno);
            std::string ref = v.get<std::string>();
            if (ref == p.id)
                throw IngestError("paper '" + p.id + "' references itself", lineno);
            p.references.insert(std::move(ref));
        }
    }
    return p;
}

Author parse_author(const json& j, std::size_t lineno) {
    Author a;
    a.id = require_string(j, "id", lineno);
    a.display_name = require_string(j, "display_name", lineno);
    if (auto h = j.find("h_index"); h != j.end() && !h->is_null()) {
        if (!h->is_number_integer() || h->get<int>() < 0)
            throw IngestError("field 'h_index' must be a non-negative integer", lineno);
        a.h_index = h->get<int>();
    }
    return a;
}

std::set<std::string> string_set(const json& j, const char* key, std::size_t lineno) {
    std::set<std::string> out;
    auto it = j.find(key);
    if (it == j.end())
        return out;
    if (!it->is_array())
        throw IngestError(std::string("field '") + key + "' must be an array", lineno);
    for (const auto& v : *it) {
        if (!v.is_string())
            throw IngestError(std::string("elements of '") + key + "' must be strings", lineno);
        out.insert(v.get<std::string>());
    }
    return out;
}

UserProfile parse_user(const json& j, std::size_t lineno) {
    UserProfile u;
    u.id = require_string(j, "id", lineno);
    u.authored = string_set(j, "authored", lineno);
    u.library = string_set(j, "library", lineno);
    if (auto f = j.find("feeds"); f != j.end()) {
        if (!f->is_array())
            throw IngestError("field 'feeds' must be an array", lineno);
        for (const auto& fj : *f) {
            Feed feed;
            feed.feed_id = require_string(fj, "feed_id", lineno);
            feed.name = require_string(fj, "name", lineno);
            if (auto r = fj.find("ratings"); r != fj.end()) {
                if (!r->is_object())
                    throw IngestError("feed 'ratings' must be an object", lineno);
                for (auto it = r->begin(); it != r->end(); ++it) {
                    const std::string val = it.value().is_string() ? it.value().get<std::string>() : "";
                    if (val == "positive")
                        feed.ratings[it.key()] = Rating::Positive;
                    else if (val == "negative")
                        feed.ratings[it.key()] = Rating::Negative;
                    else
                        throw IngestError("feed rating must be \"positive\" or \"negative\"", lineno);
                }
            }
            u.feeds.push_back(std::move(feed));
        }
    }
    if (auto c = j.find("claimed_profile"); c != j.end()) {
        if (!c->is_boolean())
            throw IngestError("field 'claimed_profile' must be boolean", lineno);
        u.claimed_profile = c->get<bool>();
    }
    if (auto h = j.find("h_index"); h != j.end() && !h->is_null()) {
        if (!h->is_number_integer() || h->get<int>() < 0)
            throw IngestError("field 'h_index' must be a non-negative integer", lineno);
        u.h_index = h->get<int>();
    }
    return u;
}

} // namespace

const Paper* CorpusIndex::find_paper(const std::string& id) const {
    auto it = papers.find(id);
    return it == papers.end() ? nullptr : &it->second;
}

const std::set<std::string>& CorpusIndex::papers_of(const std::string& author_id) const {
    static const std::set<std::string> empty;
    auto it = by_author.find(author_id);
    return it == by_author.end() ? empty : it->second;
}

std::string CorpusIndex::author_name(const std::string& id) const {
    auto it = authors.find(id);
    return it == authors.end() ? id : it->second.display_name;
}

int CorpusIndex::author_h(const std::string& id) const {
    if (auto it = authors.find(id); it != authors.end() && it->second.h_index)
        return *it->second.h_index;
    std::vector<int> counts;
    for (const auto& pid : papers_of(id)) {
        auto c = incoming_citations.find(pid);
        counts.push_back(c == incoming_citations.end() ? 0 : c->second);
    }
    return compute_h_index(std::move(counts));
}

CorpusIndex ingest_corpus(std::istream& papers_stream, std::istream& authors_stream) {
    CorpusIndex index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(papers_stream, line)) {
        ++lineno;
        if (line.empty())
            continue;
        Paper p = parse_paper(parse_line(line, lineno), lineno);
        if (index.papers.count(p.id))
            throw IngestError("duplicate paper id '" + p.id + "'", lineno);
        index.papers.emplace(p.id, std::move(p));
    }
    lineno = 0;
    while (std::getline(authors_stream, line)) {
        ++lineno;
        if (line.empty())
            continue;
        Author a = parse_author(parse_line(line, lineno), lineno);
        if (index.authors.count(a.id))
            throw IngestError("duplicate author id '" + a.id + "'", lineno);
        index.authors.emplace(a.id, std::move(a));
    }
    for (const auto& [pid, paper] : index.papers) {
        for (const auto& aid : paper.authors)
            index.by_author[aid].insert(pid);
        for (const auto& ref : paper.references)
            if (index.papers.count(ref))
                ++index.incoming_citations[ref];
    }
    return index;
}

std::vector<UserProfile> ingest_users(std::istream& users_stream) {
    std::vector<UserProfile> users;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(users_stream, line)) {
        ++lineno;
        if (line.empty())
            continue;
        UserProfile u = parse_user(parse_line(line, lineno), lineno);
        if (!seen.insert(u.id).second)
            throw IngestError("duplicate user id '" + u.id + "'", lineno);
        users.push_back(std::move(u));
    }
    return users;
}

int compute_h_index(std::vector<int> citation_counts) {
    std::sort(citation_counts.begin(), citation_counts.end(), std::greater<>());
    int h = 0;
    for (std::size_t i = 0; i < citation_counts.size(); ++i)
        if (citation_counts[i] >= static_cast<int>(i) + 1)
            h = static_cast<int>(i) + 1;
        else
            break;
    return h;
}

std::set<std::string> user_cited_set(const UserProfile& user, const CorpusIndex& index) {
    std::set<std::string> cited;
    for (const auto& pid : user.authored)
        if (const Paper* p = index.find_paper(pid))
            cited.insert(p->references.begin(), p->references.end());
    for (const auto& own : user.authored)
        cited.erase(own);
    return cited;
}

std::set<std::string> feed_papers(const UserProfile& user, bool exclude_negative) {
    std::set<std::string> out;
    for (const auto& feed : user.feeds)
        for (const auto& [pid, rating] : feed.ratings)
            if (!exclude_negative || rating == Rating::Positive)
                out.insert(pid);
    return out;
}

std::set<std::string> positively_rated(const UserProfile& user) {
    return feed_papers(user, /*exclude_negative=*/true);
}

} // namespace scholrel
