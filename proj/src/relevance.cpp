#include "faqrank/relevance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "faqrank/error.hpp"
#include "random.hpp"

namespace faqrank {

namespace {

/// Floyd's algorithm: `count` distinct values from [0, n), in draw order.
std::vector<std::uint64_t> sample_distinct(std::mt19937_64& rng, std::uint64_t n, std::uint64_t count) {
    std::vector<std::uint64_t> out;
    std::unordered_set<std::uint64_t> taken;
    out.reserve(count);
    for (std::uint64_t j = n - count; j < n; ++j) {
        std::uint64_t t = detail::draw_below(rng, j + 1);
        std::uint64_t pick = taken.count(t) ? j : t;
        taken.insert(pick);
        out.push_back(pick);
    }
    return out;
}

}  // namespace

std::vector<RelevanceExample> generate_training_pairs(std::span<const FaqCorpus> corpora, std::size_t neg_ratio,
                                                      std::uint64_t seed, NegativePool pool) {
    if (neg_ratio == 0) throw ValidationError("neg_ratio must be a positive integer");

    std::vector<const FaqEntry*> all;
    for (const auto& corpus : corpora)
        for (const auto& e : corpus.entries()) all.push_back(&e);
    if (all.size() < 2)
        throw ValidationError("negative sampling needs at least 2 pooled QA entries, got " +
                              std::to_string(all.size()));

    // Candidate groups: one pooled group, or one group per source tag.
    std::map<std::string, std::vector<std::size_t>> groups;
    std::vector<const std::vector<std::size_t>*> group_of(all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        groups[pool == NegativePool::Pooled ? std::string() : all[i]->source].push_back(i);
    for (const auto& [name, members] : groups) {
        if (neg_ratio > members.size() - 1) {
            std::string scope = pool == NegativePool::Pooled ? "pooled corpus" : "source \"" + name + "\"";
            throw ValidationError("neg_ratio " + std::to_string(neg_ratio) + " exceeds the " + scope +
                                  " bound of " + std::to_string(members.size() - 1) +
                                  " (entries - 1) negatives per positive");
        }
        for (auto i : members) group_of[i] = &members;
    }

    std::mt19937_64 rng(seed);
    std::vector<RelevanceExample> out;
    out.reserve(all.size() * (neg_ratio + 1));
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& pos = *all[i];
        out.push_back({pos.question, pos.answer, 1, pos.id, pos.id});
        const auto& members = *group_of[i];
        auto self = static_cast<std::size_t>(
            std::lower_bound(members.begin(), members.end(), i) - members.begin());
        for (auto c : sample_distinct(rng, members.size() - 1, neg_ratio)) {
            // Skip over the positive's own slot in the candidate group.
            const auto& neg = *all[members[c < self ? c : c + 1]];
            out.push_back({pos.question, neg.answer, 0, pos.id, neg.id});
        }
    }
    return out;
}

std::vector<RelevanceExample> split_paraphrase_triples(std::span<const ParaphraseTriple> triples) {
    std::vector<RelevanceExample> out;
    std::set<std::pair<std::string, std::string>> seen;
    auto add = [&](const std::string& left, const std::string& right) {
        if (seen.emplace(left, right).second) out.push_back({left, right, 1, {}, {}});
    };
    for (const auto& t : triples) {
        add(t.query, t.answer);
        add(t.question, t.answer);
    }
    return out;
}

void write_training_jsonl(std::span<const RelevanceExample> examples, std::ostream& out) {
    for (const auto& ex : examples) {
        nlohmann::ordered_json j;
        j["left"] = ex.left;
        j["right"] = ex.right;
        j["label"] = ex.label;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing training data");
}

void write_training_jsonl(std::span<const RelevanceExample> examples, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_training_jsonl(examples, out);
}

std::vector<RelevanceExample> read_training_jsonl(std::istream& in) {
    std::vector<RelevanceExample> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(text);
            RelevanceExample ex{j.at("left").get<std::string>(), j.at("right").get<std::string>(),
                                j.at("label").get<int>(), {}, {}};
            if (ex.label != 0 && ex.label != 1) throw ParseError("label must be 0 or 1", line);
            if (ex.left.empty() || ex.right.empty()) throw ParseError("texts must be non-empty", line);
            out.push_back(std::move(ex));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), line);
        }
    }
    return out;
}

OverlapScorer::OverlapScorer(std::shared_ptr<const Analyzer> analyzer) : analyzer_(std::move(analyzer)) {
    if (!analyzer_) throw ValidationError("overlap scorer requires an analyzer");
}

double OverlapScorer::score(const std::string& query, const std::string& answer) const {
    auto q = analyzer_->analyze(query).content_words;
    auto a = analyzer_->analyze(answer).content_words;
    std::unordered_set<std::string> query_words(q.begin(), q.end());
    if (query_words.empty()) return 0.0;
    std::unordered_set<std::string> answer_words(a.begin(), a.end());
    std::size_t shared = 0;
    for (const auto& w : query_words) shared += answer_words.count(w);
    return std::clamp(static_cast<double>(shared) / static_cast<double>(query_words.size()), 0.0, 1.0);
}

std::vector<double> OverlapScorer::score_batch(std::span<const TextPair> pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(score(p.query, p.answer));
    return out;
}

std::vector<ScoredId> search_relevance(const RelevanceScorer& scorer, const std::string& query,
                                       const FaqCorpus& corpus, std::size_t k) {
    if (k == 0) throw ValidationError("k must be at least 1");
    std::vector<TextPair> pairs;
    pairs.reserve(corpus.size());
    for (const auto& e : corpus.entries()) pairs.push_back({query, e.answer});
    auto scores = scorer.score_batch(pairs);
    if (scores.size() != pairs.size())
        throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(pairs.size()) + " pairs");
    std::vector<ScoredId> out;
    out.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0))
            throw ProtocolError("scorer returned out-of-range score for \"" + corpus.entries()[i].id + "\"");
        out.push_back({corpus.entries()[i].id, scores[i]});
    }
    if (out.size() > k) {
        std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(),
                          [](const ScoredId& a, const ScoredId& b) {
                              if (a.score != b.score) return a.score > b.score;
                              return a.id < b.id;
                          });
        out.resize(k);
    } else {
        sort_ranked(out);
    }
    return out;
}

}  // namespace faqrank
