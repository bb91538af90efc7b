#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "faqrank/error.hpp"
#include "faqrank/relevance.hpp"
#include "generators.hpp"

using namespace faqrank;

namespace {

FaqCorpus small_corpus(std::size_t n, const std::string& source = "s") {
    std::vector<FaqEntry> entries;
    for (std::size_t i = 0; i < n; ++i)
        entries.push_back({source + "-" + std::to_string(i), "question " + std::to_string(i),
                           "answer " + std::to_string(i), source});
    return FaqCorpus(std::move(entries));
}

class ConstantScorer final : public RelevanceScorer {
public:
    explicit ConstantScorer(double v) : v_(v) {}
    std::vector<double> score_batch(std::span<const TextPair> pairs) const override {
        return std::vector<double>(pairs.size(), v_);
    }
    std::string name() const override { return "constant"; }

private:
    double v_;
};

class FailingScorer final : public RelevanceScorer {
public:
    std::vector<double> score_batch(std::span<const TextPair>) const override {
        throw TransportError("down");
    }
    std::string name() const override { return "failing"; }
};

}  // namespace

TEST_CASE("training pair counts and labels", "[relevance]") {
    std::vector<FaqCorpus> corpora{small_corpus(3)};
    auto pairs = generate_training_pairs(corpora, 2, 1);
    REQUIRE(pairs.size() == 9);
    std::size_t pos = 0;
    for (const auto& p : pairs) {
        pos += p.label;
        if (p.label == 1) {
            CHECK(p.left_id == p.right_id);
        } else {
            CHECK(p.left_id != p.right_id);
        }
    }
    CHECK(pos == 3);
    CHECK(kDefaultNegativeRatio == 24);
}

TEST_CASE("training pair generation errors", "[relevance]") {
    std::vector<FaqCorpus> one{small_corpus(1)};
    CHECK_THROWS_AS(generate_training_pairs(one, 1, 0), ValidationError);
    std::vector<FaqCorpus> three{small_corpus(3)};
    CHECK_THROWS_WITH(generate_training_pairs(three, 3, 0), Catch::Matchers::ContainsSubstring("bound of 2"));
    CHECK_THROWS_AS(generate_training_pairs(three, 0, 0), ValidationError);
    CHECK_NOTHROW(generate_training_pairs(three, 2, 0));  // the bound itself is allowed
}

TEST_CASE("negatives are distinct, never the positive, and seed-deterministic", "[relevance][property]") {
    std::vector<FaqCorpus> corpora{small_corpus(30, "a"), small_corpus(20, "b")};
    for (std::uint64_t seed : {0ULL, 7ULL, 12345ULL}) {
        for (std::size_t ratio : {1, 5, 24, 49}) {
            auto pairs = generate_training_pairs(corpora, ratio, seed);
            REQUIRE(pairs.size() == 50 * (ratio + 1));
            for (std::size_t i = 0; i < pairs.size(); i += ratio + 1) {
                REQUIRE(pairs[i].label == 1);
                std::set<std::string> negatives;
                for (std::size_t j = 1; j <= ratio; ++j) {
                    const auto& n = pairs[i + j];
                    REQUIRE(n.label == 0);
                    REQUIRE(n.right_id != pairs[i].left_id);
                    REQUIRE(n.left == pairs[i].left);
                    negatives.insert(n.right_id);
                }
                REQUIRE(negatives.size() == ratio);
            }
            std::ostringstream a, b;
            write_training_jsonl(pairs, a);
            write_training_jsonl(generate_training_pairs(corpora, ratio, seed), b);
            REQUIRE(a.str() == b.str());
        }
    }
    std::ostringstream s1, s2;
    write_training_jsonl(generate_training_pairs(corpora, 5, 1), s1);
    write_training_jsonl(generate_training_pairs(corpora, 5, 2), s2);
    CHECK(s1.str() != s2.str());
}

TEST_CASE("negative sampling is roughly uniform", "[relevance]") {
    std::vector<FaqCorpus> corpora{small_corpus(10)};
    std::map<std::string, int> counts;
    for (std::uint64_t seed = 0; seed < 400; ++seed)
        for (const auto& p : generate_training_pairs(corpora, 3, seed))
            if (p.label == 0 && p.left_id == "s-0") ++counts[p.right_id];
    // 400 draws of 3 from 9 others: expectation 133.3 each.
    REQUIRE(counts.size() == 9);
    for (const auto& [id, c] : counts) {
        CHECK(c > 90);
        CHECK(c < 180);
    }
}

TEST_CASE("same-source negatives stay within their source", "[relevance]") {
    std::vector<FaqCorpus> corpora{small_corpus(5, "a"), small_corpus(8, "b")};
    auto pairs = generate_training_pairs(corpora, 4, 3, NegativePool::SameSource);
    for (const auto& p : pairs) CHECK(p.left_id.substr(0, 1) == p.right_id.substr(0, 1));
    CHECK_THROWS_WITH(generate_training_pairs(corpora, 5, 3, NegativePool::SameSource),
                      Catch::Matchers::ContainsSubstring("source \"a\""));
}

TEST_CASE("paraphrase triples split into deduplicated positives", "[relevance]") {
    std::vector<ParaphraseTriple> one{{"how to renew?", "Renewing a license", "Go to office"}};
    auto p = split_paraphrase_triples(one);
    REQUIRE(p.size() == 2);
    CHECK(p[0].left == "how to renew?");
    CHECK(p[1].left == "Renewing a license");
    CHECK(p[0].label == 1);

    std::vector<ParaphraseTriple> same{{"Q text", "Q text", "A"}};
    CHECK(split_paraphrase_triples(same).size() == 1);

    std::vector<ParaphraseTriple> shared{{"q1", "Q", "A"}, {"q2", "Q", "A"}, {"q1", "Q", "A"}};
    CHECK(split_paraphrase_triples(shared).size() == 3);  // (q1,A) (Q,A) (q2,A)
}

TEST_CASE("training JSONL keeps the left/right/label contract", "[relevance]") {
    std::vector<RelevanceExample> ex{{"q \"quoted\"", "answer\nline", 1, "x", "x"}, {"q", "other", 0, "x", "y"}};
    std::stringstream buf;
    write_training_jsonl(ex, buf);
    CHECK(buf.str().substr(0, buf.str().find('\n')) == R"({"left":"q \"quoted\"","right":"answer\nline","label":1})");
    auto back = read_training_jsonl(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0].left == ex[0].left);
    CHECK(back[0].right == ex[0].right);
    CHECK(back[1].label == 0);
    std::istringstream bad(R"({"left":"a","right":"b","label":2})");
    CHECK_THROWS_AS(read_training_jsonl(bad), ParseError);
}

TEST_CASE("overlap scorer", "[relevance]") {
    OverlapScorer scorer;
    CHECK(scorer.score("renew license", "You can renew your license at the office") == 1.0);
    CHECK(scorer.score("renew license", "Garbage is collected Tuesday") == 0.0);
    CHECK(scorer.score("renew passport", "Renew it online") == 0.5);
    CHECK(scorer.score("where is it", "anything") == 0.0);
    CHECK(scorer.score("license license renew", "license") == 0.5);  // distinct words

    std::vector<TextPair> batch{{"renew license", "renew"}, {"tax", "tax"}, {"", "x"}};
    CHECK(scorer.score_batch(batch) == std::vector<double>{0.5, 1.0, 0.0});
}

TEST_CASE("overlap scorer outputs stay in [0,1] on random text", "[relevance][property]") {
    OverlapScorer scorer;
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> byte(1, 255);
    for (int i = 0; i < 500; ++i) {
        std::string q, a;
        for (int j = std::uniform_int_distribution<int>(0, 30)(rng); j > 0; --j) q += static_cast<char>(byte(rng));
        a = gen::random_text(rng, 0, 10);
        double s = scorer.score(q, a);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);
    }
}

TEST_CASE("search_relevance", "[relevance]") {
    FaqCorpus corpus({{"c", "q", "renew license", "s"}, {"a", "q", "pay tax", "s"}, {"b", "q", "renew passport", "s"}});
    SECTION("constant scorer gives id order") {
        ConstantScorer constant(0.5);
        auto r = search_relevance(constant, "anything", corpus, 3);
        REQUIRE(r.size() == 3);
        CHECK(r[0].id == "a");
        CHECK(r[1].id == "b");
        CHECK(r[2].id == "c");
    }
    SECTION("singleton corpus") {
        FaqCorpus one({{"only", "q", "renew license", "s"}});
        auto r = search_relevance(OverlapScorer(), "renew", one, 5);
        REQUIRE(r.size() == 1);
        CHECK(r[0].score == 1.0);
    }
    SECTION("k = M is a permutation") {
        auto r = search_relevance(OverlapScorer(), "renew license", corpus, 3);
        std::set<std::string> ids;
        for (const auto& s : r) ids.insert(s.id);
        CHECK(ids == std::set<std::string>{"a", "b", "c"});
        CHECK(r[0].id == "c");
        CHECK(r[1].id == "b");
    }
    SECTION("errors") {
        CHECK_THROWS_AS(search_relevance(OverlapScorer(), "x", corpus, 0), ValidationError);
        CHECK_THROWS_AS(search_relevance(FailingScorer(), "x", corpus, 1), TransportError);
        CHECK_THROWS_AS(search_relevance(ConstantScorer(1.5), "x", corpus, 1), ProtocolError);
    }
}

TEST_CASE("search_relevance equals brute force on random corpora", "[relevance][property]") {
    std::mt19937 rng(21);
    OverlapScorer scorer;
    for (int trial = 0; trial < 100; ++trial) {
        auto corpus = gen::random_corpus(rng, std::uniform_int_distribution<std::size_t>(1, 20)(rng));
        auto query = gen::random_text(rng, 1, 6, 12);
        std::size_t k = std::uniform_int_distribution<std::size_t>(1, 25)(rng);
        std::vector<std::pair<double, std::string>> brute;
        for (const auto& e : corpus.entries()) brute.emplace_back(-scorer.score(query, e.answer), e.id);
        std::sort(brute.begin(), brute.end());
        auto got = search_relevance(scorer, query, corpus, k);
        REQUIRE(got.size() == std::min(k, corpus.size()));
        for (std::size_t i = 0; i < got.size(); ++i) {
            REQUIRE(got[i].id == brute[i].second);
            REQUIRE(got[i].score == -brute[i].first);
        }
    }
}
