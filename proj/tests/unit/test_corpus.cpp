#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "faqrank/corpus.hpp"
#include "faqrank/error.hpp"

using namespace faqrank;

namespace {

const char* kThreeEntries =
    R"({"id":"faq-1","question":"How do I renew my driver's license?","answer":"Visit the licensing center.","source":"town-a"})"
    "\n"
    R"({"id":"faq-2","question":"When is garbage collected?","answer":"Every Tuesday morning.","source":"town-a"})"
    "\n"
    R"({"id":"faq-3","question":"Where can I get a parking permit?","answer":"At city hall, window 3.","source":"town-a"})"
    "\n";

FaqCorpus parse(const std::string& text) {
    std::istringstream in(text);
    return parse_faq_corpus(in);
}

}  // namespace

TEST_CASE("three well-formed lines load as a corpus of three", "[corpus]") {
    auto corpus = parse(kThreeEntries);
    REQUIRE(corpus.size() == 3);
    CHECK(corpus.entries()[0].id == "faq-1");
    CHECK(corpus.entries()[2].id == "faq-3");
    CHECK(corpus.source() == "town-a");
    CHECK(corpus.at("faq-2").answer == "Every Tuesday morning.");
    CHECK(corpus.find("faq-9") == nullptr);
    CHECK_THROWS_AS(corpus.at("faq-9"), ValidationError);
}

TEST_CASE("corpus loader errors name the offending line", "[corpus]") {
    SECTION("missing answer field") {
        std::string text = std::string(kThreeEntries) + R"({"id":"faq-4","question":"q","source":"s"})" + "\n";
        try {
            parse(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
            CHECK(std::string(e.what()).find("answer") != std::string::npos);
        }
    }
    SECTION("invalid JSON") {
        CHECK_THROWS_AS(parse("{not json}\n"), ParseError);
    }
    SECTION("non-string field") {
        CHECK_THROWS_AS(parse(R"({"id":1,"question":"q","answer":"a","source":"s"})"), ParseError);
    }
    SECTION("duplicate id") {
        std::string text = std::string(kThreeEntries) +
                           R"({"id":"faq-2","question":"q","answer":"a","source":"s"})" + "\n";
        CHECK_THROWS_WITH(parse(text), Catch::Matchers::ContainsSubstring("line 4") &&
                                           Catch::Matchers::ContainsSubstring("duplicate"));
    }
    SECTION("empty file") {
        CHECK_THROWS_AS(parse(""), ValidationError);
        CHECK_THROWS_AS(parse("\n  \n"), ValidationError);
    }
    SECTION("blank question after trimming") {
        CHECK_THROWS_AS(parse(R"({"id":"x","question":"   ","answer":"a","source":"s"})"), ValidationError);
    }
}

TEST_CASE("load_faq_corpus reports missing files as IO errors", "[corpus]") {
    CHECK_THROWS_AS(load_faq_corpus("/nonexistent/faq.jsonl"), IoError);
}

TEST_CASE("randomly corrupted corpora are rejected", "[corpus][property]") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<FaqEntry> entries;
        for (int i = 0; i < 6; ++i)
            entries.push_back({"id-" + std::to_string(i), "question " + std::to_string(i), "answer", "s"});
        auto victim = std::uniform_int_distribution<int>(0, 5)(rng);
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
            case 0: entries[victim].id = entries[(victim + 1) % 6].id; break;
            case 1: entries[victim].question = " \t"; break;
            case 2: entries[victim].answer = ""; break;
            case 3: entries[victim].id = ""; break;
        }
        CHECK_THROWS_AS(FaqCorpus(entries), ValidationError);
    }
}

TEST_CASE("query sets validate grades and qids", "[corpus]") {
    std::istringstream ok(R"({"qid":"q1","text":"renew license","judgments":{"faq-1":"A","faq-3":"D"}})"
                          "\n"
                          R"({"qid":"q2","text":"garbage day","judgments":{}})"
                          "\n");
    auto queries = parse_query_set(ok);
    REQUIRE(queries.size() == 2);
    CHECK(queries[0].judgments.at("faq-1") == Grade::A);
    CHECK(queries[0].judgments.at("faq-3") == Grade::D);

    std::istringstream bad_grade(R"({"qid":"q1","text":"t","judgments":{"faq-1":"E"}})");
    CHECK_THROWS_AS(parse_query_set(bad_grade), ValidationError);

    std::istringstream dup(R"({"qid":"q1","text":"t","judgments":{}})"
                           "\n"
                           R"({"qid":"q1","text":"u","judgments":{}})");
    CHECK_THROWS_AS(parse_query_set(dup), ValidationError);

    auto corpus = parse(kThreeEntries);
    CHECK_NOTHROW(validate_judgments(queries, corpus));
    queries[1].judgments["faq-99"] = Grade::B;
    CHECK_THROWS_AS(validate_judgments(queries, corpus), ValidationError);
}

TEST_CASE("run files", "[corpus][run]") {
    SECTION("two entries round-trip exactly") {
        std::vector<RunEntry> run{{"q1", "faq-2", 1, 0.75, "fused"}, {"q1", "faq-1", 2, 0.1, "fused"}};
        std::stringstream buf;
        write_run(run, buf);
        CHECK(buf.str() == "q1 Q0 faq-2 1 0.75 fused\nq1 Q0 faq-1 2 0.1 fused\n");
        CHECK(read_run(buf) == run);
    }
    SECTION("rank gap is rejected") {
        std::vector<RunEntry> run{{"q1", "a", 1, 1.0, "t"}, {"q1", "b", 3, 0.5, "t"}};
        std::stringstream buf;
        CHECK_THROWS_AS(write_run(run, buf), ValidationError);
        std::istringstream in("q1 Q0 a 1 1.0 t\nq1 Q0 b 3 0.5 t\n");
        CHECK_THROWS_AS(read_run(in), ValidationError);
    }
    SECTION("score inversion is rejected") {
        std::istringstream in("q1 Q0 a 1 0.2 t\nq1 Q0 b 2 0.5 t\n");
        CHECK_THROWS_AS(read_run(in), ValidationError);
    }
    SECTION("empty run") {
        std::stringstream buf;
        write_run({}, buf);
        CHECK(buf.str().empty());
        CHECK(read_run(buf).empty());
    }
    SECTION("malformed lines") {
        std::istringstream five("q1 Q0 a 1 0.2\n");
        CHECK_THROWS_AS(read_run(five), ParseError);
        std::istringstream no_q0("q1 X a 1 0.2 t\n");
        CHECK_THROWS_AS(read_run(no_q0), ParseError);
    }
}

TEST_CASE("run files round-trip bit-exactly for random valid runs", "[corpus][run][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mag(-1e6, 1e6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<RunEntry> run;
        int queries = std::uniform_int_distribution<int>(0, 4)(rng);
        for (int q = 0; q < queries; ++q) {
            int n = std::uniform_int_distribution<int>(1, 8)(rng);
            std::vector<double> scores(n);
            for (auto& s : scores) s = mag(rng) * std::ldexp(1.0, std::uniform_int_distribution<int>(-40, 0)(rng));
            std::sort(scores.rbegin(), scores.rend());
            for (int i = 0; i < n; ++i)
                run.push_back({"q" + std::to_string(q), "d" + std::to_string(i), static_cast<std::size_t>(i + 1),
                               scores[i], "tag"});
        }
        std::stringstream buf;
        write_run(run, buf);
        const std::string first = buf.str();
        auto back = read_run(buf);
        REQUIRE(back == run);
        std::stringstream again;
        write_run(back, again);
        REQUIRE(again.str() == first);
    }
}
