#include <catch2/catch_amalgamated.hpp>

#include <httplib.h>

#include <thread>

#include "faqrank/error.hpp"
#include "faqrank/remote_scorer.hpp"
#include "faqrank/service.hpp"
#include "fake_scorer_server.hpp"

using namespace faqrank;
using nlohmann::json;

namespace {

FaqCorpus town_corpus() {
    return FaqCorpus({{"lic", "How do I renew my driver license?", "Visit the licensing center.", "t"},
                      {"gar", "When is garbage collected?", "Trash pickup happens every Tuesday.", "t"},
                      {"park", "Where do I get a parking permit?", "Permits are issued at city hall.", "t"},
                      {"pool", "When does the public pool open?", "The pool opens in June.", "t"}});
}

std::shared_ptr<SearchService> engine_with(std::shared_ptr<const RelevanceScorer> scorer) {
    auto corpus = town_corpus();
    auto index = LexicalIndex::build(corpus, make_default_analyzer());
    return std::make_shared<SearchService>(std::move(corpus), std::move(index), std::move(scorer), FusionParams{},
                                           NormalizationParams{});
}

class RunningService {
public:
    RunningService() {
        port_ = service_.bind("127.0.0.1", 0);
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { service_.listen_after_bind(); });
        service_.wait_until_ready();
    }
    ~RunningService() {
        service_.stop();
        thread_.join();
    }
    HttpService& service() { return service_; }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(10, 0);
        return c;
    }

private:
    HttpService service_;
    int port_ = -1;
    std::thread thread_;
};

}  // namespace

TEST_CASE("service construction checks the index against the corpus", "[service]") {
    auto corpus = town_corpus();
    FaqCorpus other({{"x", "q", "a", "s"}});
    auto index = LexicalIndex::build(other, make_default_analyzer());
    CHECK_THROWS_AS(SearchService(corpus, index, std::make_shared<OverlapScorer>(), {}, {}), ValidationError);
    CHECK_THROWS_AS(SearchService(corpus, LexicalIndex::build(corpus, make_default_analyzer()), nullptr, {}, {}),
                    ValidationError);
    CHECK(parse_method("fused") == Method::Fused);
    CHECK_THROWS_AS(parse_method("bm25"), ValidationError);
}

TEST_CASE("runs are valid and tagged by method", "[service]") {
    auto engine = engine_with(std::make_shared<OverlapScorer>());
    std::vector<QueryRecord> queries{{"q1", "renew license", {}}, {"q2", "trash pickup", {}}, {"q3", "zzz", {}}};
    for (auto method : {Method::Lexical, Method::Relevance, Method::Fused}) {
        auto run = engine->run(queries, method, 3);
        CHECK_NOTHROW(validate_run(run));
        for (const auto& e : run) {
            CHECK(e.tag == to_string(method));
            CHECK(e.rank <= 3);
        }
    }
    auto lexical = engine->run(queries, Method::Lexical, 10);
    CHECK(lexical.front().faq_id == "lic");
    auto fused = engine->run(queries, Method::Fused, 10);
    auto first_q2 = std::find_if(fused.begin(), fused.end(), [](const RunEntry& e) { return e.qid == "q2"; });
    REQUIRE(first_q2 != fused.end());
    CHECK(first_q2->faq_id == "gar");
}

TEST_CASE("search response JSON", "[service]") {
    auto engine = engine_with(std::make_shared<OverlapScorer>());
    auto j = search_response_json("renew license", engine->search("renew license", 2), engine->corpus());
    REQUIRE(j["results"].size() == 2);
    CHECK(j["results"][0]["rank"] == 1);
    CHECK(j["results"][0]["faq_id"] == "lic");
    CHECK(j["results"][0]["question"] == "How do I renew my driver license?");
    CHECK(j["degraded"] == false);
    CHECK_FALSE(j.contains("degraded_reason"));
    CHECK_THROWS_AS(engine->search("x", 0), ValidationError);
}

TEST_CASE("HTTP endpoints", "[service]") {
    RunningService running;
    auto client = running.client();

    SECTION("503 until the engine is installed") {
        auto health = client.Get("/health");
        REQUIRE(health);
        CHECK(health->status == 503);
        CHECK(json::parse(health->body)["status"] == "starting");
        auto search = client.Post("/v1/search", R"({"query":"renew"})", "application/json");
        REQUIRE(search);
        CHECK(search->status == 503);
    }

    running.service().set_engine(engine_with(std::make_shared<OverlapScorer>()));

    SECTION("health") {
        auto res = client.Get("/health");
        REQUIRE(res);
        CHECK(res->status == 200);
        auto j = json::parse(res->body);
        CHECK(j["status"] == "ok");
        CHECK(j["index_size"] == 4);
        CHECK(j["scorer"]["reachable"] == true);
    }
    SECTION("search") {
        auto res = client.Post("/v1/search", R"({"query":"renew license","top_k":1})", "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        auto j = json::parse(res->body);
        REQUIRE(j["results"].size() == 1);
        CHECK(j["results"][0]["faq_id"] == "lic");
        CHECK(j["degraded"] == false);
    }
    SECTION("bad requests") {
        for (const char* body : {"not json", R"({"top_k":3})", R"({"query":5})", R"({"query":"x","top_k":0})",
                                 R"({"query":"x","top_k":"3"})"}) {
            auto res = client.Post("/v1/search", body, "application/json");
            REQUIRE(res);
            CHECK(res->status == 400);
            CHECK(json::parse(res->body).contains("error"));
        }
    }
    SECTION("faq lookup") {
        auto res = client.Get("/v1/faq/gar");
        REQUIRE(res);
        CHECK(res->status == 200);
        CHECK(json::parse(res->body)["answer"] == "Trash pickup happens every Tuesday.");
        auto missing = client.Get("/v1/faq/nope");
        REQUIRE(missing);
        CHECK(missing->status == 404);
    }
}

TEST_CASE("HTTP search degrades when the scorer is down", "[service]") {
    RemoteScorerConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(fake::closed_port());
    cfg.attempts = 2;
    cfg.initial_backoff = std::chrono::milliseconds(5);
    auto engine = engine_with(std::make_shared<RemoteScorer>(cfg));
    RunningService running;
    running.service().set_engine(engine);
    auto client = running.client();

    auto res = client.Post("/v1/search", R"({"query":"when is the pool open"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto j = json::parse(res->body);
    CHECK(j["degraded"] == true);
    auto lexical = search_lexical(engine->index(), "when is the pool open", 10);
    REQUIRE(j["results"].size() == lexical.size());
    for (std::size_t i = 0; i < lexical.size(); ++i) CHECK(j["results"][i]["faq_id"] == lexical[i].id);

    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["scorer"]["reachable"] == false);

    std::vector<QueryRecord> queries{{"q1", "pool", {}}};
    CHECK_THROWS_AS(engine->run(queries, Method::Fused, 5), TransportError);
    CHECK_NOTHROW(engine->run(queries, Method::Lexical, 5));
}

TEST_CASE("remote scorer through the service", "[service]") {
    fake::ScorerServer scorer_server([](const json& req, int&) {
        return fake::ScorerServer::score_all(req, [](const std::string&, const std::string& a) {
            return a.find("June") != std::string::npos ? 0.95 : 0.05;
        });
    });
    RemoteScorerConfig cfg;
    cfg.url = scorer_server.url();
    auto engine = engine_with(std::make_shared<RemoteScorer>(cfg));
    auto r = engine->search("swimming season", 4);
    CHECK_FALSE(r.degraded);
    REQUIRE_FALSE(r.candidates.empty());
    CHECK(r.candidates[0].faq_id == "pool");
    CHECK(r.candidates[0].relevance == 0.95);
}
