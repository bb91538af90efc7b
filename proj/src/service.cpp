#include "faqrank/service.hpp"

#include <httplib.h>

#include "faqrank/error.hpp"
#include "faqrank/remote_scorer.hpp"

namespace faqrank {

std::string to_string(Method method) {
    switch (method) {
        case Method::Lexical: return "lexical";
        case Method::Relevance: return "relevance";
        case Method::Fused: return "fused";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    if (text == "lexical") return Method::Lexical;
    if (text == "relevance") return Method::Relevance;
    if (text == "fused") return Method::Fused;
    throw ValidationError("unknown method \"" + text + "\" (expected lexical, relevance or fused)");
}

SearchService::SearchService(FaqCorpus corpus, LexicalIndex index, std::shared_ptr<const RelevanceScorer> scorer,
                             FusionParams fusion, NormalizationParams normalization)
    : corpus_(std::move(corpus)),
      index_(std::move(index)),
      scorer_(std::move(scorer)),
      fusion_(fusion),
      normalization_(normalization) {
    if (!scorer_) throw ValidationError("search service requires a scorer");
    fusion_.validate();
    normalization_.validate();
    if (index_.doc_ids().size() != corpus_.size())
        throw ValidationError("index covers " + std::to_string(index_.doc_ids().size()) + " documents but corpus has " +
                              std::to_string(corpus_.size()));
    for (std::size_t i = 0; i < corpus_.size(); ++i)
        if (index_.doc_ids()[i] != corpus_.entries()[i].id)
            throw ValidationError("index does not match corpus at entry \"" + corpus_.entries()[i].id + "\"");
}

std::shared_ptr<const Analyzer> make_analyzer(const AppConfig& config) {
    if (config.stopwords.empty()) return make_default_analyzer();
    return std::make_shared<const DefaultAnalyzer>(StopwordList::load(config.stopwords));
}

std::shared_ptr<const RelevanceScorer> make_scorer(const ScorerSettings& settings,
                                                   std::shared_ptr<const Analyzer> analyzer) {
    if (settings.kind == "remote") return std::make_shared<const RemoteScorer>(settings.remote());
    return std::make_shared<const OverlapScorer>(std::move(analyzer));
}

std::shared_ptr<SearchService> SearchService::from_config(const AppConfig& config) {
    if (config.corpus.empty()) throw ConfigError("no corpus configured (set corpus or --corpus)");
    auto corpus = load_faq_corpus(config.corpus);
    auto analyzer = make_analyzer(config);
    auto index = config.index.empty() ? LexicalIndex::build(corpus, analyzer, config.bm25)
                                      : LexicalIndex::load(std::filesystem::path(config.index), analyzer);
    auto scorer = make_scorer(config.scorer, analyzer);
    return std::make_shared<SearchService>(std::move(corpus), std::move(index), std::move(scorer), config.fusion,
                                           config.normalization);
}

FusedSearchResult SearchService::search(const std::string& query, std::size_t top_k) const {
    if (top_k == 0) throw ValidationError("top_k must be at least 1");
    auto result = search_fused(index_, *scorer_, query, corpus_, fusion_, normalization_, true);
    if (result.candidates.size() > top_k) result.candidates.resize(top_k);
    return result;
}

std::vector<RunEntry> SearchService::run(const std::vector<QueryRecord>& queries, Method method,
                                         std::size_t depth) const {
    if (depth == 0) throw ValidationError("run depth must be at least 1");
    std::vector<RunEntry> run;
    const std::string tag = to_string(method);
    for (const auto& q : queries) {
        std::vector<ScoredId> ranked;
        switch (method) {
            case Method::Lexical:
                ranked = search_lexical(index_, q.text, depth, normalization_);
                break;
            case Method::Relevance:
                ranked = search_relevance(*scorer_, q.text, corpus_, depth);
                break;
            case Method::Fused: {
                auto fused = search_fused(index_, *scorer_, q.text, corpus_, fusion_, normalization_, false);
                for (const auto& c : fused.candidates) {
                    if (ranked.size() == depth) break;
                    ranked.push_back({c.faq_id, ranking_score(c, fusion_)});
                }
                break;
            }
        }
        for (std::size_t i = 0; i < ranked.size(); ++i)
            run.push_back({q.qid, ranked[i].id, i + 1, ranked[i].score, tag});
    }
    return run;
}

nlohmann::ordered_json search_response_json(const std::string& query, const FusedSearchResult& result,
                                            const FaqCorpus& corpus) {
    nlohmann::ordered_json j;
    j["query"] = query;
    auto& results = j["results"] = nlohmann::ordered_json::array();
    std::size_t rank = 0;
    for (const auto& c : result.candidates) {
        const auto& entry = corpus.at(c.faq_id);
        nlohmann::ordered_json r;
        r["rank"] = ++rank;
        r["faq_id"] = c.faq_id;
        r["question"] = entry.question;
        r["answer"] = entry.answer;
        r["similarity"] = c.similarity;
        r["relevance"] = c.relevance;
        r["fused_score"] = c.fused_score;
        r["group"] = to_string(c.group);
        results.push_back(std::move(r));
    }
    j["degraded"] = result.degraded;
    if (result.degraded) j["degraded_reason"] = result.degraded_reason;
    return j;
}

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

}  // namespace

HttpService::HttpService() : server_(std::make_unique<httplib::Server>()) {
    server_->Post("/v1/search", [this](const httplib::Request& req, httplib::Response& res) {
        auto eng = engine();
        if (!eng) return send_error(res, 503, "index not ready");
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error&) {
            return send_error(res, 400, "request body is not valid JSON");
        }
        if (!body.is_object() || !body.contains("query") || !body["query"].is_string())
            return send_error(res, 400, "\"query\" must be a string");
        std::size_t top_k = 10;
        if (body.contains("top_k")) {
            const auto& k = body["top_k"];
            if (!k.is_number_integer() || k.get<long long>() < 1)
                return send_error(res, 400, "\"top_k\" must be a positive integer");
            top_k = k.get<std::size_t>();
        }
        const auto query = body["query"].get<std::string>();
        try {
            send_json(res, 200, search_response_json(query, eng->search(query, top_k), eng->corpus()));
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    server_->Get(R"(/v1/faq/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto eng = engine();
        if (!eng) return send_error(res, 503, "index not ready");
        const auto* entry = eng->corpus().find(req.matches[1].str());
        if (!entry) return send_error(res, 404, "unknown FAQ id \"" + req.matches[1].str() + "\"");
        send_json(res, 200,
                  {{"id", entry->id}, {"question", entry->question}, {"answer", entry->answer}, {"source", entry->source}});
    });

    server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        auto eng = engine();
        if (!eng) return send_json(res, 503, {{"status", "starting"}});
        nlohmann::ordered_json body;
        body["status"] = "ok";
        body["index_size"] = eng->index().doc_count();
        body["scorer"] = {{"name", eng->scorer().name()}, {"reachable", eng->scorer().reachable()}};
        send_json(res, 200, body);
    });
}

HttpService::~HttpService() {
    stop();
}

void HttpService::set_engine(std::shared_ptr<const SearchService> engine) {
    std::lock_guard lock(mutex_);
    engine_ = std::move(engine);
}

std::shared_ptr<const SearchService> HttpService::engine() const {
    std::lock_guard lock(mutex_);
    return engine_;
}

int HttpService::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen_after_bind() {
    return server_->listen_after_bind();
}

void HttpService::stop() {
    if (server_) server_->stop();
}

void HttpService::wait_until_ready() const {
    server_->wait_until_ready();
}

}  // namespace faqrank
