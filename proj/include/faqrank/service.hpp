#pragma once

/// The assembled ranker (corpus + index + scorer + parameters) shared by the
/// CLI and the HTTP service, plus run generation for evaluation.

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faqrank/config.hpp"
#include "faqrank/corpus.hpp"
#include "faqrank/fusion.hpp"
#include "faqrank/lexical.hpp"
#include "faqrank/relevance.hpp"

namespace httplib {
class Server;
}

namespace faqrank {

enum class Method { Lexical, Relevance, Fused };

std::string to_string(Method method);
Method parse_method(const std::string& text);

class SearchService {
public:
    SearchService(FaqCorpus corpus, LexicalIndex index, std::shared_ptr<const RelevanceScorer> scorer,
                  FusionParams fusion, NormalizationParams normalization);

    /// Loads the corpus, stopwords and (snapshot or fresh) index and builds
    /// the configured scorer. `config` must already be validated.
    static std::shared_ptr<SearchService> from_config(const AppConfig& config);

    /// Fused search truncated to top_k; degrades to lexical-only when the
    /// scorer is unreachable.
    FusedSearchResult search(const std::string& query, std::size_t top_k) const;

    /// Ranked run for one method. Strict: relevance transport failures
    /// propagate instead of degrading.
    std::vector<RunEntry> run(const std::vector<QueryRecord>& queries, Method method, std::size_t depth) const;

    const FaqCorpus& corpus() const noexcept { return corpus_; }
    const LexicalIndex& index() const noexcept { return index_; }
    const RelevanceScorer& scorer() const noexcept { return *scorer_; }
    const FusionParams& fusion() const noexcept { return fusion_; }
    const NormalizationParams& normalization() const noexcept { return normalization_; }

private:
    FaqCorpus corpus_;
    LexicalIndex index_;
    std::shared_ptr<const RelevanceScorer> scorer_;
    FusionParams fusion_;
    NormalizationParams normalization_;
};

std::shared_ptr<const RelevanceScorer> make_scorer(const ScorerSettings& settings,
                                                   std::shared_ptr<const Analyzer> analyzer);
std::shared_ptr<const Analyzer> make_analyzer(const AppConfig& config);

/// {"query": ..., "results": [{rank, faq_id, question, answer, similarity,
/// relevance, fused_score, group}], "degraded": bool}
nlohmann::ordered_json search_response_json(const std::string& query, const FusedSearchResult& result,
                                            const FaqCorpus& corpus);

/// HTTP front end. Endpoints:
///   POST /v1/search  {"query": str, "top_k": int >= 1 (default 10)}
///   GET  /v1/faq/{id}
///   GET  /health
/// Every endpoint answers 503 until an engine is installed.
class HttpService {
public:
    HttpService();
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    void set_engine(std::shared_ptr<const SearchService> engine);

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Serves on the bound socket until stop(); blocks.
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    std::shared_ptr<const SearchService> engine() const;

    std::unique_ptr<httplib::Server> server_;
    mutable std::mutex mutex_;
    std::shared_ptr<const SearchService> engine_;
};

}  // namespace faqrank
