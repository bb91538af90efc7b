#pragma once

/// Query-question similarity: an Okapi BM25 index over FAQ questions and the
/// query-length normalization applied before scores are fused.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqrank/analyzer.hpp"
#include "faqrank/corpus.hpp"

namespace faqrank {

struct Bm25Params {
    double k = 1.2;
    double b = 0.75;

    void validate() const;  // k >= 0, 0 <= b <= 1
    bool operator==(const Bm25Params&) const = default;
};

/// Divisor coefficients: content_words * k1 + dependency_relations * k2.
struct NormalizationParams {
    double k1 = 4.0;
    double k2 = 2.0;

    void validate() const;  // k1 > 0, k2 >= 0
    double divisor(const AnalyzedText& query) const;
    bool operator==(const NormalizationParams&) const = default;
};

/// A (FAQ id, score) pair as produced by either retrieval leg.
struct ScoredId {
    std::string id;
    double score = 0.0;

    bool operator==(const ScoredId&) const = default;
};

/// Sorts descending by score, ties by ascending id.
void sort_ranked(std::vector<ScoredId>& results);

/// Immutable inverted index over the analyzed questions of a corpus. The
/// indexed terms are the analyzer's content words.
class LexicalIndex {
public:
    struct Posting {
        std::uint32_t doc = 0;  // position in doc_ids()
        std::uint32_t tf = 0;
        bool operator==(const Posting&) const = default;
    };

    static LexicalIndex build(const FaqCorpus& corpus, std::shared_ptr<const Analyzer> analyzer,
                              Bm25Params params = {});

    const Analyzer& analyzer() const noexcept { return *analyzer_; }
    std::shared_ptr<const Analyzer> analyzer_ptr() const noexcept { return analyzer_; }
    const Bm25Params& params() const noexcept { return params_; }
    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }
    std::span<const Posting> postings(std::string_view term) const;
    std::size_t term_count() const noexcept { return postings_.size(); }

    bool contains(std::string_view doc_id) const { return doc_of_.count(std::string(doc_id)) != 0; }

    /// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
    double idf(std::string_view term) const;

    /// BM25 of one document against the distinct query terms. Throws
    /// ValidationError for unknown doc ids.
    double raw_score(std::span<const std::string> query_terms, std::string_view doc_id) const;

    /// Raw BM25 for every document that shares at least one term with the query.
    std::vector<ScoredId> score_all(std::span<const std::string> query_terms) const;

    /// Versioned JSON snapshot. Loading checks the analyzer fingerprint.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static LexicalIndex load(std::istream& in, std::shared_ptr<const Analyzer> analyzer);
    static LexicalIndex load(const std::filesystem::path& path, std::shared_ptr<const Analyzer> analyzer);

    static constexpr int kFormatVersion = 1;

private:
    LexicalIndex() = default;
    void finalize();

    std::shared_ptr<const Analyzer> analyzer_;
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::uint32_t> doc_of_;
};

/// Normalized similarity of `query` to one indexed question. Queries with
/// no content words (zero divisor) score 0.
double similarity(const LexicalIndex& index, std::string_view query, std::string_view doc_id,
                  const NormalizationParams& norm = {});

/// Top-k documents by normalized similarity. Zero-score documents are left
/// out, so the result may be shorter than k. Throws ValidationError if k == 0.
std::vector<ScoredId> search_lexical(const LexicalIndex& index, std::string_view query, std::size_t k,
                                     const NormalizationParams& norm = {});

}  // namespace faqrank
