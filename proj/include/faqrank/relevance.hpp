#pragma once

/// Query-answer relevance: negative-sampled training data, the scorer
/// interface, a deterministic overlap scorer and relevance-only search.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "faqrank/analyzer.hpp"
#include "faqrank/corpus.hpp"
#include "faqrank/lexical.hpp"

namespace faqrank {

struct RelevanceExample {
    std::string left;   // a stored question or a user query
    std::string right;  // an answer
    int label = 0;      // 1 when `right` answers `left`
    // Provenance, not serialized: the entry the left side came from and the
    // entry the answer was drawn from.
    std::string left_id;
    std::string right_id;

    bool operator==(const RelevanceExample&) const = default;
};

enum class NegativePool {
    Pooled,      // negatives drawn from every corpus
    SameSource,  // negatives restricted to the positive's own corpus
};

/// One positive per (Q, A) across all corpora followed by `neg_ratio`
/// negatives whose answers come from distinct other entries, sampled without
/// replacement. Output is a pure function of the inputs and `seed`.
std::vector<RelevanceExample> generate_training_pairs(std::span<const FaqCorpus> corpora, std::size_t neg_ratio,
                                                      std::uint64_t seed,
                                                      NegativePool pool = NegativePool::Pooled);

inline constexpr std::size_t kDefaultNegativeRatio = 24;

struct ParaphraseTriple {
    std::string query;     // q
    std::string question;  // Q
    std::string answer;    // A
};

/// Each (q, Q, A) contributes positives (q, A) and (Q, A); exact text
/// duplicates collapse to their first occurrence.
std::vector<RelevanceExample> split_paraphrase_triples(std::span<const ParaphraseTriple> triples);

/// JSONL: {"left": ..., "right": ..., "label": 0|1}
void write_training_jsonl(std::span<const RelevanceExample> examples, std::ostream& out);
void write_training_jsonl(std::span<const RelevanceExample> examples, const std::filesystem::path& path);
std::vector<RelevanceExample> read_training_jsonl(std::istream& in);

struct TextPair {
    std::string query;
    std::string answer;
};

/// Batch scorer of (query, answer) pairs. Outputs lie in [0, 1] and follow
/// input order. Implementations must tolerate concurrent calls.
class RelevanceScorer {
public:
    virtual ~RelevanceScorer() = default;
    virtual std::vector<double> score_batch(std::span<const TextPair> pairs) const = 0;
    virtual std::string name() const = 0;
    /// Cheap liveness probe for health reporting.
    virtual bool reachable() const { return true; }
};

/// Fraction of the query's distinct content words that also occur in the
/// answer's content words. Queries without content words score 0.
class OverlapScorer final : public RelevanceScorer {
public:
    explicit OverlapScorer(std::shared_ptr<const Analyzer> analyzer = make_default_analyzer());

    std::vector<double> score_batch(std::span<const TextPair> pairs) const override;
    std::string name() const override { return "builtin-overlap"; }

    double score(const std::string& query, const std::string& answer) const;

private:
    std::shared_ptr<const Analyzer> analyzer_;
};

/// Scores every answer of `corpus` against `query` and returns the top k,
/// descending, ties by ascending id. Throws ValidationError if k == 0.
std::vector<ScoredId> search_relevance(const RelevanceScorer& scorer, const std::string& query,
                                       const FaqCorpus& corpus, std::size_t k);

}  // namespace faqrank
