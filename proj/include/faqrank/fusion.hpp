#pragma once

/// Combines lexical similarity and answer relevance into the final ranking.
///
/// Candidates whose similarity exceeds `alpha` form the high-lexical group,
/// ranked first by similarity. The rest are ranked after them by
/// similarity * t + relevance. Ties within a group go to the smaller id.

#include <cstddef>
#include <string>
#include <vector>

#include "faqrank/corpus.hpp"
#include "faqrank/lexical.hpp"
#include "faqrank/relevance.hpp"

namespace faqrank {

enum class PoolMode {
    Union,          // top pool_size of each leg
    RelevanceOnly,  // top pool_size of the relevance leg alone
};

std::string to_string(PoolMode mode);
PoolMode parse_pool_mode(const std::string& text);  // "union" | "bert-only"

struct FusionParams {
    double alpha = 0.3;
    double t = 10.0;
    std::size_t pool_size = 10;
    PoolMode pool_mode = PoolMode::Union;

    void validate() const;  // alpha not NaN, t finite and >= 0, pool_size >= 1
    bool operator==(const FusionParams&) const = default;
};

enum class FusionGroup { HighLexical, Fused };

std::string to_string(FusionGroup group);

struct FusedCandidate {
    std::string faq_id;
    double similarity = 0.0;
    double relevance = 0.0;
    FusionGroup group = FusionGroup::Fused;
    double fused_score = 0.0;

    bool operator==(const FusedCandidate&) const = default;
};

inline double fused_score(double similarity, double relevance, double t) {
    return similarity * t + relevance;
}

/// Pure fusion of two ranked legs. Each input must be sorted by descending
/// score with unique ids; throws ValidationError otherwise.
std::vector<FusedCandidate> fuse(const std::vector<ScoredId>& lexical, const std::vector<ScoredId>& relevance,
                                 const FusionParams& params);

/// A score that is non-increasing down a fused ranking, suitable for run
/// files: high-lexical candidates get similarity * t + 1, which bounds every
/// fused-group score from above when relevance lies in [0, 1].
double ranking_score(const FusedCandidate& candidate, const FusionParams& params);

struct FusedSearchResult {
    std::vector<FusedCandidate> candidates;
    bool degraded = false;  // relevance leg unavailable; lexical-only ranking
    std::string degraded_reason;
};

/// Runs both legs with k = pool_size (concurrently) and fuses them. When the
/// relevance leg fails with TransportError and `allow_degraded` is set, the
/// result falls back to the lexical leg alone and is flagged degraded.
FusedSearchResult search_fused(const LexicalIndex& index, const RelevanceScorer& scorer, const std::string& query,
                               const FaqCorpus& corpus, const FusionParams& params,
                               const NormalizationParams& norm = {}, bool allow_degraded = true);

}  // namespace faqrank
