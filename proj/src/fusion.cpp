#include "faqrank/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <unordered_map>
#include <unordered_set>

#include "faqrank/error.hpp"

namespace faqrank {

std::string to_string(PoolMode mode) {
    return mode == PoolMode::Union ? "union" : "bert-only";
}

PoolMode parse_pool_mode(const std::string& text) {
    if (text == "union") return PoolMode::Union;
    if (text == "bert-only" || text == "relevance-only") return PoolMode::RelevanceOnly;
    throw ValidationError("unknown pool mode \"" + text + "\" (expected union or bert-only)");
}

std::string to_string(FusionGroup group) {
    return group == FusionGroup::HighLexical ? "HIGH_LEXICAL" : "FUSED";
}

void FusionParams::validate() const {
    if (std::isnan(alpha)) throw ValidationError("fusion.alpha must not be NaN");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("fusion.t must be finite and >= 0");
    if (pool_size == 0) throw ValidationError("fusion.pool_size must be at least 1");
}

namespace {

std::unordered_map<std::string, double> index_leg(const std::vector<ScoredId>& leg, const char* name) {
    std::unordered_map<std::string, double> by_id;
    by_id.reserve(leg.size());
    for (std::size_t i = 0; i < leg.size(); ++i) {
        if (!std::isfinite(leg[i].score))
            throw ValidationError(std::string(name) + " results contain a non-finite score");
        if (i > 0 && leg[i].score > leg[i - 1].score)
            throw ValidationError(std::string(name) + " results are not sorted by descending score");
        if (!by_id.emplace(leg[i].id, leg[i].score).second)
            throw ValidationError(std::string(name) + " results repeat id \"" + leg[i].id + "\"");
    }
    return by_id;
}

FusedCandidate make_candidate(std::string id, double sim, double rel, const FusionParams& params) {
    FusedCandidate c;
    c.faq_id = std::move(id);
    c.similarity = sim;
    c.relevance = rel;
    c.group = sim > params.alpha ? FusionGroup::HighLexical : FusionGroup::Fused;
    c.fused_score = fused_score(sim, rel, params.t);
    return c;
}

}  // namespace

std::vector<FusedCandidate> fuse(const std::vector<ScoredId>& lexical, const std::vector<ScoredId>& relevance,
                                 const FusionParams& params) {
    params.validate();
    const auto sim_of = index_leg(lexical, "lexical");
    const auto rel_of = index_leg(relevance, "relevance");

    std::vector<std::string> pool;
    std::unordered_set<std::string> in_pool;
    auto take = [&](const std::vector<ScoredId>& leg) {
        for (std::size_t i = 0; i < leg.size() && i < params.pool_size; ++i)
            if (in_pool.insert(leg[i].id).second) pool.push_back(leg[i].id);
    };
    take(relevance);
    if (params.pool_mode == PoolMode::Union) take(lexical);

    std::vector<FusedCandidate> out;
    out.reserve(pool.size());
    for (auto& id : pool) {
        auto s = sim_of.find(id);
        auto r = rel_of.find(id);
        out.push_back(make_candidate(std::move(id), s == sim_of.end() ? 0.0 : s->second,
                                     r == rel_of.end() ? 0.0 : r->second, params));
    }
    std::sort(out.begin(), out.end(), [](const FusedCandidate& a, const FusedCandidate& b) {
        if (a.group != b.group) return a.group == FusionGroup::HighLexical;
        double ka = a.group == FusionGroup::HighLexical ? a.similarity : a.fused_score;
        double kb = b.group == FusionGroup::HighLexical ? b.similarity : b.fused_score;
        if (ka != kb) return ka > kb;
        return a.faq_id < b.faq_id;
    });
    return out;
}

double ranking_score(const FusedCandidate& candidate, const FusionParams& params) {
    if (candidate.group == FusionGroup::HighLexical) return candidate.similarity * params.t + 1.0;
    return candidate.fused_score;
}

FusedSearchResult search_fused(const LexicalIndex& index, const RelevanceScorer& scorer, const std::string& query,
                               const FaqCorpus& corpus, const FusionParams& params,
                               const NormalizationParams& norm, bool allow_degraded) {
    params.validate();
    auto relevance_leg = std::async(std::launch::async, [&] {
        return search_relevance(scorer, query, corpus, params.pool_size);
    });
    std::vector<ScoredId> lexical;
    try {
        lexical = search_lexical(index, query, params.pool_size, norm);
    } catch (...) {
        relevance_leg.wait();
        throw;
    }

    FusedSearchResult result;
    try {
        auto relevance = relevance_leg.get();
        result.candidates = fuse(lexical, relevance, params);
    } catch (const TransportError& e) {
        if (!allow_degraded) throw;
        result.degraded = true;
        result.degraded_reason = e.what();
        // Lexical order as is; groups still reflect the alpha threshold.
        for (const auto& hit : lexical) result.candidates.push_back(make_candidate(hit.id, hit.score, 0.0, params));
    }
    return result;
}

}  // namespace faqrank
