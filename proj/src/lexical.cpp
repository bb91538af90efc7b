#include "faqrank/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "faqrank/error.hpp"

namespace faqrank {

namespace {

std::vector<std::string> distinct_terms(std::span<const std::string> terms) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : terms)
        if (seen.insert(t).second) out.push_back(t);
    return out;
}

}  // namespace

void Bm25Params::validate() const {
    if (!(k >= 0.0) || !std::isfinite(k)) throw ValidationError("bm25.k must be a finite value >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("bm25.b must lie in [0, 1]");
}

void NormalizationParams::validate() const {
    if (!(k1 > 0.0) || !std::isfinite(k1)) throw ValidationError("normalization.k1 must be finite and > 0");
    if (!(k2 >= 0.0) || !std::isfinite(k2)) throw ValidationError("normalization.k2 must be finite and >= 0");
}

double NormalizationParams::divisor(const AnalyzedText& query) const {
    return static_cast<double>(query.content_word_count) * k1 +
           static_cast<double>(query.dependency_relation_count) * k2;
}

void sort_ranked(std::vector<ScoredId>& results) {
    std::sort(results.begin(), results.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

LexicalIndex LexicalIndex::build(const FaqCorpus& corpus, std::shared_ptr<const Analyzer> analyzer,
                                 Bm25Params params) {
    if (corpus.empty()) throw ValidationError("cannot index an empty corpus");
    if (!analyzer) throw ValidationError("index requires an analyzer");
    params.validate();

    LexicalIndex index;
    index.analyzer_ = std::move(analyzer);
    index.params_ = params;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lengths_.reserve(corpus.size());
    for (const auto& entry : corpus.entries()) {
        auto doc = static_cast<std::uint32_t>(index.doc_ids_.size());
        auto analyzed = index.analyzer_->analyze(entry.question);
        // Ordered map keeps posting construction independent of hash order.
        std::map<std::string, std::uint32_t> tf;
        for (const auto& term : analyzed.content_words) ++tf[term];
        for (const auto& [term, count] : tf) index.postings_[term].push_back({doc, count});
        index.doc_ids_.push_back(entry.id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(analyzed.content_words.size()));
    }
    index.finalize();
    return index;
}

void LexicalIndex::finalize() {
    doc_of_.clear();
    for (std::uint32_t i = 0; i < doc_ids_.size(); ++i) doc_of_.emplace(doc_ids_[i], i);
    double total = 0.0;
    for (auto len : doc_lengths_) total += len;
    avg_doc_length_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
}

std::span<const LexicalIndex::Posting> LexicalIndex::postings(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return {};
    return it->second;
}

double LexicalIndex::idf(std::string_view term) const {
    const double n = static_cast<double>(doc_count());
    const double df = static_cast<double>(postings(term).size());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

namespace {

double term_weight(double idf, double tf, double dl, double avgdl, const Bm25Params& p) {
    // An index whose documents are all empty has avgdl == 0; treat length as neutral.
    double length_ratio = avgdl > 0.0 ? dl / avgdl : 1.0;
    return idf * tf * (p.k + 1.0) / (tf + p.k * (1.0 - p.b + p.b * length_ratio));
}

}  // namespace

double LexicalIndex::raw_score(std::span<const std::string> query_terms, std::string_view doc_id) const {
    auto it = doc_of_.find(std::string(doc_id));
    if (it == doc_of_.end()) throw ValidationError("unknown document id \"" + std::string(doc_id) + "\"");
    const auto doc = it->second;
    double score = 0.0;
    for (const auto& term : distinct_terms(query_terms)) {
        auto list = postings(term);
        auto p = std::lower_bound(list.begin(), list.end(), doc,
                                  [](const Posting& a, std::uint32_t d) { return a.doc < d; });
        if (p == list.end() || p->doc != doc) continue;
        score += term_weight(idf(term), p->tf, doc_lengths_[doc], avg_doc_length_, params_);
    }
    return score;
}

std::vector<ScoredId> LexicalIndex::score_all(std::span<const std::string> query_terms) const {
    std::vector<double> acc(doc_count(), 0.0);
    std::vector<bool> hit(doc_count(), false);
    for (const auto& term : distinct_terms(query_terms)) {
        auto list = postings(term);
        if (list.empty()) continue;
        const double w = idf(term);
        for (const auto& p : list) {
            acc[p.doc] += term_weight(w, p.tf, doc_lengths_[p.doc], avg_doc_length_, params_);
            hit[p.doc] = true;
        }
    }
    std::vector<ScoredId> out;
    for (std::size_t d = 0; d < acc.size(); ++d)
        if (hit[d]) out.push_back({doc_ids_[d], acc[d]});
    return out;
}

void LexicalIndex::save(std::ostream& out) const {
    nlohmann::ordered_json j;
    j["format"] = "faqrank-lexical-index";
    j["format_version"] = kFormatVersion;
    j["analyzer"] = analyzer_->fingerprint();
    j["bm25"] = {{"k", params_.k}, {"b", params_.b}};
    j["doc_ids"] = doc_ids_;
    j["doc_lengths"] = doc_lengths_;
    // Sorted terms make snapshots byte-identical across runs.
    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, list] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    auto& plist = j["postings"] = nlohmann::ordered_json::object();
    for (const auto& term : terms) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : postings_.at(term)) arr.push_back({p.doc, p.tf});
        plist[term] = std::move(arr);
    }
    out << j.dump() << '\n';
    if (!out) throw IoError("failed writing index snapshot");
}

void LexicalIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    save(out);
}

LexicalIndex LexicalIndex::load(std::istream& in, std::shared_ptr<const Analyzer> analyzer) {
    if (!analyzer) throw ValidationError("index requires an analyzer");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid index snapshot: ") + e.what());
    }
    try {
        if (j.at("format") != "faqrank-lexical-index") throw ParseError("not a faqrank index snapshot");
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw ParseError("unsupported index format version " + j.at("format_version").dump());
        if (j.at("analyzer").get<std::string>() != analyzer->fingerprint())
            throw ValidationError("index was built with analyzer " + j.at("analyzer").get<std::string>() +
                                  " but " + analyzer->fingerprint() + " was supplied");
        LexicalIndex index;
        index.analyzer_ = std::move(analyzer);
        index.params_ = {j.at("bm25").at("k").get<double>(), j.at("bm25").at("b").get<double>()};
        index.params_.validate();
        index.doc_ids_ = j.at("doc_ids").get<std::vector<std::string>>();
        index.doc_lengths_ = j.at("doc_lengths").get<std::vector<std::uint32_t>>();
        if (index.doc_ids_.empty() || index.doc_ids_.size() != index.doc_lengths_.size())
            throw ParseError("index snapshot has inconsistent document tables");
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& list = index.postings_[term];
            for (const auto& p : arr) {
                Posting posting{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
                if (posting.doc >= index.doc_ids_.size() || (!list.empty() && list.back().doc >= posting.doc))
                    throw ParseError("index snapshot posting list for \"" + term + "\" is malformed");
                list.push_back(posting);
            }
        }
        index.finalize();
        if (index.doc_of_.size() != index.doc_ids_.size()) throw ParseError("index snapshot repeats a doc id");
        return index;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid index snapshot: ") + e.what());
    }
}

LexicalIndex LexicalIndex::load(const std::filesystem::path& path, std::shared_ptr<const Analyzer> analyzer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return load(in, std::move(analyzer));
}

double similarity(const LexicalIndex& index, std::string_view query, std::string_view doc_id,
                  const NormalizationParams& norm) {
    auto analyzed = index.analyzer().analyze(query);
    double raw = index.raw_score(analyzed.content_words, doc_id);
    double divisor = norm.divisor(analyzed);
    return divisor > 0.0 ? raw / divisor : 0.0;
}

std::vector<ScoredId> search_lexical(const LexicalIndex& index, std::string_view query, std::size_t k,
                                     const NormalizationParams& norm) {
    if (k == 0) throw ValidationError("k must be at least 1");
    auto analyzed = index.analyzer().analyze(query);
    double divisor = norm.divisor(analyzed);
    if (!(divisor > 0.0)) return {};
    auto scored = index.score_all(analyzed.content_words);
    std::vector<ScoredId> out;
    out.reserve(scored.size());
    for (auto& s : scored) {
        double sim = s.score / divisor;
        if (sim > 0.0) out.push_back({std::move(s.id), sim});
    }
    sort_ranked(out);
    if (out.size() > k) out.resize(k);
    return out;
}

}  // namespace faqrank
