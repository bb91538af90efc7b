#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "faqrank/analyzer.hpp"
#include "faqrank/config.hpp"
#include "faqrank/corpus.hpp"
#include "faqrank/error.hpp"
#include "faqrank/evalkit.hpp"
#include "faqrank/fusion.hpp"
#include "faqrank/lexical.hpp"
#include "faqrank/relevance.hpp"
#include "faqrank/service.hpp"

namespace py = pybind11;
using namespace faqrank;

namespace {

using Ranked = std::vector<std::pair<std::string, double>>;

Ranked to_pairs(const std::vector<ScoredId>& v) {
    Ranked out;
    out.reserve(v.size());
    for (const auto& s : v) out.emplace_back(s.id, s.score);
    return out;
}

std::vector<ScoredId> from_pairs(const Ranked& v) {
    std::vector<ScoredId> out;
    out.reserve(v.size());
    for (const auto& [id, score] : v) out.push_back({id, score});
    return out;
}

Qrels to_qrels(const std::map<std::string, std::string>& judgments) {
    Qrels q;
    for (const auto& [id, g] : judgments) q.emplace(id, parse_grade(g));
    return q;
}

py::dict analysis_dict(const AnalyzedText& a) {
    py::dict d;
    d["tokens"] = a.tokens;
    d["content_words"] = a.content_words;
    d["content_word_count"] = a.content_word_count;
    d["dependency_relation_count"] = a.dependency_relation_count;
    return d;
}

}  // namespace

PYBIND11_MODULE(_faqrank, m) {
    m.doc() = "Hybrid lexical + answer-relevance FAQ retrieval";

    auto base = py::register_exception<Error>(m, "FaqrankError");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<TransportError>(m, "TransportError", base.ptr());
    py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());

    m.def("analyze", [](const std::string& text) { return analysis_dict(DefaultAnalyzer().analyze(text)); },
          "Tokens, content words and the two normalization counts under the default analyzer",
          py::arg("text"));

    py::class_<FaqEntry>(m, "FaqEntry")
        .def(py::init([](std::string id, std::string question, std::string answer, std::string source) {
                 return FaqEntry{std::move(id), std::move(question), std::move(answer), std::move(source)};
             }),
             py::arg("id"), py::arg("question"), py::arg("answer"), py::arg("source") = "")
        .def_readonly("id", &FaqEntry::id)
        .def_readonly("question", &FaqEntry::question)
        .def_readonly("answer", &FaqEntry::answer)
        .def_readonly("source", &FaqEntry::source)
        .def("__repr__", [](const FaqEntry& e) { return "<FaqEntry " + e.id + ">"; });

    py::class_<FaqCorpus>(m, "FaqCorpus")
        .def(py::init([](std::vector<FaqEntry> entries) { return FaqCorpus(std::move(entries)); }),
             py::arg("entries"))
        .def("__len__", &FaqCorpus::size)
        .def_property_readonly("entries", &FaqCorpus::entries)
        .def_property_readonly("source", &FaqCorpus::source)
        .def("get", [](const FaqCorpus& c, const std::string& id) { return c.at(id); }, py::arg("id"));

    m.def("load_faq_corpus", [](const std::string& path) { return load_faq_corpus(path); }, py::arg("path"));

    py::class_<LexicalIndex>(m, "LexicalIndex")
        .def_static(
            "build",
            [](const FaqCorpus& corpus, double k, double b) {
                return LexicalIndex::build(corpus, make_default_analyzer(), Bm25Params{k, b});
            },
            py::arg("corpus"), py::arg("k") = 1.2, py::arg("b") = 0.75)
        .def_property_readonly("doc_count", &LexicalIndex::doc_count)
        .def_property_readonly("avg_doc_length", &LexicalIndex::avg_doc_length)
        .def("raw_score",
             [](const LexicalIndex& idx, const std::string& query, const std::string& doc_id) {
                 auto a = idx.analyzer().analyze(query);
                 return idx.raw_score(a.content_words, doc_id);
             },
             py::arg("query"), py::arg("doc_id"))
        .def("similarity",
             [](const LexicalIndex& idx, const std::string& query, const std::string& doc_id, double k1, double k2) {
                 return similarity(idx, query, doc_id, NormalizationParams{k1, k2});
             },
             py::arg("query"), py::arg("doc_id"), py::arg("k1") = 4.0, py::arg("k2") = 2.0)
        .def("search",
             [](const LexicalIndex& idx, const std::string& query, std::size_t k, double k1, double k2) {
                 return to_pairs(search_lexical(idx, query, k, NormalizationParams{k1, k2}));
             },
             py::arg("query"), py::arg("k") = 10, py::arg("k1") = 4.0, py::arg("k2") = 2.0);

    py::class_<RelevanceScorer, std::shared_ptr<RelevanceScorer>>(m, "RelevanceScorer")
        .def("score_batch",
             [](const RelevanceScorer& s, const std::vector<std::pair<std::string, std::string>>& pairs) {
                 std::vector<TextPair> tp;
                 for (const auto& [q, a] : pairs) tp.push_back({q, a});
                 py::gil_scoped_release release;
                 return s.score_batch(tp);
             },
             py::arg("pairs"))
        .def_property_readonly("name", &RelevanceScorer::name);
    py::class_<OverlapScorer, RelevanceScorer, std::shared_ptr<OverlapScorer>>(m, "OverlapScorer")
        .def(py::init([] { return std::make_shared<OverlapScorer>(); }));

    m.def("search_relevance",
          [](const RelevanceScorer& scorer, const std::string& query, const FaqCorpus& corpus, std::size_t k) {
              return to_pairs(search_relevance(scorer, query, corpus, k));
          },
          py::arg("scorer"), py::arg("query"), py::arg("corpus"), py::arg("k") = 10);

    py::class_<FusionParams>(m, "FusionParams")
        .def(py::init([](double alpha, double t, std::size_t pool_size, const std::string& pool_mode) {
                 FusionParams p{alpha, t, pool_size, parse_pool_mode(pool_mode)};
                 p.validate();
                 return p;
             }),
             py::arg("alpha") = 0.3, py::arg("t") = 10.0, py::arg("pool_size") = 10, py::arg("pool_mode") = "union")
        .def_readonly("alpha", &FusionParams::alpha)
        .def_readonly("t", &FusionParams::t)
        .def_readonly("pool_size", &FusionParams::pool_size);

    py::class_<FusedCandidate>(m, "FusedCandidate")
        .def_readonly("faq_id", &FusedCandidate::faq_id)
        .def_readonly("similarity", &FusedCandidate::similarity)
        .def_readonly("relevance", &FusedCandidate::relevance)
        .def_readonly("fused_score", &FusedCandidate::fused_score)
        .def_property_readonly("group", [](const FusedCandidate& c) { return to_string(c.group); })
        .def("__repr__", [](const FusedCandidate& c) {
            return "<FusedCandidate " + c.faq_id + " " + to_string(c.group) + ">";
        });

    m.def("fused_score", &fused_score, py::arg("similarity"), py::arg("relevance"), py::arg("t"));
    m.def("fuse",
          [](const Ranked& lexical, const Ranked& relevance, const FusionParams& params) {
              return fuse(from_pairs(lexical), from_pairs(relevance), params);
          },
          "Fuse two descending (id, score) lists", py::arg("lexical"), py::arg("relevance"),
          py::arg("params") = FusionParams{});

    py::class_<SearchService, std::shared_ptr<SearchService>>(m, "SearchService")
        .def_static("from_config",
                    [](const std::string& config_json) {
                        return SearchService::from_config(config_from_json(nlohmann::json::parse(config_json)));
                    },
                    "Assemble the ranker from a JSON configuration string", py::arg("config_json"))
        .def("search",
             [](const SearchService& s, const std::string& query, std::size_t top_k) {
                 FusedSearchResult r;
                 {
                     py::gil_scoped_release release;
                     r = s.search(query, top_k);
                 }
                 return search_response_json(query, r, s.corpus()).dump();
             },
             "Search and return the JSON document served by POST /v1/search", py::arg("query"),
             py::arg("top_k") = 10);

    m.def("average_precision",
          [](const std::vector<std::string>& ranking, const std::map<std::string, std::string>& qrels) {
              return average_precision(ranking, to_qrels(qrels));
          },
          py::arg("ranking"), py::arg("qrels"));
    m.def("reciprocal_rank",
          [](const std::vector<std::string>& ranking, const std::map<std::string, std::string>& qrels) {
              return reciprocal_rank(ranking, to_qrels(qrels));
          },
          py::arg("ranking"), py::arg("qrels"));
    m.def("precision_at_k",
          [](const std::vector<std::string>& ranking, const std::map<std::string, std::string>& qrels, std::size_t k) {
              return precision_at_k(ranking, to_qrels(qrels), k);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("k") = 5);
    m.def("success_at_k",
          [](const std::vector<std::string>& ranking, const std::map<std::string, std::string>& qrels, std::size_t k) {
              return success_at_k(ranking, to_qrels(qrels), k);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("k"));
    m.def("ndcg",
          [](const std::vector<std::string>& ranking, const std::map<std::string, std::string>& qrels) {
              return ndcg(ranking, to_qrels(qrels));
          },
          py::arg("ranking"), py::arg("qrels"));

    m.def("kfold_split",
          [](const std::vector<std::string>& ids, std::size_t folds, std::array<double, 3> ratios, std::uint64_t seed) {
              py::list out;
              for (const auto& s : kfold_split(ids, folds, ratios, seed)) {
                  py::dict d;
                  d["train"] = s.train;
                  d["dev"] = s.dev;
                  d["test"] = s.test;
                  out.append(d);
              }
              return out;
          },
          py::arg("ids"), py::arg("folds") = 5, py::arg("ratios") = std::array<double, 3>{0.6, 0.2, 0.2},
          py::arg("seed") = 0);

    m.def("generate_training_pairs",
          [](const std::vector<FaqCorpus>& corpora, std::size_t neg_ratio, std::uint64_t seed, bool same_source) {
              std::vector<std::tuple<std::string, std::string, int>> out;
              for (auto& ex : generate_training_pairs(corpora, neg_ratio, seed,
                                                      same_source ? NegativePool::SameSource : NegativePool::Pooled))
                  out.emplace_back(std::move(ex.left), std::move(ex.right), ex.label);
              return out;
          },
          "(left, right, label) triples", py::arg("corpora"), py::arg("neg_ratio") = kDefaultNegativeRatio,
          py::arg("seed") = 0, py::arg("same_source") = false);

    m.def("split_paraphrase_triples",
          [](const std::vector<std::tuple<std::string, std::string, std::string>>& triples) {
              std::vector<ParaphraseTriple> in;
              for (const auto& [q, question, a] : triples) in.push_back({q, question, a});
              std::vector<std::pair<std::string, std::string>> out;
              for (auto& ex : split_paraphrase_triples(in)) out.emplace_back(std::move(ex.left), std::move(ex.right));
              return out;
          },
          "(query, question, answer) triples to deduplicated positive (left, right) pairs", py::arg("triples"));
}
