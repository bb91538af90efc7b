#include "faqrank/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "faqrank/error.hpp"
#include "random.hpp"

namespace faqrank {

void EvalConfig::validate() const {
    for (const auto& [grade, g] : ndcg_gains)
        if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("nDCG gains must be finite and >= 0");
    if (precision_k == 0) throw ValidationError("precision k must be at least 1");
    for (auto k : success_ks)
        if (k == 0) throw ValidationError("success-rate k must be at least 1");
}

bool EvalConfig::is_relevant(const Qrels& qrels, const std::string& id) const {
    auto it = qrels.find(id);
    return it != qrels.end() && relevant_grades.count(it->second) != 0;
}

double EvalConfig::gain(const Qrels& qrels, const std::string& id) const {
    auto it = qrels.find(id);
    if (it == qrels.end()) return 0.0;
    auto g = ndcg_gains.find(it->second);
    double level = g == ndcg_gains.end() ? 0.0 : g->second;
    return gain_mode == GainMode::Linear ? level : std::exp2(level) - 1.0;
}

namespace {

void require_unique(std::span<const std::string> ranking) {
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ranking)
        if (!seen.insert(id).second) throw ValidationError("ranking lists \"" + id + "\" more than once");
}

std::size_t relevant_total(const Qrels& qrels, const EvalConfig& config) {
    return static_cast<std::size_t>(std::count_if(qrels.begin(), qrels.end(), [&](const auto& kv) {
        return config.relevant_grades.count(kv.second) != 0;
    }));
}

}  // namespace

double average_precision(std::span<const std::string> ranking, const Qrels& qrels, const EvalConfig& config) {
    require_unique(ranking);
    const auto total = relevant_total(qrels, config);
    if (total == 0) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (!config.is_relevant(qrels, ranking[i])) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    return sum / static_cast<double>(total);
}

double reciprocal_rank(std::span<const std::string> ranking, const Qrels& qrels, const EvalConfig& config) {
    require_unique(ranking);
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (config.is_relevant(qrels, ranking[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double precision_at_k(std::span<const std::string> ranking, const Qrels& qrels, std::size_t k,
                      const EvalConfig& config) {
    if (k == 0) throw ValidationError("precision k must be at least 1");
    require_unique(ranking);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i) hits += config.is_relevant(qrels, ranking[i]);
    return static_cast<double>(hits) / static_cast<double>(k);
}

double success_at_k(std::span<const std::string> ranking, const Qrels& qrels, std::size_t k,
                    const EvalConfig& config) {
    if (k == 0) throw ValidationError("success-rate k must be at least 1");
    require_unique(ranking);
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        if (config.is_relevant(qrels, ranking[i])) return 1.0;
    return 0.0;
}

double ndcg(std::span<const std::string> ranking, const Qrels& qrels, const EvalConfig& config) {
    require_unique(ranking);
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranking.size(); ++i)
        dcg += config.gain(qrels, ranking[i]) / std::log2(static_cast<double>(i + 2));
    std::vector<double> ideal;
    for (const auto& [id, grade] : qrels) ideal.push_back(config.gain(qrels, id));
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal.size(); ++i) idcg += ideal[i] / std::log2(static_cast<double>(i + 2));
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

EvalReport evaluate_run(const std::vector<RunEntry>& run, const std::vector<QueryRecord>& queries,
                        const EvalConfig& config) {
    config.validate();
    validate_run(run);
    std::unordered_map<std::string, std::vector<std::string>> rankings;
    std::unordered_set<std::string> known;
    for (const auto& q : queries) known.insert(q.qid);
    for (const auto& e : run) {
        if (!known.count(e.qid)) throw ValidationError("run contains qid \"" + e.qid + "\" absent from the query set");
        rankings[e.qid].push_back(e.faq_id);  // validate_run guarantees rank order
    }

    EvalReport report;
    report.precision_k = config.precision_k;
    for (auto k : config.success_ks) report.success[k] = 0.0;
    for (const auto& q : queries) {
        QueryMetrics m;
        m.qid = q.qid;
        for (auto k : config.success_ks) m.success[k] = 0.0;
        if (auto it = rankings.find(q.qid); it != rankings.end()) {
            const auto& r = it->second;
            m.ap = average_precision(r, q.judgments, config);
            m.rr = reciprocal_rank(r, q.judgments, config);
            m.precision = precision_at_k(r, q.judgments, config.precision_k, config);
            for (auto k : config.success_ks) m.success[k] = success_at_k(r, q.judgments, k, config);
            m.ndcg = ndcg(r, q.judgments, config);
        }
        report.per_query.push_back(std::move(m));
    }
    if (!queries.empty()) {
        const double n = static_cast<double>(queries.size());
        for (const auto& m : report.per_query) {
            report.map += m.ap;
            report.mrr += m.rr;
            report.precision += m.precision;
            report.ndcg += m.ndcg;
            for (const auto& [k, v] : m.success) report.success[k] += v;
        }
        report.map /= n;
        report.mrr /= n;
        report.precision /= n;
        report.ndcg /= n;
        for (auto& [k, v] : report.success) v /= n;
    }
    return report;
}

void write_report_json(const EvalReport& report, std::ostream& out) {
    nlohmann::ordered_json j;
    j["map"] = report.map;
    j["mrr"] = report.mrr;
    j["p@" + std::to_string(report.precision_k)] = report.precision;
    for (const auto& [k, v] : report.success) j["sr@" + std::to_string(k)] = v;
    j["ndcg"] = report.ndcg;
    j["queries"] = report.per_query.size();
    auto& per = j["per_query"] = nlohmann::ordered_json::array();
    for (const auto& m : report.per_query) {
        nlohmann::ordered_json q;
        q["qid"] = m.qid;
        q["ap"] = m.ap;
        q["rr"] = m.rr;
        q["p@" + std::to_string(report.precision_k)] = m.precision;
        for (const auto& [k, v] : m.success) q["sr@" + std::to_string(k)] = v;
        q["ndcg"] = m.ndcg;
        per.push_back(std::move(q));
    }
    out << j.dump(2) << '\n';
}

void write_report_table(const EvalReport& report, std::ostream& out) {
    std::vector<std::pair<std::string, double>> cols{{"MAP", report.map}, {"MRR", report.mrr}};
    cols.emplace_back("P@" + std::to_string(report.precision_k), report.precision);
    for (const auto& [k, v] : report.success) cols.emplace_back("SR@" + std::to_string(k), v);
    cols.emplace_back("NDCG", report.ndcg);
    for (const auto& [name, v] : cols) out << std::setw(8) << name;
    out << '\n';
    out << std::fixed << std::setprecision(3);
    for (const auto& [name, v] : cols) out << std::setw(8) << v;
    out << '\n';
    out.unsetf(std::ios::floatfield);
}

std::vector<FoldSplit> kfold_split(const std::vector<std::string>& ids, std::size_t folds,
                                   std::array<double, 3> ratios, std::uint64_t seed) {
    if (folds < 2) throw ValidationError("kfold needs at least 2 folds");
    if (ids.size() < folds)
        throw ValidationError("kfold needs at least as many queries as folds (" + std::to_string(ids.size()) +
                              " < " + std::to_string(folds) + ")");
    for (double r : ratios)
        if (!(r >= 0.0)) throw ValidationError("split ratios must be non-negative");
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
        throw ValidationError("split ratios must sum to 1");
    if (std::abs(ratios[2] - 1.0 / static_cast<double>(folds)) > 1e-9)
        throw ValidationError("test ratio must equal 1/folds so that test sets partition the queries");
    {
        std::unordered_set<std::string_view> seen;
        for (const auto& id : ids)
            if (!seen.insert(id).second) throw ValidationError("kfold input repeats id \"" + id + "\"");
    }

    std::vector<std::string> order = ids;
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[detail::draw_below(rng, i)]);

    const std::size_t n = order.size();
    const std::size_t dev_size = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[1]));
    std::vector<FoldSplit> out(folds);
    std::size_t start = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
        auto& split = out[f];
        split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                          order.begin() + static_cast<std::ptrdiff_t>(start + size));
        const std::size_t dev = std::min(dev_size, n - size);
        for (std::size_t i = 0; i < n - size; ++i) {
            const auto& id = order[(start + size + i) % n];
            (i < dev ? split.dev : split.train).push_back(id);
        }
        start += size;
    }
    return out;
}

std::vector<ScoreBucket> score_bucket_report(const std::vector<RunEntry>& run,
                                             const std::vector<QueryRecord>& queries,
                                             const std::vector<double>& edges, const EvalConfig& config) {
    if (edges.empty()) throw ValidationError("bucket report needs at least one edge");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!std::isfinite(edges[i])) throw ValidationError("bucket edges must be finite");
        if (i > 0 && !(edges[i] > edges[i - 1])) throw ValidationError("bucket edges must increase strictly");
    }
    validate_run(run);
    if (run.empty()) return {};

    std::unordered_map<std::string, const QueryRecord*> by_qid;
    for (const auto& q : queries) by_qid.emplace(q.qid, &q);

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<ScoreBucket> buckets;
    buckets.push_back({-inf, edges.front(), 0, 0});
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) buckets.push_back({edges[i], edges[i + 1], 0, 0});
    buckets.push_back({edges.back(), inf, 0, 0});

    for (const auto& e : run) {
        if (e.rank != 1) continue;
        auto q = by_qid.find(e.qid);
        if (q == by_qid.end()) throw ValidationError("run contains qid \"" + e.qid + "\" absent from the query set");
        // First bucket whose upper bound exceeds the score.
        auto idx = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), e.score) - edges.begin());
        auto& b = buckets[idx];
        (config.is_relevant(q->second->judgments, e.faq_id) ? b.correct : b.incorrect)++;
    }
    return buckets;
}

void write_bucket_csv(const std::vector<ScoreBucket>& buckets, std::ostream& out) {
    out << "lower,upper,correct,incorrect\n";
    for (const auto& b : buckets)
        out << format_score(b.lower) << ',' << format_score(b.upper) << ',' << b.correct << ',' << b.incorrect
            << '\n';
}

}  // namespace faqrank
