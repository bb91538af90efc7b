#pragma once

/// Ranking metrics over graded judgments, run evaluation, k-fold splits and
/// the top-1 score/accuracy bucket report.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "faqrank/corpus.hpp"

namespace faqrank {

enum class GainMode {
    Linear,       // gain(grade)
    Exponential,  // 2^gain(grade) - 1
};

struct EvalConfig {
    std::set<Grade> relevant_grades{Grade::A, Grade::B, Grade::C};
    std::map<Grade, double> ndcg_gains{{Grade::A, 3.0}, {Grade::B, 2.0}, {Grade::C, 1.0}, {Grade::D, 0.0}};
    GainMode gain_mode = GainMode::Linear;
    std::size_t precision_k = 5;
    std::vector<std::size_t> success_ks{1, 5};

    void validate() const;
    bool is_relevant(const Qrels& qrels, const std::string& id) const;
    double gain(const Qrels& qrels, const std::string& id) const;
};

// Every metric takes a duplicate-free ranking (throws ValidationError otherwise).
double average_precision(std::span<const std::string> ranking, const Qrels& qrels, const EvalConfig& config = {});
double reciprocal_rank(std::span<const std::string> ranking, const Qrels& qrels, const EvalConfig& config = {});
/// Denominator is k even when the ranking is shorter.
double precision_at_k(std::span<const std::string> ranking, const Qrels& qrels, std::size_t k,
                      const EvalConfig& config = {});
/// 1 if a relevant item appears in the top k, else 0.
double success_at_k(std::span<const std::string> ranking, const Qrels& qrels, std::size_t k,
                    const EvalConfig& config = {});
/// DCG over the whole ranking with log2(rank + 1) discount, normalized by the
/// ideal ordering of every judged item.
double ndcg(std::span<const std::string> ranking, const Qrels& qrels, const EvalConfig& config = {});

struct QueryMetrics {
    std::string qid;
    double ap = 0.0;
    double rr = 0.0;
    double precision = 0.0;
    std::map<std::size_t, double> success;
    double ndcg = 0.0;
};

struct EvalReport {
    double map = 0.0;
    double mrr = 0.0;
    double precision = 0.0;  // P@config.precision_k
    std::size_t precision_k = 5;
    std::map<std::size_t, double> success;  // SR@k
    double ndcg = 0.0;
    std::vector<QueryMetrics> per_query;
};

/// Metrics per query in `queries` plus unweighted means. Queries missing from
/// the run score 0 everywhere; run qids absent from `queries` are an error.
EvalReport evaluate_run(const std::vector<RunEntry>& run, const std::vector<QueryRecord>& queries,
                        const EvalConfig& config = {});

void write_report_json(const EvalReport& report, std::ostream& out);
void write_report_table(const EvalReport& report, std::ostream& out);

struct FoldSplit {
    std::vector<std::string> train;
    std::vector<std::string> dev;
    std::vector<std::string> test;
};

/// Shuffles ids with `seed`, cuts them into `folds` near-equal blocks and
/// uses block f as fold f's test set, the following ids (cyclically) as its
/// dev set, and the rest for training. Test sets partition the input. The
/// test ratio must equal 1/folds.
std::vector<FoldSplit> kfold_split(const std::vector<std::string>& ids, std::size_t folds = 5,
                                   std::array<double, 3> ratios = {0.6, 0.2, 0.2}, std::uint64_t seed = 0);

struct ScoreBucket {
    double lower = 0.0;  // inclusive
    double upper = 0.0;  // exclusive
    std::size_t correct = 0;
    std::size_t incorrect = 0;
};

/// Buckets queries by the score of their rank-1 entry and counts whether
/// that entry is relevant. Rows: (-inf, e0), [e0, e1), ..., [e_last, +inf).
/// An empty run yields an empty table.
std::vector<ScoreBucket> score_bucket_report(const std::vector<RunEntry>& run,
                                             const std::vector<QueryRecord>& queries,
                                             const std::vector<double>& edges, const EvalConfig& config = {});

void write_bucket_csv(const std::vector<ScoreBucket>& buckets, std::ostream& out);

}  // namespace faqrank
