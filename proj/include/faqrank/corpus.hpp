#pragma once

/// FAQ corpora, query sets with graded judgments, and ranked-run files.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace faqrank {

struct FaqEntry {
    std::string id;
    std::string question;
    std::string answer;
    std::string source;  // FAQ-set identifier, e.g. a municipality

    bool operator==(const FaqEntry&) const = default;
};

/// An immutable, validated collection of QA pairs with unique ids.
class FaqCorpus {
public:
    FaqCorpus() = default;

    /// Validates ids and texts; throws ValidationError on violation.
    /// `source` defaults to the entries' common source tag (empty when mixed).
    explicit FaqCorpus(std::vector<FaqEntry> entries, std::optional<std::string> source = std::nullopt);

    const std::vector<FaqEntry>& entries() const noexcept { return entries_; }
    const std::string& source() const noexcept { return source_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const FaqEntry* find(std::string_view id) const;
    const FaqEntry& at(std::string_view id) const;  // throws ValidationError for unknown ids

private:
    std::vector<FaqEntry> entries_;
    std::string source_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Parses FAQ JSONL. Blank lines are skipped; everything else must be an
/// object with string fields id/question/answer/source.
FaqCorpus parse_faq_corpus(std::istream& in);
FaqCorpus load_faq_corpus(const std::filesystem::path& path);

enum class Grade { A, B, C, D };

char grade_letter(Grade g);
Grade parse_grade(std::string_view letter);  // throws ValidationError outside {A,B,C,D}

using Qrels = std::map<std::string, Grade>;

struct QueryRecord {
    std::string qid;
    std::string text;
    Qrels judgments;

    bool operator==(const QueryRecord&) const = default;
};

std::vector<QueryRecord> parse_query_set(std::istream& in);
std::vector<QueryRecord> load_query_set(const std::filesystem::path& path);

/// Throws ValidationError naming the first judged id that is not in `corpus`.
void validate_judgments(const std::vector<QueryRecord>& queries, const FaqCorpus& corpus);

struct RunEntry {
    std::string qid;
    std::string faq_id;
    std::size_t rank = 0;
    double score = 0.0;
    std::string tag;

    bool operator==(const RunEntry&) const = default;
};

/// Ranks per qid must run 1..n in file order and scores must not increase
/// with rank. Fields may not contain whitespace; scores must be finite.
void validate_run(const std::vector<RunEntry>& run);

/// Six-column ranked-run format: `<qid> Q0 <faq_id> <rank> <score> <tag>`.
/// Scores are written in shortest round-trip form.
void write_run(const std::vector<RunEntry>& run, std::ostream& out);
void write_run(const std::vector<RunEntry>& run, const std::filesystem::path& path);
std::vector<RunEntry> read_run(std::istream& in);
std::vector<RunEntry> read_run(const std::filesystem::path& path);

/// Formats a double so that parsing it back yields the identical value.
std::string format_score(double value);

}  // namespace faqrank
