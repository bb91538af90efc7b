#pragma once

/// Tokenization plus the two query statistics used by score normalization:
/// the content-word count and the dependency-relation count.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace faqrank {

struct AnalyzedText {
    std::vector<std::string> tokens;         // every normalized token, in order
    std::vector<std::string> content_words;  // tokens that are not stopwords, in order
    std::size_t content_word_count = 0;
    std::size_t dependency_relation_count = 0;

    bool operator==(const AnalyzedText&) const = default;
};

/// Pluggable analyzer. Implementations override do_analyze(); any exception
/// they throw reaches callers as AnalysisError.
class Analyzer {
public:
    virtual ~Analyzer() = default;

    AnalyzedText analyze(std::string_view text) const;

    /// Identifies the configuration (e.g. stopword list) so that indexes
    /// built with one analyzer are never queried with another.
    virtual std::string fingerprint() const = 0;

protected:
    virtual AnalyzedText do_analyze(std::string_view text) const = 0;
};

class StopwordList {
public:
    /// The English list shipped in data/stopwords_en.txt.
    static StopwordList builtin();
    /// One lowercase token per line; blank lines and surrounding whitespace ignored.
    static StopwordList load(const std::filesystem::path& path);
    static StopwordList parse(std::string_view text);

    explicit StopwordList(std::set<std::string, std::less<>> words);

    bool contains(std::string_view token) const { return words_.count(token) != 0; }
    std::size_t size() const noexcept { return words_.size(); }
    const std::set<std::string, std::less<>>& words() const noexcept { return words_; }

    /// FNV-1a 64 over the sorted word list, as 16 hex digits.
    std::string fingerprint() const;

private:
    std::set<std::string, std::less<>> words_;
};

/// Splits on ASCII whitespace, strips leading/trailing ASCII punctuation and
/// lowercases ASCII letters. Non-ASCII bytes pass through untouched.
std::vector<std::string> tokenize(std::string_view text);

/// Whitespace/punctuation tokenizer + stopword filter. The dependency count
/// is approximated as content_word_count - 1 (a chain over content words).
class DefaultAnalyzer final : public Analyzer {
public:
    DefaultAnalyzer() : DefaultAnalyzer(StopwordList::builtin()) {}
    explicit DefaultAnalyzer(StopwordList stopwords) : stopwords_(std::move(stopwords)) {}

    std::string fingerprint() const override;
    const StopwordList& stopwords() const noexcept { return stopwords_; }

protected:
    AnalyzedText do_analyze(std::string_view text) const override;

private:
    StopwordList stopwords_;
};

std::shared_ptr<const Analyzer> make_default_analyzer();

}  // namespace faqrank
