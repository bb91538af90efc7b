#include "faqrank/analyzer.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "faqrank/error.hpp"

namespace faqrank {

namespace detail {
extern const std::string_view kBuiltinStopwords;
}

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c);
}

}  // namespace

AnalyzedText Analyzer::analyze(std::string_view text) const {
    try {
        return do_analyze(text);
    } catch (const AnalysisError&) {
        throw;
    } catch (const std::exception& e) {
        throw AnalysisError(std::string("analyzer failed: ") + e.what());
    } catch (...) {
        throw AnalysisError("analyzer failed with a non-standard exception");
    }
}

StopwordList::StopwordList(std::set<std::string, std::less<>> words) : words_(std::move(words)) {}

StopwordList StopwordList::parse(std::string_view text) {
    std::set<std::string, std::less<>> words;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        std::size_t b = 0, e = line.size();
        while (b < e && is_space(line[b])) ++b;
        while (e > b && is_space(line[e - 1])) --e;
        if (e > b) words.emplace(line.substr(b, e - b));
        pos = nl + 1;
    }
    return StopwordList(std::move(words));
}

StopwordList StopwordList::builtin() {
    static const StopwordList list = parse(detail::kBuiltinStopwords);
    return list;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open stopword list " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string StopwordList::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& w : words_) {
        for (unsigned char c : w) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= '\n';
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        std::size_t b = start, e = i;
        while (b < e && is_punct(text[b])) ++b;
        while (e > b && is_punct(text[e - 1])) --e;
        if (b == e) continue;
        std::string token(text.substr(b, e - b));
        for (auto& c : token)
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        tokens.push_back(std::move(token));
    }
    return tokens;
}

std::string DefaultAnalyzer::fingerprint() const {
    return "default/stopwords:" + stopwords_.fingerprint();
}

AnalyzedText DefaultAnalyzer::do_analyze(std::string_view text) const {
    AnalyzedText out;
    out.tokens = tokenize(text);
    for (const auto& t : out.tokens)
        if (!stopwords_.contains(t)) out.content_words.push_back(t);
    out.content_word_count = out.content_words.size();
    out.dependency_relation_count = out.content_word_count > 0 ? out.content_word_count - 1 : 0;
    return out;
}

std::shared_ptr<const Analyzer> make_default_analyzer() {
    return std::make_shared<const DefaultAnalyzer>();
}

}  // namespace faqrank
