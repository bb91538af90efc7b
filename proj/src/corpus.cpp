#include "faqrank/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "faqrank/error.hpp"

namespace faqrank {

namespace {

using nlohmann::json;

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), is_space);
}

bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(), is_space);
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing field \"") + key + "\"", line);
    if (!it->is_string()) throw ParseError(std::string("field \"") + key + "\" must be a string", line);
    return it->get<std::string>();
}

json parse_object_line(const std::string& text, std::size_t line) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line);
    return obj;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

}  // namespace

FaqCorpus::FaqCorpus(std::vector<FaqEntry> entries, std::optional<std::string> source)
    : entries_(std::move(entries)) {
    by_id_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.id.empty()) throw ValidationError("entry " + std::to_string(i + 1) + ": empty id");
        if (has_space(e.id)) throw ValidationError("entry id \"" + e.id + "\" contains whitespace");
        if (blank(e.question)) throw ValidationError("entry \"" + e.id + "\": empty question");
        if (blank(e.answer)) throw ValidationError("entry \"" + e.id + "\": empty answer");
        if (!by_id_.emplace(e.id, i).second) throw ValidationError("duplicate id \"" + e.id + "\"");
    }
    if (source) {
        source_ = std::move(*source);
    } else if (!entries_.empty()) {
        const auto& first = entries_.front().source;
        bool uniform = std::all_of(entries_.begin(), entries_.end(),
                                   [&](const FaqEntry& e) { return e.source == first; });
        if (uniform) source_ = first;
    }
}

const FaqEntry* FaqCorpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const FaqEntry& FaqCorpus::at(std::string_view id) const {
    if (const auto* e = find(id)) return *e;
    throw ValidationError("unknown FAQ id \"" + std::string(id) + "\"");
}

FaqCorpus parse_faq_corpus(std::istream& in) {
    std::vector<FaqEntry> entries;
    std::unordered_set<std::string> seen;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        json obj = parse_object_line(text, line);
        FaqEntry e{required_string(obj, "id", line), required_string(obj, "question", line),
                   required_string(obj, "answer", line), required_string(obj, "source", line)};
        // Report duplicates with their line; the constructor re-checks the rest.
        if (!seen.insert(e.id).second)
            throw ValidationError("line " + std::to_string(line) + ": duplicate id \"" + e.id + "\"");
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ValidationError("empty corpus: no FAQ entries found");
    return FaqCorpus(std::move(entries));
}

FaqCorpus load_faq_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_faq_corpus(in);
}

char grade_letter(Grade g) {
    switch (g) {
        case Grade::A: return 'A';
        case Grade::B: return 'B';
        case Grade::C: return 'C';
        case Grade::D: return 'D';
    }
    return '?';
}

Grade parse_grade(std::string_view letter) {
    if (letter == "A") return Grade::A;
    if (letter == "B") return Grade::B;
    if (letter == "C") return Grade::C;
    if (letter == "D") return Grade::D;
    throw ValidationError("unknown grade \"" + std::string(letter) + "\" (expected A, B, C or D)");
}

std::vector<QueryRecord> parse_query_set(std::istream& in) {
    std::vector<QueryRecord> records;
    std::unordered_set<std::string> seen;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        json obj = parse_object_line(text, line);
        QueryRecord rec{required_string(obj, "qid", line), required_string(obj, "text", line), {}};
        if (rec.qid.empty() || has_space(rec.qid))
            throw ValidationError("line " + std::to_string(line) + ": qid must be non-empty without whitespace");
        auto judgments = obj.find("judgments");
        if (judgments != obj.end()) {
            if (!judgments->is_object()) throw ParseError("\"judgments\" must be an object", line);
            for (const auto& [id, grade] : judgments->items()) {
                if (!grade.is_string()) throw ParseError("grade for \"" + id + "\" must be a string", line);
                try {
                    rec.judgments.emplace(id, parse_grade(grade.get<std::string>()));
                } catch (const ValidationError& e) {
                    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
                }
            }
        }
        if (!seen.insert(rec.qid).second)
            throw ValidationError("line " + std::to_string(line) + ": duplicate qid \"" + rec.qid + "\"");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<QueryRecord> load_query_set(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_query_set(in);
}

void validate_judgments(const std::vector<QueryRecord>& queries, const FaqCorpus& corpus) {
    for (const auto& q : queries)
        for (const auto& [id, grade] : q.judgments)
            if (!corpus.find(id))
                throw ValidationError("query \"" + q.qid + "\" judges unknown FAQ id \"" + id + "\"");
}

std::string format_score(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw ValidationError("cannot format score");
    return std::string(buf, end);
}

void validate_run(const std::vector<RunEntry>& run) {
    struct Last {
        std::size_t rank;
        double score;
    };
    std::unordered_map<std::string, Last> last;
    std::unordered_map<std::string, std::unordered_set<std::string>> ids;
    for (const auto& e : run) {
        if (e.qid.empty() || has_space(e.qid)) throw ValidationError("run: invalid qid \"" + e.qid + "\"");
        if (e.faq_id.empty() || has_space(e.faq_id))
            throw ValidationError("run: invalid faq id \"" + e.faq_id + "\"");
        if (e.tag.empty() || has_space(e.tag)) throw ValidationError("run: invalid tag \"" + e.tag + "\"");
        if (!std::isfinite(e.score)) throw ValidationError("run: non-finite score for qid " + e.qid);
        auto it = last.find(e.qid);
        std::size_t expected = it == last.end() ? 1 : it->second.rank + 1;
        if (e.rank != expected)
            throw ValidationError("run: qid " + e.qid + " has rank " + std::to_string(e.rank) + " where " +
                                  std::to_string(expected) + " was expected");
        if (it != last.end() && e.score > it->second.score)
            throw ValidationError("run: qid " + e.qid + " score increases at rank " + std::to_string(e.rank));
        if (!ids[e.qid].insert(e.faq_id).second)
            throw ValidationError("run: qid " + e.qid + " lists \"" + e.faq_id + "\" twice");
        last[e.qid] = {e.rank, e.score};
    }
}

void write_run(const std::vector<RunEntry>& run, std::ostream& out) {
    validate_run(run);
    for (const auto& e : run)
        out << e.qid << " Q0 " << e.faq_id << ' ' << e.rank << ' ' << format_score(e.score) << ' ' << e.tag
            << '\n';
    if (!out) throw IoError("failed writing run");
}

void write_run(const std::vector<RunEntry>& run, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_run(run, out);
}

std::vector<RunEntry> read_run(std::istream& in) {
    std::vector<RunEntry> run;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        std::istringstream fields(text);
        std::string qid, q0, faq_id, rank_s, score_s, tag, extra;
        if (!(fields >> qid >> q0 >> faq_id >> rank_s >> score_s >> tag) || (fields >> extra))
            throw ParseError("expected 6 whitespace-separated columns", line);
        if (q0 != "Q0") throw ParseError("second column must be Q0", line);
        RunEntry e{qid, faq_id, 0, 0.0, tag};
        auto r = std::from_chars(rank_s.data(), rank_s.data() + rank_s.size(), e.rank);
        if (r.ec != std::errc{} || r.ptr != rank_s.data() + rank_s.size() || e.rank == 0)
            throw ParseError("invalid rank \"" + rank_s + "\"", line);
        auto s = std::from_chars(score_s.data(), score_s.data() + score_s.size(), e.score);
        if (s.ec != std::errc{} || s.ptr != score_s.data() + score_s.size())
            throw ParseError("invalid score \"" + score_s + "\"", line);
        run.push_back(std::move(e));
    }
    validate_run(run);
    return run;
}

std::vector<RunEntry> read_run(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_run(in);
}

}  // namespace faqrank
