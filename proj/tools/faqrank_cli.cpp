// faqrank command-line front end.
//
// Exit codes: 0 success, 1 invalid input data, 2 bad configuration or usage,
// 3 I/O failure, 4 relevance scorer failure during evaluation.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "faqrank/config.hpp"
#include "faqrank/corpus.hpp"
#include "faqrank/error.hpp"
#include "faqrank/evalkit.hpp"
#include "faqrank/relevance.hpp"
#include "faqrank/service.hpp"

namespace fs = std::filesystem;
using namespace faqrank;

namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitScorer = 4;

int fail(int code, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = {{"code", kind}, {"exit", code}, {"message", message}};
    std::cerr << j.dump() << std::endl;
    return code;
}

struct Overrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> values;

    void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
               flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help)
            ->trigger_on_parse();
    }

    AppConfig resolve() const {
        AppConfig config = config_path.empty() ? AppConfig{} : load_config(config_path);
        apply_env_overrides(config);
        for (const auto& [key, value] : values) set_config_value(config, key, value);
        config.validate();
        return config;
    }
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void print_results_table(const std::string& query, const FusedSearchResult& result, const FaqCorpus& corpus) {
    std::cout << "query: " << query << '\n';
    if (result.degraded) std::cout << "degraded: " << result.degraded_reason << '\n';
    std::cout << std::left << std::setw(5) << "rank" << std::setw(16) << "faq_id" << std::setw(14) << "group"
              << std::right << std::setw(11) << "similarity" << std::setw(11) << "relevance" << std::setw(11)
              << "fused" << "  question\n";
    std::size_t rank = 0;
    for (const auto& c : result.candidates) {
        std::cout << std::left << std::setw(5) << ++rank << std::setw(16) << c.faq_id << std::setw(14)
                  << to_string(c.group) << std::right << std::fixed << std::setprecision(4) << std::setw(11)
                  << c.similarity << std::setw(11) << c.relevance << std::setw(11) << c.fused_score << "  "
                  << corpus.at(c.faq_id).question << '\n';
    }
    std::cout.unsetf(std::ios::floatfield);
}

std::vector<double> parse_edges(const std::string& text) {
    std::vector<double> edges;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            edges.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("invalid bucket edge \"" + item + "\"");
        }
    }
    return edges;
}

std::vector<ParaphraseTriple> load_triples(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<ParaphraseTriple> triples;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            triples.push_back({j.at("query").get<std::string>(), j.at("question").get<std::string>(),
                               j.at("answer").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), n);
        }
    }
    return triples;
}

HttpService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"faqrank: hybrid lexical + relevance FAQ retrieval"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides overrides;
    app.add_option("-c,--config", overrides.config_path, "JSON configuration file");
    overrides.add(app, "--corpus", "corpus", "FAQ corpus JSONL");
    overrides.add(app, "--stopwords", "stopwords", "stopword list (one token per line)");
    overrides.add(app, "--index", "index", "index snapshot to load instead of building");
    overrides.add(app, "--bm25-k", "bm25.k", "BM25 term-frequency saturation");
    overrides.add(app, "--bm25-b", "bm25.b", "BM25 length normalization");
    overrides.add(app, "--k1", "normalization.k1", "content-word coefficient");
    overrides.add(app, "--k2", "normalization.k2", "dependency-relation coefficient");
    overrides.add(app, "--alpha", "fusion.alpha", "similarity threshold for the high-lexical group");
    overrides.add(app, "--t", "fusion.t", "similarity weight in the fused score");
    overrides.add(app, "--pool-size", "fusion.pool_size", "candidates taken from each leg");
    overrides.add(app, "--pool-mode", "fusion.pool_mode", "union | bert-only");
    overrides.add(app, "--scorer", "scorer.kind", "builtin | remote");
    overrides.add(app, "--scorer-url", "scorer.url", "relevance model server base URL");
    app.add_option_function<std::vector<std::string>>(
        "--set",
        [&](const std::vector<std::string>& kvs) {
            for (const auto& kv : kvs) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + kv);
                overrides.values.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
        },
        "override any configuration key, e.g. --set scorer.timeout_ms=2000");

    auto* dump_cmd = app.add_subcommand("dump-config", "print the effective configuration as JSON");

    auto* index_cmd = app.add_subcommand("index", "build an index snapshot from the corpus");
    std::string index_out;
    index_cmd->add_option("-o,--out", index_out, "snapshot path")->required();

    auto* search_cmd = app.add_subcommand("search", "rank FAQ entries for one query");
    std::string query;
    std::size_t top = 10;
    bool as_json = false;
    search_cmd->add_option("-q,--query", query, "query text")->required();
    search_cmd->add_option("--top", top, "number of results")->check(CLI::PositiveNumber);
    search_cmd->add_flag("--json", as_json, "print the same JSON document as POST /v1/search");

    auto* eval_cmd = app.add_subcommand("evaluate", "produce runs and metrics for a judged query set");
    std::string queries_path, out_dir = ".";
    std::vector<std::string> methods{"lexical", "relevance", "fused"};
    std::size_t depth = 10;
    eval_cmd->add_option("--queries", queries_path, "query JSONL with judgments")->required();
    eval_cmd->add_option("--method", methods, "lexical, relevance and/or fused")->delimiter(',');
    eval_cmd->add_option("--depth", depth, "ranked results kept per query")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--out-dir", out_dir, "directory for <method>.run and <method>.report.json");

    auto* gen_cmd = app.add_subcommand("gen-training", "write negative-sampled training pairs");
    std::vector<std::string> extra_corpora;
    std::size_t neg_ratio = kDefaultNegativeRatio;
    std::uint64_t seed = 1;
    std::string pool = "pooled", gen_out, triples_path;
    gen_cmd->add_option("--pool-corpus", extra_corpora, "additional FAQ corpora to pool with --corpus");
    gen_cmd->add_option("--neg-ratio", neg_ratio, "negatives per positive")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", seed, "sampling seed");
    gen_cmd->add_option("--negatives-from", pool, "pooled | same-source")
        ->check(CLI::IsMember({"pooled", "same-source"}));
    gen_cmd->add_option("--triples", triples_path, "paraphrase (query, question, answer) JSONL to add as positives");
    gen_cmd->add_option("-o,--out", gen_out, "training JSONL path")->required();

    auto* split_cmd = app.add_subcommand("split", "k-fold train/dev/test splits of a query set");
    std::size_t folds = 5;
    double train_ratio = 0.6, dev_ratio = 0.2, test_ratio = 0.2;
    std::string split_out;
    std::uint64_t split_seed = 0;
    split_cmd->add_option("--queries", queries_path, "query JSONL")->required();
    split_cmd->add_option("--folds", folds, "number of folds");
    split_cmd->add_option("--train", train_ratio);
    split_cmd->add_option("--dev", dev_ratio);
    split_cmd->add_option("--test", test_ratio);
    split_cmd->add_option("--seed", split_seed, "shuffle seed");
    split_cmd->add_option("-o,--out", split_out, "output JSON (stdout when omitted)");

    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP search service");
    overrides.add(*serve_cmd, "--bind", "service.bind", "listen address");
    overrides.add(*serve_cmd, "--port", "service.port", "listen port (0 picks a free one)");

    auto* bucket_cmd = app.add_subcommand("bucket-report", "top-1 correctness counts by score bucket");
    std::string run_path, edges_text = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", bucket_out;
    bucket_cmd->add_option("--run", run_path, "run file")->required();
    bucket_cmd->add_option("--queries", queries_path, "query JSONL with judgments")->required();
    bucket_cmd->add_option("--edges", edges_text, "comma-separated ascending bucket edges");
    bucket_cmd->add_option("-o,--out", bucket_out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kExitConfig, "usage", e.what());
    } catch (const ConfigError& e) {
        return fail(kExitConfig, "config", e.what());
    }

    try {
        const AppConfig config = overrides.resolve();

        if (*dump_cmd) {
            std::cout << config_to_json(config).dump(2) << '\n';
        } else if (*index_cmd) {
            if (config.corpus.empty()) throw ConfigError("no corpus configured (set corpus or --corpus)");
            auto corpus = load_faq_corpus(config.corpus);
            auto index = LexicalIndex::build(corpus, make_analyzer(config), config.bm25);
            index.save(fs::path(index_out));
            nlohmann::ordered_json j{{"documents", index.doc_count()},
                                     {"terms", index.term_count()},
                                     {"avg_doc_length", index.avg_doc_length()},
                                     {"snapshot", index_out}};
            std::cout << j.dump() << '\n';
        } else if (*search_cmd) {
            auto service = SearchService::from_config(config);
            auto result = service->search(query, top);
            if (as_json)
                std::cout << search_response_json(query, result, service->corpus()).dump() << '\n';
            else
                print_results_table(query, result, service->corpus());
        } else if (*eval_cmd) {
            auto service = SearchService::from_config(config);
            auto queries = load_query_set(queries_path);
            validate_judgments(queries, service->corpus());
            fs::create_directories(out_dir);
            for (const auto& name : methods) {
                const Method method = parse_method(name);
                std::vector<RunEntry> run;
                try {
                    run = service->run(queries, method, depth);
                } catch (const TransportError& e) {
                    return fail(kExitScorer, "scorer", e.what());
                } catch (const ProtocolError& e) {
                    return fail(kExitScorer, "scorer", e.what());
                }
                write_run(run, fs::path(out_dir) / (name + ".run"));
                auto report = evaluate_run(run, queries);
                auto out = open_out(fs::path(out_dir) / (name + ".report.json"));
                write_report_json(report, out);
                std::cout << name << '\n';
                write_report_table(report, std::cout);
            }
        } else if (*gen_cmd) {
            if (config.corpus.empty()) throw ConfigError("no corpus configured (set corpus or --corpus)");
            std::vector<FaqCorpus> corpora;
            corpora.push_back(load_faq_corpus(config.corpus));
            for (const auto& p : extra_corpora) corpora.push_back(load_faq_corpus(p));
            auto examples = generate_training_pairs(
                corpora, neg_ratio, seed, pool == "pooled" ? NegativePool::Pooled : NegativePool::SameSource);
            if (!triples_path.empty()) {
                auto triples = load_triples(triples_path);
                auto positives = split_paraphrase_triples(triples);
                examples.insert(examples.end(), positives.begin(), positives.end());
            }
            write_training_jsonl(examples, fs::path(gen_out));
            std::size_t positives = 0;
            for (const auto& ex : examples) positives += ex.label == 1;
            nlohmann::ordered_json j{{"examples", examples.size()},
                                     {"positives", positives},
                                     {"negatives", examples.size() - positives},
                                     {"out", gen_out}};
            std::cout << j.dump() << '\n';
        } else if (*split_cmd) {
            auto queries = load_query_set(queries_path);
            std::vector<std::string> ids;
            for (const auto& q : queries) ids.push_back(q.qid);
            auto splits = kfold_split(ids, folds, {train_ratio, dev_ratio, test_ratio}, split_seed);
            nlohmann::ordered_json j;
            j["folds"] = nlohmann::ordered_json::array();
            for (const auto& s : splits) j["folds"].push_back({{"train", s.train}, {"dev", s.dev}, {"test", s.test}});
            if (split_out.empty()) {
                std::cout << j.dump(2) << '\n';
            } else {
                auto out = open_out(split_out);
                out << j.dump(2) << '\n';
            }
        } else if (*serve_cmd) {
            HttpService http;
            int port = http.bind(config.service.bind, config.service.port);
            if (port < 0) throw IoError("cannot bind " + config.service.bind + ":" + std::to_string(config.service.port));
            g_service = &http;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            // Accept requests (answering 503) while the index is built.
            std::thread loader([&] {
                try {
                    http.set_engine(SearchService::from_config(config));
                    std::cerr << "index ready" << std::endl;
                } catch (const std::exception& e) {
                    fail(kExitData, "startup", e.what());
                    http.stop();
                }
            });
            std::cout << nlohmann::ordered_json{{"listening", config.service.bind}, {"port", port}}.dump() << std::endl;
            http.listen_after_bind();
            loader.join();
            g_service = nullptr;
        } else if (*bucket_cmd) {
            auto run = read_run(run_path);
            auto queries = load_query_set(queries_path);
            auto buckets = score_bucket_report(run, queries, parse_edges(edges_text));
            if (bucket_out.empty()) {
                write_bucket_csv(buckets, std::cout);
            } else {
                auto out = open_out(bucket_out);
                write_bucket_csv(buckets, out);
            }
        }
    } catch (const ConfigError& e) {
        return fail(kExitConfig, "config", e.what());
    } catch (const IoError& e) {
        return fail(kExitIo, "io", e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(kExitIo, "io", e.what());
    } catch (const TransportError& e) {
        return fail(kExitScorer, "scorer", e.what());
    } catch (const Error& e) {
        return fail(kExitData, "data", e.what());
    } catch (const std::exception& e) {
        return fail(kExitData, "internal", e.what());
    }
    return 0;
}
