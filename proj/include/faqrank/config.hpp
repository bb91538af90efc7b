#pragma once

/// Application configuration: JSON file, FAQRANK_* environment overrides and
/// dotted-key overrides (`fusion.alpha=0.5`), applied in that order.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "faqrank/error.hpp"
#include "faqrank/fusion.hpp"
#include "faqrank/lexical.hpp"
#include "faqrank/remote_scorer.hpp"

namespace faqrank {

/// Raised for any invalid configuration (unknown key, bad type, out of bounds).
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct ScorerSettings {
    std::string kind = "builtin";  // builtin | remote
    std::string url;
    long timeout_ms = 5000;
    std::size_t max_batch = 64;
    std::size_t retries = 2;
    long backoff_ms = 100;
    std::size_t max_in_flight = 4;

    RemoteScorerConfig remote() const;
    bool operator==(const ScorerSettings&) const = default;
};

struct ServiceSettings {
    std::string bind = "127.0.0.1";
    int port = 8080;
    bool operator==(const ServiceSettings&) const = default;
};

struct AppConfig {
    std::string corpus;     // FAQ JSONL
    std::string stopwords;  // empty: built-in list
    std::string index;      // optional snapshot; built from the corpus when empty
    Bm25Params bm25;
    NormalizationParams normalization;
    FusionParams fusion;
    ScorerSettings scorer;
    ServiceSettings service;

    void validate() const;  // throws ConfigError
    bool operator==(const AppConfig&) const = default;
};

nlohmann::ordered_json config_to_json(const AppConfig& config);
/// Starts from defaults; every key present must be known. Throws ConfigError.
AppConfig config_from_json(const nlohmann::json& j);
AppConfig config_from_json(const nlohmann::ordered_json& j);
AppConfig load_config(const std::filesystem::path& path);

/// Sets one dotted key ("corpus", "fusion.alpha", "scorer.url", ...) from
/// text. Checks the key and type only; call AppConfig::validate() afterwards.
void set_config_value(AppConfig& config, const std::string& key, const std::string& value);

/// Applies FAQRANK_<SECTION>_<KEY> (e.g. FAQRANK_FUSION_ALPHA) and
/// FAQRANK_<KEY> for top-level keys. `getenv` is injectable for tests.
void apply_env_overrides(AppConfig& config,
                         const std::function<std::optional<std::string>(const std::string&)>& getenv);
void apply_env_overrides(AppConfig& config);

}  // namespace faqrank
