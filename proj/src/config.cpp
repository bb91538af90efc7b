#include "faqrank/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "faqrank/error.hpp"

namespace faqrank {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Keys per section, in dump order. Top-level string keys live under "".
const std::vector<std::pair<std::string, std::vector<std::string>>>& schema() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> s{
        {"", {"corpus", "stopwords", "index"}},
        {"bm25", {"k", "b"}},
        {"normalization", {"k1", "k2"}},
        {"fusion", {"alpha", "t", "pool_size", "pool_mode"}},
        {"scorer", {"kind", "url", "timeout_ms", "max_batch", "retries", "backoff_ms", "max_in_flight"}},
        {"service", {"bind", "port"}},
    };
    return s;
}

json alpha_to_json(double alpha) {
    if (std::isinf(alpha)) return alpha > 0 ? "inf" : "-inf";
    return alpha;
}

template <typename Json>
double alpha_from_json(const Json& v) {
    if (v.is_string()) {
        auto s = v.template get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ConfigError("fusion.alpha must be a number, \"inf\" or \"-inf\"");
    }
    if (!v.is_number()) throw ConfigError("fusion.alpha must be a number");
    return v.template get<double>();
}

template <typename T, typename Json>
T get_as(const Json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(key + " must be a string");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
            if constexpr (std::is_unsigned_v<T>)
                if (v.template get<long long>() < 0) throw ConfigError(key + " must be non-negative");
        } else {
            if (!v.is_number()) throw ConfigError(key + " must be a number");
        }
        return v.template get<T>();
    } catch (const nlohmann::detail::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

}  // namespace

RemoteScorerConfig ScorerSettings::remote() const {
    RemoteScorerConfig c;
    c.url = url;
    c.timeout = std::chrono::milliseconds(timeout_ms);
    c.max_batch = max_batch;
    c.attempts = retries + 1;
    c.initial_backoff = std::chrono::milliseconds(backoff_ms);
    c.max_in_flight = max_in_flight;
    return c;
}

void AppConfig::validate() const {
    try {
        bm25.validate();
        normalization.validate();
        fusion.validate();
        if (scorer.kind != "builtin" && scorer.kind != "remote")
            throw ConfigError("scorer.kind must be builtin or remote");
        if (scorer.kind == "remote") scorer.remote().validate();
        if (service.port < 0 || service.port > 65535) throw ConfigError("service.port must lie in [0, 65535]");
        if (service.bind.empty()) throw ConfigError("service.bind must not be empty");
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

ordered_json config_to_json(const AppConfig& c) {
    ordered_json j;
    j["corpus"] = c.corpus;
    j["stopwords"] = c.stopwords;
    j["index"] = c.index;
    j["bm25"] = {{"k", c.bm25.k}, {"b", c.bm25.b}};
    j["normalization"] = {{"k1", c.normalization.k1}, {"k2", c.normalization.k2}};
    j["fusion"] = {{"alpha", alpha_to_json(c.fusion.alpha)},
                   {"t", c.fusion.t},
                   {"pool_size", c.fusion.pool_size},
                   {"pool_mode", to_string(c.fusion.pool_mode)}};
    j["scorer"] = {{"kind", c.scorer.kind},       {"url", c.scorer.url},
                   {"timeout_ms", c.scorer.timeout_ms}, {"max_batch", c.scorer.max_batch},
                   {"retries", c.scorer.retries}, {"backoff_ms", c.scorer.backoff_ms},
                   {"max_in_flight", c.scorer.max_in_flight}};
    j["service"] = {{"bind", c.service.bind}, {"port", c.service.port}};
    return j;
}

namespace {

template <typename Json>
AppConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    AppConfig c;
    for (const auto& [key, value] : j.items()) {
        const auto& sections = schema();
        bool top = std::find(sections[0].second.begin(), sections[0].second.end(), key) != sections[0].second.end();
        if (top) {
            auto s = get_as<std::string>(value, key);
            if (key == "corpus") c.corpus = s;
            else if (key == "stopwords") c.stopwords = s;
            else c.index = s;
            continue;
        }
        auto sec = std::find_if(sections.begin() + 1, sections.end(), [&](const auto& p) { return p.first == key; });
        if (sec == sections.end()) throw ConfigError("unknown configuration key \"" + key + "\"");
        if (!value.is_object()) throw ConfigError("\"" + key + "\" must be an object");
        for (const auto& [sub, v] : value.items()) {
            const auto& known = sec->second;
            if (std::find(known.begin(), known.end(), sub) == known.end())
                throw ConfigError("unknown configuration key \"" + key + "." + sub + "\"");
            const std::string name = key + "." + sub;
            if (name == "bm25.k") c.bm25.k = get_as<double>(v, name);
            else if (name == "bm25.b") c.bm25.b = get_as<double>(v, name);
            else if (name == "normalization.k1") c.normalization.k1 = get_as<double>(v, name);
            else if (name == "normalization.k2") c.normalization.k2 = get_as<double>(v, name);
            else if (name == "fusion.alpha") c.fusion.alpha = alpha_from_json(v);
            else if (name == "fusion.t") c.fusion.t = get_as<double>(v, name);
            else if (name == "fusion.pool_size") c.fusion.pool_size = get_as<std::size_t>(v, name);
            else if (name == "fusion.pool_mode") {
                try {
                    c.fusion.pool_mode = parse_pool_mode(get_as<std::string>(v, name));
                } catch (const ValidationError& e) {
                    throw ConfigError(e.what());
                }
            }
            else if (name == "scorer.kind") c.scorer.kind = get_as<std::string>(v, name);
            else if (name == "scorer.url") c.scorer.url = get_as<std::string>(v, name);
            else if (name == "scorer.timeout_ms") c.scorer.timeout_ms = get_as<long>(v, name);
            else if (name == "scorer.max_batch") c.scorer.max_batch = get_as<std::size_t>(v, name);
            else if (name == "scorer.retries") c.scorer.retries = get_as<std::size_t>(v, name);
            else if (name == "scorer.backoff_ms") c.scorer.backoff_ms = get_as<long>(v, name);
            else if (name == "scorer.max_in_flight") c.scorer.max_in_flight = get_as<std::size_t>(v, name);
            else if (name == "service.bind") c.service.bind = get_as<std::string>(v, name);
            else if (name == "service.port") c.service.port = get_as<int>(v, name);
        }
    }
    return c;
}

}  // namespace

AppConfig config_from_json(const json& j) {
    AppConfig c = parse_config(j);
    c.validate();
    return c;
}

AppConfig config_from_json(const ordered_json& j) {
    AppConfig c = parse_config(j);
    c.validate();
    return c;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void set_config_value(AppConfig& config, const std::string& key, const std::string& value) {
    ordered_json j = config_to_json(config);
    auto dot = key.find('.');
    ordered_json* slot = nullptr;
    if (dot == std::string::npos) {
        if (j.contains(key) && j[key].is_string()) slot = &j[key];
    } else {
        auto section = key.substr(0, dot), sub = key.substr(dot + 1);
        if (j.contains(section) && j[section].is_object() && j[section].contains(sub)) slot = &j[section][sub];
    }
    if (!slot) throw ConfigError("unknown configuration key \"" + key + "\"");

    if (slot->is_string() && key != "fusion.alpha") {
        *slot = value;
    } else {
        // Numbers (and alpha's inf spellings) are parsed as JSON scalars.
        ordered_json parsed;
        try {
            parsed = ordered_json::parse(value);
        } catch (const ordered_json::parse_error&) {
            if (key == "fusion.alpha") parsed = value;
            else throw ConfigError(key + ": cannot parse \"" + value + "\" as a number");
        }
        *slot = parsed;
    }
    // Not validated here: overrides may pass through intermediate states
    // (e.g. scorer.kind before scorer.url). Callers validate the result.
    config = parse_config(j);
}

void apply_env_overrides(AppConfig& config,
                         const std::function<std::optional<std::string>(const std::string&)>& getenv) {
    for (const auto& [section, keys] : schema()) {
        for (const auto& key : keys) {
            std::string dotted = section.empty() ? key : section + "." + key;
            std::string env = "FAQRANK_" + (section.empty() ? key : section + "_" + key);
            for (auto& ch : env) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            if (auto v = getenv(env)) set_config_value(config, dotted, *v);
        }
    }
}

void apply_env_overrides(AppConfig& config) {
    apply_env_overrides(config, [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        return v ? std::optional<std::string>(v) : std::nullopt;
    });
}

}  // namespace faqrank
