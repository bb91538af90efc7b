#include "faqrank/remote_scorer.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "faqrank/error.hpp"

namespace faqrank {

void RemoteScorerConfig::validate() const {
    if (url.rfind("http://", 0) != 0) throw ValidationError("scorer.url must start with http://");
    if (timeout.count() <= 0) throw ValidationError("scorer.timeout_ms must be positive");
    if (max_batch == 0) throw ValidationError("scorer.max_batch must be positive");
    if (attempts == 0) throw ValidationError("scorer.attempts must be positive");
    if (initial_backoff.count() < 0) throw ValidationError("scorer.backoff_ms must be >= 0");
    if (max_in_flight == 0) throw ValidationError("scorer.max_in_flight must be positive");
}

RemoteScorer::RemoteScorer(RemoteScorerConfig config) : config_(std::move(config)) {
    config_.validate();
    auto authority = config_.url.find('/', std::string_view("http://").size());
    if (authority == std::string::npos) {
        host_ = config_.url;
    } else {
        host_ = config_.url.substr(0, authority);
        path_prefix_ = config_.url.substr(authority);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

std::string make_score_request(std::span<const TextPair> pairs) {
    nlohmann::ordered_json body;
    auto& arr = body["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : pairs) arr.push_back({{"query", p.query}, {"answer", p.answer}});
    return body.dump();
}

std::vector<double> parse_score_response(const std::string& body, std::size_t expected) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError(std::string("score response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array())
        throw ProtocolError("score response lacks a \"scores\" array");
    const auto& arr = j["scores"];
    if (arr.size() != expected)
        throw ProtocolError("score response has " + std::to_string(arr.size()) + " scores for " +
                            std::to_string(expected) + " pairs");
    std::vector<double> scores;
    scores.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw ProtocolError("score response contains a non-numeric score");
        double s = v.get<double>();
        if (!(s >= 0.0 && s <= 1.0)) throw ProtocolError("score " + v.dump() + " lies outside [0, 1]");
        scores.push_back(s);
    }
    return scores;
}

std::vector<double> RemoteScorer::post_chunk(std::span<const TextPair> pairs) const {
    {
        std::unique_lock lock(mutex_);
        slot_freed_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
        ++in_flight_;
    }
    struct Release {
        const RemoteScorer* self;
        ~Release() {
            {
                std::lock_guard lock(self->mutex_);
                --self->in_flight_;
            }
            self->slot_freed_.notify_one();
        }
    } release{this};

    const auto body = make_score_request(pairs);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    auto backoff = config_.initial_backoff;
    std::string last_error;
    for (std::size_t attempt = 1; attempt <= config_.attempts; ++attempt) {
        httplib::Client client(host_);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto res = client.Post(path_prefix_ + "/v1/score", body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
        } else if (res->status == 200) {
            return parse_score_response(res->body, pairs.size());
        } else if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            throw ProtocolError("scorer rejected request with HTTP " + std::to_string(res->status));
        }
        if (attempt < config_.attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw TransportError("scorer " + config_.url + " failed after " + std::to_string(config_.attempts) +
                         " attempt(s): " + last_error);
}

std::vector<double> RemoteScorer::score_batch(std::span<const TextPair> pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (std::size_t start = 0; start < pairs.size(); start += config_.max_batch) {
        auto chunk = pairs.subspan(start, std::min(config_.max_batch, pairs.size() - start));
        auto scores = post_chunk(chunk);
        out.insert(out.end(), scores.begin(), scores.end());
    }
    return out;
}

bool RemoteScorer::reachable() const {
    httplib::Client client(host_);
    client.set_connection_timeout(1, 0);
    client.set_read_timeout(1, 0);
    auto res = client.Get(path_prefix_ + "/health");
    return res && res->status == 200;
}

}  // namespace faqrank
