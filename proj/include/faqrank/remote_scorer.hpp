#pragma once

/// HTTP client for an external relevance model.
///
/// Wire protocol: POST <base>/v1/score with
///   {"pairs": [{"query": "...", "answer": "..."}, ...]}
/// answered by
///   {"scores": [0.93, ...]}
/// where scores match the pairs in length and order and lie in [0, 1].

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>

#include "faqrank/relevance.hpp"

namespace faqrank {

struct RemoteScorerConfig {
    std::string url;  // e.g. http://127.0.0.1:8081
    std::chrono::milliseconds timeout{5000};
    std::size_t max_batch = 64;
    std::size_t attempts = 3;  // total tries per request
    std::chrono::milliseconds initial_backoff{100};  // doubled after each failed try
    std::size_t max_in_flight = 4;

    void validate() const;
};

class RemoteScorer final : public RelevanceScorer {
public:
    explicit RemoteScorer(RemoteScorerConfig config);

    /// Splits the input into requests of at most max_batch pairs. Throws
    /// TransportError when the server cannot be reached after all attempts
    /// and ProtocolError when a response violates the wire contract.
    std::vector<double> score_batch(std::span<const TextPair> pairs) const override;
    std::string name() const override { return "remote:" + config_.url; }
    bool reachable() const override;

    const RemoteScorerConfig& config() const noexcept { return config_; }

private:
    std::vector<double> post_chunk(std::span<const TextPair> pairs) const;

    RemoteScorerConfig config_;
    std::string host_;  // scheme://host:port
    std::string path_prefix_;

    // Bounds concurrent requests across all callers.
    mutable std::mutex mutex_;
    mutable std::condition_variable slot_freed_;
    mutable std::size_t in_flight_ = 0;
};

/// Parses a /v1/score response body for `expected` pairs; throws ProtocolError.
std::vector<double> parse_score_response(const std::string& body, std::size_t expected);
std::string make_score_request(std::span<const TextPair> pairs);

}  // namespace faqrank
