#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

namespace dsipa {

struct CompletionRequest {
    std::string model;
    std::optional<std::string> system;
    std::string user;
    double temperature = 0.7;
    double top_p = 0.9;
    std::optional<int> max_output_tokens;
};

// Throws std::invalid_argument when temperature is outside [0, 2] or top_p
// outside (0, 1].
void validate_request(const CompletionRequest& req);

struct CompletionResponse {
    std::string text;
    bool cached = false;
    std::int64_t latency_ms = 0;
};

struct GatewayConfig {
    std::string endpoint;          // base URL, e.g. http://127.0.0.1:8080
    std::string api_key;           // sent as a bearer token when non-empty
    int max_concurrent = 4;
    int requests_per_minute = 60;
    int max_retries = 3;           // retries after the initial attempt
    int backoff_base_ms = 1000;    // 1s, 2s, 4s by default
    int read_timeout_s = 120;
};

std::string api_key_from_env();

std::string sha256_hex(const std::string& data);

// Hex SHA-256 of the canonical (sorted-key) serialization of the request
// fields; stable across runs and platforms.
std::string cache_key(const CompletionRequest& req);

// Chat-completion client with retry, rate limiting, a concurrent-request
// ceiling and an on-disk response cache. Safe for concurrent use.
class LlmGateway {
public:
    explicit LlmGateway(GatewayConfig config);

    // POSTs a chat completion; retries transient failures (429/5xx/timeouts)
    // up to max_retries times with exponential backoff. Throws on
    // non-transient errors, exhausted retries and empty completions.
    CompletionResponse complete(const CompletionRequest& req);

    // Consults <cache_dir>/<first2>/<digest>.json first; on a miss calls
    // complete and stores the result atomically. Corrupt entries are deleted
    // and treated as misses.
    CompletionResponse cached_complete(const CompletionRequest& req, const std::string& cache_dir);

    std::int64_t requests_made() const { return requests_made_.load(); }
    std::int64_t tokens_used() const { return tokens_used_.load(); }

    const GatewayConfig& config() const { return config_; }

private:
    void acquire_slot();
    void release_slot();
    void rate_limit_wait();

    GatewayConfig config_;
    std::atomic<std::int64_t> requests_made_{0};
    std::atomic<std::int64_t> tokens_used_{0};

    std::mutex slot_mutex_;
    std::condition_variable slot_cv_;
    int slots_in_use_ = 0;

    std::mutex bucket_mutex_;
    double bucket_tokens_ = 0.0;
    std::chrono::steady_clock::time_point bucket_refilled_;
};

}  // namespace dsipa
