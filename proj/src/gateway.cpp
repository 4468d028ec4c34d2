#include "dsipa/gateway.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <openssl/evp.h>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

namespace dsipa {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json canonical_request(const CompletionRequest& req) {
    json obj;
    obj["model"] = req.model;
    obj["system"] = req.system ? json(*req.system) : json(nullptr);
    obj["user"] = req.user;
    obj["temperature"] = req.temperature;
    obj["top_p"] = req.top_p;
    obj["max_output_tokens"] = req.max_output_tokens ? json(*req.max_output_tokens) : json(nullptr);
    return obj;
}

// Splits "scheme://host:port/some/path" into the client base and the path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    const std::size_t path_start =
        endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        return {endpoint, "/v1/chat/completions"};
    }
    std::string base = endpoint.substr(0, path_start);
    std::string path = endpoint.substr(path_start);
    if (path == "/" || path.empty()) path = "/v1/chat/completions";
    return {base, path};
}

bool is_transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

std::string truncate_body(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) return body;
    return body.substr(0, kMax) + "...";
}

}  // namespace

void validate_request(const CompletionRequest& req) {
    if (req.model.empty()) throw std::invalid_argument("completion request: model is empty");
    if (req.user.empty()) throw std::invalid_argument("completion request: user content is empty");
    if (!(req.temperature >= 0.0 && req.temperature <= 2.0)) {
        throw std::invalid_argument("completion request: temperature must be in [0, 2]");
    }
    if (!(req.top_p > 0.0 && req.top_p <= 1.0)) {
        throw std::invalid_argument("completion request: top_p must be in (0, 1]");
    }
}

std::string api_key_from_env() {
    const char* key = std::getenv("DSIPA_API_KEY");
    return key ? std::string(key) : std::string();
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0f]);
    }
    return out;
}

std::string cache_key(const CompletionRequest& req) {
    return sha256_hex(canonical_request(req).dump());
}

LlmGateway::LlmGateway(GatewayConfig config) : config_(std::move(config)) {
    if (config_.max_concurrent < 1) config_.max_concurrent = 1;
    if (config_.requests_per_minute < 1) config_.requests_per_minute = 1;
    bucket_tokens_ = static_cast<double>(config_.requests_per_minute);
    bucket_refilled_ = std::chrono::steady_clock::now();
}

void LlmGateway::acquire_slot() {
    std::unique_lock lock(slot_mutex_);
    slot_cv_.wait(lock, [&] { return slots_in_use_ < config_.max_concurrent; });
    ++slots_in_use_;
}

void LlmGateway::release_slot() {
    {
        std::lock_guard lock(slot_mutex_);
        --slots_in_use_;
    }
    slot_cv_.notify_one();
}

void LlmGateway::rate_limit_wait() {
    const double per_second = static_cast<double>(config_.requests_per_minute) / 60.0;
    while (true) {
        std::chrono::milliseconds wait_for{0};
        {
            std::lock_guard lock(bucket_mutex_);
            const auto now = std::chrono::steady_clock::now();
            const double elapsed = std::chrono::duration<double>(now - bucket_refilled_).count();
            bucket_tokens_ = std::min(static_cast<double>(config_.requests_per_minute),
                                      bucket_tokens_ + elapsed * per_second);
            bucket_refilled_ = now;
            if (bucket_tokens_ >= 1.0) {
                bucket_tokens_ -= 1.0;
                return;
            }
            wait_for = std::chrono::milliseconds(
                static_cast<std::int64_t>((1.0 - bucket_tokens_) / per_second * 1000.0) + 1);
        }
        std::this_thread::sleep_for(wait_for);
    }
}

CompletionResponse LlmGateway::complete(const CompletionRequest& req) {
    validate_request(req);
    if (config_.endpoint.empty()) {
        throw std::runtime_error("gateway: no endpoint configured");
    }
    const auto [base, path] = split_endpoint(config_.endpoint);

    json payload;
    payload["model"] = req.model;
    json messages = json::array();
    if (req.system) {
        messages.push_back({{"role", "system"}, {"content", *req.system}});
    }
    messages.push_back({{"role", "user"}, {"content", req.user}});
    payload["messages"] = messages;
    payload["temperature"] = req.temperature;
    payload["top_p"] = req.top_p;
    if (req.max_output_tokens) payload["max_tokens"] = *req.max_output_tokens;
    const std::string body = payload.dump();

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    acquire_slot();
    struct SlotGuard {
        LlmGateway* gw;
        ~SlotGuard() { gw->release_slot(); }
    } guard{this};

    const int attempts = 1 + std::max(0, config_.max_retries);
    std::string last_failure;
    const auto start = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const auto backoff =
                std::chrono::milliseconds(static_cast<std::int64_t>(config_.backoff_base_ms)
                                          << (attempt - 1));
            std::this_thread::sleep_for(backoff);
        }
        rate_limit_wait();

        httplib::Client client(base);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(config_.read_timeout_s, 0);
        requests_made_.fetch_add(1);
        httplib::Result res = client.Post(path, headers, body, "application/json");

        if (!res) {
            last_failure = "connection error: " + httplib::to_string(res.error());
            continue;  // transient
        }
        if (res->status == 200) {
            json parsed;
            try {
                parsed = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw std::runtime_error(std::string("gateway: unparseable response body: ") +
                                         e.what());
            }
            std::string text;
            try {
                text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception&) {
                throw std::runtime_error("gateway: response missing choices[0].message.content");
            }
            if (text.empty()) {
                throw std::runtime_error("gateway: provider returned an empty completion");
            }
            if (parsed.contains("usage") && parsed["usage"].contains("total_tokens")) {
                tokens_used_.fetch_add(parsed["usage"]["total_tokens"].get<std::int64_t>());
            }
            CompletionResponse response;
            response.text = std::move(text);
            response.cached = false;
            response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::steady_clock::now() - start)
                                      .count();
            return response;
        }
        if (is_transient_status(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        throw std::runtime_error("gateway: HTTP " + std::to_string(res->status) + ": " +
                                 truncate_body(res->body));
    }
    throw std::runtime_error("gateway: request failed after " + std::to_string(attempts) +
                             " attempts (" + last_failure + ")");
}

CompletionResponse LlmGateway::cached_complete(const CompletionRequest& req,
                                               const std::string& cache_dir) {
    validate_request(req);
    const std::string digest = cache_key(req);
    const fs::path entry_dir = fs::path(cache_dir) / digest.substr(0, 2);
    const fs::path entry_path = entry_dir / (digest + ".json");

    if (fs::exists(entry_path)) {
        std::ifstream in(entry_path);
        json entry;
        bool ok = static_cast<bool>(in);
        if (ok) {
            try {
                in >> entry;
                ok = entry.contains("response_text") && entry["response_text"].is_string();
            } catch (const json::parse_error&) {
                ok = false;
            }
        }
        if (ok) {
            CompletionResponse response;
            response.text = entry["response_text"].get<std::string>();
            response.cached = true;
            response.latency_ms = 0;
            return response;
        }
        std::cerr << "warning: deleting corrupt cache entry " << entry_path.string() << "\n";
        std::error_code ec;
        fs::remove(entry_path, ec);
    }

    CompletionResponse response = complete(req);

    fs::create_directories(entry_dir);
    json entry;
    entry["request"] = canonical_request(req);
    entry["response_text"] = response.text;
    entry["created_at"] = static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    const fs::path temp_path =
        entry_dir / (digest + ".tmp." +
                     std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
    {
        std::ofstream out(temp_path, std::ios::trunc);
        out << entry.dump(2) << '\n';
        if (!out) {
            throw std::runtime_error("gateway: failed writing cache entry " + temp_path.string());
        }
    }
    fs::rename(temp_path, entry_path);
    return response;
}

}  // namespace dsipa
