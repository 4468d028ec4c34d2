#include "dsipa/remote.hpp"

#include <json.hpp>

namespace dsipa {

namespace {

using nlohmann::json;

CompletionRequest make_request(const RemoteBackendConfig& config, const std::string& system,
                               const std::string& user) {
    CompletionRequest req;
    req.model = config.model;
    req.system = system;
    req.user = user;
    req.temperature = config.temperature;
    req.top_p = config.top_p;
    return req;
}

}  // namespace

std::string RemoteTransformer::transform(const std::string& text,
                                         const std::string& instruction) const {
    const CompletionRequest req = make_request(config_, instruction, text);
    const CompletionResponse res = config_.cache_dir.empty()
                                       ? gateway_->complete(req)
                                       : gateway_->cached_complete(req, config_.cache_dir);
    return res.text;
}

SentimentVector parse_sentiment_reply(const std::string& reply) {
    const std::size_t open = reply.find('{');
    if (open == std::string::npos) {
        throw std::runtime_error("sentiment reply contains no JSON object: " + reply);
    }
    int depth = 0;
    std::size_t close = std::string::npos;
    for (std::size_t i = open; i < reply.size(); ++i) {
        if (reply[i] == '{') ++depth;
        else if (reply[i] == '}') {
            --depth;
            if (depth == 0) {
                close = i;
                break;
            }
        }
    }
    if (close == std::string::npos) {
        throw std::runtime_error("sentiment reply has an unbalanced JSON object: " + reply);
    }
    json obj;
    try {
        obj = json::parse(reply.substr(open, close - open + 1));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("sentiment reply JSON is invalid: ") + e.what());
    }
    if (!obj.contains("negative") || !obj.contains("neutral") || !obj.contains("positive")) {
        throw std::runtime_error("sentiment reply is missing negative/neutral/positive fields");
    }
    return validate_vector({obj["negative"].get<double>(), obj["neutral"].get<double>(),
                            obj["positive"].get<double>()});
}

SentimentVector RemoteScorer::score(const std::string& text) const {
    const CompletionRequest req = make_request(config_, sentiment_prompt_, text);
    const CompletionResponse res = config_.cache_dir.empty()
                                       ? gateway_->complete(req)
                                       : gateway_->cached_complete(req, config_.cache_dir);
    return parse_sentiment_reply(res.text);
}

}  // namespace dsipa
