#pragma once

#include <memory>
#include <string>

#include "dsipa/gateway.hpp"
#include "dsipa/sentiment.hpp"
#include "dsipa/transform.hpp"

namespace dsipa {

struct RemoteBackendConfig {
    std::string model;
    std::string cache_dir;
    double temperature = 0.7;
    double top_p = 0.9;
};

// F1 over a remote chat model: the rewrite instruction is the system message,
// the text the user message. Responses go through the gateway cache.
class RemoteTransformer : public TextTransformer {
public:
    RemoteTransformer(std::shared_ptr<LlmGateway> gateway, RemoteBackendConfig config)
        : gateway_(std::move(gateway)), config_(std::move(config)) {}

    std::string transform(const std::string& text, const std::string& instruction) const override;
    std::string descriptor() const override { return "remote:" + config_.model; }

private:
    std::shared_ptr<LlmGateway> gateway_;
    RemoteBackendConfig config_;
};

// F2 over a remote chat model guided by the sentiment prompt. The reply is
// parsed leniently: the first JSON object found is read for "negative",
// "neutral" and "positive", then passed through validate_vector.
class RemoteScorer : public SentimentScorer {
public:
    RemoteScorer(std::shared_ptr<LlmGateway> gateway, RemoteBackendConfig config,
                 std::string sentiment_prompt)
        : gateway_(std::move(gateway)),
          config_(std::move(config)),
          sentiment_prompt_(std::move(sentiment_prompt)) {}

    SentimentVector score(const std::string& text) const override;
    std::string descriptor() const override { return "remote:" + config_.model; }

private:
    std::shared_ptr<LlmGateway> gateway_;
    RemoteBackendConfig config_;
    std::string sentiment_prompt_;
};

// Extracts and parses the first balanced {...} object in the reply. Exposed
// for tests.
SentimentVector parse_sentiment_reply(const std::string& reply);

}  // namespace dsipa
