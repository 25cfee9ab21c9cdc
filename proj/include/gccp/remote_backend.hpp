#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <string>

#include "backend.hpp"

namespace gccp {

enum class LabelStrategy {
    /// Score each label by echoing prompt+label and summing the label's
    /// token log-probabilities (one batched request).
    echo,
    /// Read the first generated token's top logprobs; a label whose first
    /// token is absent raises capability_error.
    top_logprobs,
};

struct BackendConfig {
    std::string endpoint = "http://127.0.0.1:8000/v1/completions";
    std::string model;
    std::string auth_env = "OPENAI_API_KEY";
    double timeout_seconds = 60.0;
    int max_retries = 3;
    double backoff_base_seconds = 0.5;
    int max_in_flight = 8;
    int top_logprobs = 20;
    LabelStrategy label_strategy = LabelStrategy::echo;

    /// Throws config_error.
    void validate() const;
};

void from_json(nlohmann::json const& j, BackendConfig& c);

/// OpenAI-compatible /v1/completions client.
///
/// Continuation mode posts prompt+continuation with echo, max_tokens 0 and
/// logprobs, and returns the echoed tokens past the prompt's byte offset.
/// Requests are retried with jittered exponential backoff on transport
/// errors, 5xx and 429; other statuses fail at once.
class RemoteBackend final : public Backend {
  public:
    explicit RemoteBackend(BackendConfig config);
    ~RemoteBackend() override;

    ScoreResponse score(ScoreRequest const& request) override;
    [[nodiscard]] std::string name() const override { return "remote:" + m_config.model; }

    /// Peak number of requests that were in flight at once.
    [[nodiscard]] int peak_in_flight() const noexcept { return m_peak.load(); }

    /// Request body for `request`, exposed for tests.
    [[nodiscard]] nlohmann::json build_body(ScoreRequest const& request) const;

  private:
    nlohmann::json post(nlohmann::json const& body);

    BackendConfig m_config;
    std::string m_base;  // scheme://host:port
    std::string m_path;
    std::string m_token;
    std::unique_ptr<std::counting_semaphore<>> m_slots;
    std::atomic<int> m_in_flight{0};
    std::atomic<int> m_peak{0};
};

/// Parses a completions response for `request` (exposed for tests).
ScoreResponse parse_completion(ScoreRequest const& request, nlohmann::json const& response,
                               LabelStrategy strategy);

}  // namespace gccp
