#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace gccp {

enum class ScoreMode { continuation, labels };

std::string to_string(ScoreMode mode);

/// One log-probability query against a language model.
///
/// Continuation mode asks for the per-token log-probabilities of
/// `continuation` following `prompt`. Labels mode asks for one (possibly
/// unnormalized) log-score per label as the next output after `prompt`.
/// Metadata travels with the request but is never part of its identity.
struct ScoreRequest {
    std::string prompt;
    ScoreMode mode = ScoreMode::labels;
    std::string continuation;
    std::vector<std::string> labels;
    std::map<std::string, std::string> metadata;
    std::string model;

    /// Throws std::invalid_argument on an empty continuation or fewer than two
    /// distinct labels.
    void validate() const;
};

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;
};

struct Usage {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;

    Usage& operator+=(Usage const& other) noexcept
    {
        prompt_tokens += other.prompt_tokens;
        completion_tokens += other.completion_tokens;
        return *this;
    }
};

struct ScoreResponse {
    std::vector<TokenLogprob> tokens;  // continuation mode
    std::vector<double> label_logits;  // labels mode, request order
    Usage usage;
};

void to_json(nlohmann::json& j, ScoreResponse const& r);
void from_json(nlohmann::json const& j, ScoreResponse& r);

/// The scoring contract. Implementations must be safe to call concurrently.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual ScoreResponse score(ScoreRequest const& request) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

struct CallSnapshot {
    std::uint64_t remote_calls = 0;
    std::uint64_t cache_hits = 0;
    Usage remote_usage;

    [[nodiscard]] std::uint64_t total() const noexcept { return remote_calls + cache_hits; }
};

/// Thread-safe tally of backend invocations. Usage is counted for remote
/// calls only; cache hits cost nothing.
class CallCounter {
  public:
    void record_remote(Usage const& usage) noexcept;
    void record_hit() noexcept { m_hits.fetch_add(1, std::memory_order_relaxed); }
    [[nodiscard]] CallSnapshot snapshot() const noexcept;

  private:
    std::atomic<std::uint64_t> m_remote{0};
    std::atomic<std::uint64_t> m_hits{0};
    std::atomic<std::uint64_t> m_prompt_tokens{0};
    std::atomic<std::uint64_t> m_completion_tokens{0};
};

/// Forwards to `inner`, counting every call as remote.
class MeteredBackend final : public Backend {
  public:
    MeteredBackend(std::shared_ptr<Backend> inner, std::shared_ptr<CallCounter> counter);

    ScoreResponse score(ScoreRequest const& request) override;
    [[nodiscard]] std::string name() const override { return m_inner->name(); }

  private:
    std::shared_ptr<Backend> m_inner;
    std::shared_ptr<CallCounter> m_counter;
};

}  // namespace gccp
