#include "gccp/backend.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace gccp {

std::string to_string(ScoreMode mode)
{
    return mode == ScoreMode::continuation ? "continuation" : "labels";
}

void ScoreRequest::validate() const
{
    if (mode == ScoreMode::continuation) {
        if (continuation.empty()) {
            throw std::invalid_argument("continuation request with empty continuation");
        }
        return;
    }
    std::set<std::string> distinct(labels.begin(), labels.end());
    if (labels.size() < 2 || distinct.size() != labels.size()) {
        throw std::invalid_argument("labels request needs at least two distinct labels");
    }
    for (auto const& l : labels) {
        if (l.empty()) {
            throw std::invalid_argument("empty label");
        }
    }
}

void to_json(nlohmann::json& j, ScoreResponse const& r)
{
    auto tokens = nlohmann::json::array();
    for (auto const& t : r.tokens) {
        tokens.push_back({t.token, t.logprob});
    }
    j = {{"tokens", tokens},
         {"label_logits", r.label_logits},
         {"usage", {r.usage.prompt_tokens, r.usage.completion_tokens}}};
}

void from_json(nlohmann::json const& j, ScoreResponse& r)
{
    r = {};
    for (auto const& t : j.at("tokens")) {
        r.tokens.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
    }
    r.label_logits = j.at("label_logits").get<std::vector<double>>();
    r.usage.prompt_tokens = j.at("usage").at(0).get<std::uint64_t>();
    r.usage.completion_tokens = j.at("usage").at(1).get<std::uint64_t>();
}

void CallCounter::record_remote(Usage const& usage) noexcept
{
    m_remote.fetch_add(1, std::memory_order_relaxed);
    m_prompt_tokens.fetch_add(usage.prompt_tokens, std::memory_order_relaxed);
    m_completion_tokens.fetch_add(usage.completion_tokens, std::memory_order_relaxed);
}

CallSnapshot CallCounter::snapshot() const noexcept
{
    CallSnapshot s;
    s.remote_calls = m_remote.load();
    s.cache_hits = m_hits.load();
    s.remote_usage.prompt_tokens = m_prompt_tokens.load();
    s.remote_usage.completion_tokens = m_completion_tokens.load();
    return s;
}

MeteredBackend::MeteredBackend(std::shared_ptr<Backend> inner, std::shared_ptr<CallCounter> counter)
    : m_inner(std::move(inner)), m_counter(std::move(counter))
{}

ScoreResponse MeteredBackend::score(ScoreRequest const& request)
{
    auto response = m_inner->score(request);
    m_counter->record_remote(response.usage);
    return response;
}

}  // namespace gccp
