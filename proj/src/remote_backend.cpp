#include "httplib.h"

#include "gccp/remote_backend.hpp"

#include <cstdlib>
#include <random>
#include <thread>

#include "gccp/error.hpp"
#include "gccp/text.hpp"

namespace gccp {

void BackendConfig::validate() const
{
    if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0) {
        throw config_error("backend endpoint must be an http(s) URL: " + endpoint);
    }
    if (max_retries < 0) {
        throw config_error("max_retries must be >= 0");
    }
    if (max_in_flight < 1) {
        throw config_error("max_in_flight must be >= 1");
    }
    if (!(timeout_seconds > 0.0) || backoff_base_seconds < 0.0) {
        throw config_error("timeout must be positive and backoff non-negative");
    }
}

void from_json(nlohmann::json const& j, BackendConfig& c)
{
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.auth_env = j.value("auth_env", c.auth_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.backoff_base_seconds = j.value("backoff_base_seconds", c.backoff_base_seconds);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.top_logprobs = j.value("top_logprobs", c.top_logprobs);
    auto strategy = j.value("label_strategy", std::string("echo"));
    if (strategy == "echo") {
        c.label_strategy = LabelStrategy::echo;
    } else if (strategy == "top_logprobs") {
        c.label_strategy = LabelStrategy::top_logprobs;
    } else {
        throw config_error("unknown label_strategy \"" + strategy + "\"");
    }
}

namespace {

/// OpenAI-style offsets count characters, not bytes.
std::size_t utf8_length(std::string_view s)
{
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0U) != 0x80U) {
            ++n;
        }
    }
    return n;
}

nlohmann::json const& logprobs_of(nlohmann::json const& choice)
{
    if (!choice.contains("logprobs") || !choice["logprobs"].is_object()) {
        throw capability_error("provider returned no logprobs");
    }
    return choice["logprobs"];
}

/// Tokens of an echoed prompt that reach past `prompt_chars`.
std::vector<TokenLogprob> echoed_tail(nlohmann::json const& choice, std::size_t prompt_chars)
{
    auto const& lp = logprobs_of(choice);
    if (!lp.contains("tokens") || !lp.contains("token_logprobs") || !lp.contains("text_offset")) {
        throw capability_error("provider did not echo prompt logprobs");
    }
    auto const& tokens = lp["tokens"];
    auto const& values = lp["token_logprobs"];
    auto const& offsets = lp["text_offset"];
    std::vector<TokenLogprob> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto token = tokens[i].get<std::string>();
        auto end = offsets[i].get<std::size_t>() + utf8_length(token);
        if (end <= prompt_chars) {
            continue;
        }
        if (values[i].is_null()) {
            throw capability_error("provider returned a null logprob for an echoed token");
        }
        out.push_back({token, values[i].get<double>()});
    }
    if (out.empty()) {
        throw capability_error("no echoed tokens beyond the prompt");
    }
    return out;
}

Usage usage_of(nlohmann::json const& response)
{
    Usage u;
    if (response.contains("usage") && response["usage"].is_object()) {
        u.prompt_tokens = response["usage"].value("prompt_tokens", std::uint64_t{0});
        u.completion_tokens = response["usage"].value("completion_tokens", std::uint64_t{0});
    }
    return u;
}

std::string first_word(std::string const& label)
{
    auto words = split_whitespace(label);
    return words.empty() ? label : words.front();
}

}  // namespace

ScoreResponse parse_completion(ScoreRequest const& request, nlohmann::json const& response,
                               LabelStrategy strategy)
{
    if (!response.contains("choices") || !response["choices"].is_array()
        || response["choices"].empty()) {
        throw backend_error("completion response has no choices");
    }
    auto const& choices = response["choices"];
    ScoreResponse out;
    out.usage = usage_of(response);
    auto prompt_chars = utf8_length(request.prompt);

    if (request.mode == ScoreMode::continuation) {
        out.tokens = echoed_tail(choices[0], prompt_chars);
        return out;
    }

    if (strategy == LabelStrategy::echo) {
        if (choices.size() != request.labels.size()) {
            throw backend_error("expected one choice per label");
        }
        out.label_logits.assign(request.labels.size(), 0.0);
        for (std::size_t c = 0; c < choices.size(); ++c) {
            auto idx = choices[c].value("index", c);
            if (idx >= request.labels.size()) {
                throw backend_error("choice index out of range");
            }
            double sum = 0.0;
            for (auto const& t : echoed_tail(choices[c], prompt_chars)) {
                sum += t.logprob;
            }
            out.label_logits[idx] = sum;
        }
        return out;
    }

    auto const& lp = logprobs_of(choices[0]);
    if (!lp.contains("top_logprobs") || !lp["top_logprobs"].is_array()
        || lp["top_logprobs"].empty() || !lp["top_logprobs"][0].is_object()) {
        throw capability_error("provider returned no top_logprobs");
    }
    auto const& top = lp["top_logprobs"][0];
    std::vector<std::string> keys;
    for (auto const& label : request.labels) {
        keys.push_back(first_word(label));
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (std::size_t j = i + 1; j < keys.size(); ++j) {
            if (keys[i] == keys[j]) {
                throw capability_error("labels \"" + request.labels[i] + "\" and \""
                                       + request.labels[j]
                                       + "\" share a first token; use the echo label strategy");
            }
        }
    }
    for (auto const& key : keys) {
        bool found = false;
        double best = 0.0;
        for (auto const& [token, value] : top.items()) {
            if (trim(token) == key && (!found || value.get<double>() > best)) {
                best = value.get<double>();
                found = true;
            }
        }
        if (!found) {
            throw capability_error("label token \"" + key + "\" not among the returned top_logprobs");
        }
        out.label_logits.push_back(best);
    }
    return out;
}

RemoteBackend::RemoteBackend(BackendConfig config) : m_config(std::move(config))
{
    m_config.validate();
    auto scheme_end = m_config.endpoint.find("://") + 3;
    auto path_start = m_config.endpoint.find('/', scheme_end);
    m_base = m_config.endpoint.substr(0, path_start);
    m_path = path_start == std::string::npos ? "/v1/completions"
                                             : m_config.endpoint.substr(path_start);
    if (!m_config.auth_env.empty()) {
        if (char const* token = std::getenv(m_config.auth_env.c_str())) {
            m_token = token;
        }
    }
    m_slots = std::make_unique<std::counting_semaphore<>>(m_config.max_in_flight);
}

RemoteBackend::~RemoteBackend() = default;

nlohmann::json RemoteBackend::build_body(ScoreRequest const& request) const
{
    nlohmann::json body{{"model", m_config.model}, {"temperature", 0}};
    if (request.mode == ScoreMode::continuation) {
        body["prompt"] = request.prompt + request.continuation;
        body["max_tokens"] = 0;
        body["echo"] = true;
        body["logprobs"] = 1;
    } else if (m_config.label_strategy == LabelStrategy::echo) {
        auto prompts = nlohmann::json::array();
        for (auto const& label : request.labels) {
            prompts.push_back(request.prompt + label);
        }
        body["prompt"] = prompts;
        body["max_tokens"] = 0;
        body["echo"] = true;
        body["logprobs"] = 1;
    } else {
        body["prompt"] = request.prompt;
        body["max_tokens"] = 1;
        body["logprobs"] = m_config.top_logprobs;
    }
    return body;
}

nlohmann::json RemoteBackend::post(nlohmann::json const& body)
{
    struct Slot {
        RemoteBackend& self;
        explicit Slot(RemoteBackend& s) : self(s)
        {
            self.m_slots->acquire();
            int now = self.m_in_flight.fetch_add(1) + 1;
            int peak = self.m_peak.load();
            while (now > peak && !self.m_peak.compare_exchange_weak(peak, now)) {}
        }
        ~Slot()
        {
            self.m_in_flight.fetch_sub(1);
            self.m_slots->release();
        }
    };

    auto payload = body.dump();
    thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
    std::string last_error;
    for (int attempt = 0; attempt <= m_config.max_retries; ++attempt) {
        if (attempt > 0) {
            std::uniform_real_distribution<double> jitter(0.5, 1.5);
            auto delay = m_config.backoff_base_seconds * std::pow(2.0, attempt - 1)
                         * jitter(jitter_rng);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        httplib::Result result;
        {
            Slot slot(*this);
            httplib::Client client(m_base);
            auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
                std::chrono::duration<double>(m_config.timeout_seconds));
            client.set_connection_timeout(timeout);
            client.set_read_timeout(timeout);
            client.set_write_timeout(timeout);
            httplib::Headers headers;
            if (!m_token.empty()) {
                headers.emplace("Authorization", "Bearer " + m_token);
            }
            result = client.Post(m_path, headers, payload, "application/json");
        }
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        auto status = result->status;
        if (status == 429 || status >= 500) {
            last_error = "HTTP " + std::to_string(status);
            continue;
        }
        if (status < 200 || status >= 300) {
            throw backend_error("HTTP " + std::to_string(status) + ": "
                                + result->body.substr(0, 512));
        }
        try {
            return nlohmann::json::parse(result->body);
        } catch (nlohmann::json::parse_error const& e) {
            throw backend_error(std::string("malformed provider response: ") + e.what());
        }
    }
    throw backend_error("request failed after " + std::to_string(m_config.max_retries + 1)
                        + " attempts: " + last_error);
}

ScoreResponse RemoteBackend::score(ScoreRequest const& request)
{
    request.validate();
    return parse_completion(request, post(build_body(request)), m_config.label_strategy);
}

}  // namespace gccp
