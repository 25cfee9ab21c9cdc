#include "gccp/mock_backends.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gccp/hashing.hpp"
#include "gccp/text.hpp"

namespace gccp {

namespace {

Usage mock_usage(ScoreRequest const& request)
{
    Usage u;
    u.prompt_tokens = count_whitespace_tokens(request.prompt);
    if (request.mode == ScoreMode::continuation) {
        u.prompt_tokens += count_whitespace_tokens(request.continuation);
    } else {
        u.completion_tokens = 1;
    }
    return u;
}

std::string const& require(ScoreRequest const& request, std::string const& key)
{
    auto it = request.metadata.find(key);
    if (it == request.metadata.end()) {
        throw std::invalid_argument("oracle backend needs request metadata \"" + key + "\"");
    }
    return it->second;
}

}  // namespace

double HashMockBackend::logprob(std::string const& prompt, std::string const& target)
{
    if (target.empty()) {
        throw std::invalid_argument("hash mock: empty target");
    }
    auto h = fnv1a64(target, fnv1a64("\x1f", fnv1a64(prompt)));
    return -10.0 * unit_interval(h);
}

ScoreResponse HashMockBackend::score(ScoreRequest const& request)
{
    request.validate();
    ScoreResponse r;
    if (request.mode == ScoreMode::continuation) {
        auto tokens = split_whitespace(request.continuation);
        std::string prefix;
        for (auto const& t : tokens) {
            if (!prefix.empty()) {
                prefix += ' ';
            }
            prefix += t;
            r.tokens.push_back({t, logprob(request.prompt, prefix)});
        }
    } else {
        for (auto const& label : request.labels) {
            r.label_logits.push_back(logprob(request.prompt, label));
        }
    }
    r.usage = mock_usage(request);
    return r;
}

OracleMockBackend::OracleMockBackend(Qrels qrels, double sigma, std::uint64_t seed)
    : m_qrels(std::move(qrels)), m_sigma(sigma), m_seed(seed)
{
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("oracle noise sigma must be >= 0");
    }
}

double OracleMockBackend::noise(std::string const& qid, std::string const& docid,
                                std::string const& label) const
{
    if (m_sigma == 0.0) {
        return 0.0;
    }
    auto key = fnv1a64(std::to_string(m_seed) + '\x1f' + qid + '\x1f' + docid + '\x1f' + label);
    return m_sigma * keyed_normal(key);
}

ScoreResponse OracleMockBackend::score(ScoreRequest const& request)
{
    request.validate();
    auto const& qid = require(request, "qid");
    auto const& docid = require(request, "docid");
    double top = m_qrels.max_grade();
    double grade = m_qrels.grade(qid, docid);

    ScoreResponse r;
    if (request.mode == ScoreMode::continuation) {
        double base = top > 0.0 ? -0.5 - 2.0 * (top - grade) / top : -0.5;
        auto tokens = split_whitespace(request.continuation);
        for (std::size_t j = 0; j < tokens.size(); ++j) {
            double lp = base + noise(qid, docid, "#" + std::to_string(j));
            r.tokens.push_back({tokens[j], std::min(0.0, lp)});
        }
    } else {
        auto k_count = request.labels.size();
        double k_max = static_cast<double>(k_count - 1);
        double scaled = top > 0.0 ? grade * (k_max / top) : 0.0;
        auto order = request.metadata.find("label_order");
        bool descending = order != request.metadata.end() && order->second == "descending";
        for (std::size_t i = 0; i < k_count; ++i) {
            double k = descending ? static_cast<double>(k_count - 1 - i) : static_cast<double>(i);
            r.label_logits.push_back(-std::abs(k - scaled)
                                     + noise(qid, docid, request.labels[i]));
        }
    }
    r.usage = mock_usage(request);
    return r;
}

}  // namespace gccp
