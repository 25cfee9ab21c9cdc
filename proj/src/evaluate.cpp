#include "gccp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gccp/error.hpp"

namespace gccp {

std::string to_string(Gain gain) { return gain == Gain::linear ? "linear" : "exponential"; }

Gain parse_gain(std::string const& name)
{
    if (name == "linear") {
        return Gain::linear;
    }
    if (name == "exponential" || name == "exp") {
        return Gain::exponential;
    }
    throw config_error("unknown gain \"" + name + "\"");
}

namespace {

double gain_of(int grade, Gain gain)
{
    return gain == Gain::linear ? static_cast<double>(grade) : std::exp2(grade) - 1.0;
}

}  // namespace

double ndcg_at_k(CandidateRun const& run, Qrels::grades_type const& grades, std::size_t k,
                 Gain gain)
{
    if (k == 0) {
        throw std::invalid_argument("NDCG cutoff must be >= 1");
    }
    std::vector<int> ideal;
    ideal.reserve(grades.size());
    for (auto const& [doc, g] : grades) {
        ideal.push_back(g);
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += gain_of(ideal[i], gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    if (idcg <= 0.0) {
        return 0.0;
    }

    std::vector<RunEntry const*> ranked;
    for (auto const& e : run.entries) {
        ranked.push_back(&e);
    }
    std::sort(ranked.begin(), ranked.end(),
              [](RunEntry const* a, RunEntry const* b) { return a->rank < b->rank; });
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        auto it = grades.find(ranked[i]->doc_id);
        int g = it == grades.end() ? 0 : it->second;
        dcg += gain_of(g, gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / idcg;
}

double estimate_cost(std::uint64_t prompt_tokens, std::uint64_t generated_tokens,
                     CostModel const& model)
{
    if (model.prompt_per_1k < 0.0 || model.generated_per_1k < 0.0) {
        throw std::invalid_argument("prices must be >= 0");
    }
    return static_cast<double>(prompt_tokens) / 1000.0 * model.prompt_per_1k
           + static_cast<double>(generated_tokens) / 1000.0 * model.generated_per_1k;
}

CallAccounting count_calls(std::span<CallTraceEntry const> trace, CallSnapshot const& backend,
                           std::map<std::string, std::size_t> const& calls_per_document)
{
    CallAccounting acc;
    for (auto const& t : trace) {
        acc.per_scorer[t.scorer] += t.calls;
        acc.per_query[t.query_id] += t.calls;
        acc.total += t.calls;
        acc.usage += t.usage;
        auto it = calls_per_document.find(t.scorer);
        std::size_t per_doc = it == calls_per_document.end() ? 1 : it->second;
        if (t.calls != t.candidates * per_doc) {
            acc.violations.push_back(t.scorer + " on " + t.query_id + ": " + std::to_string(t.calls)
                                     + " calls for " + std::to_string(t.candidates)
                                     + " candidates");
        }
    }
    acc.remote_calls = backend.remote_calls;
    acc.cache_hits = backend.cache_hits;
    acc.remote_usage = backend.remote_usage;
    return acc;
}

EvalReport evaluate_run(std::span<CandidateRun const> runs, Qrels const& qrels, std::size_t k,
                        Gain gain)
{
    EvalReport report;
    report.k = k;
    report.gain = gain;
    bool any_judged = false;
    double sum = 0.0;
    for (auto const& run : runs) {
        auto const* grades = qrels.for_query(run.query_id);
        if (grades == nullptr) {
            ++report.skipped_unjudged;
            continue;
        }
        any_judged = true;
        double v = ndcg_at_k(run, *grades, k, gain);
        report.per_query[run.query_id] = v;
        bool has_relevant = std::any_of(grades->begin(), grades->end(),
                                        [](auto const& p) { return p.second > 0; });
        if (!has_relevant) {
            ++report.skipped_zero_idcg;
            continue;
        }
        sum += v;
        ++report.evaluated;
    }
    if (!any_judged) {
        throw std::invalid_argument("no run query has relevance judgments");
    }
    report.mean = report.evaluated == 0 ? 0.0 : sum / static_cast<double>(report.evaluated);
    return report;
}

nlohmann::json EvalReport::to_json() const
{
    nlohmann::json calls_json{{"total", calls.total},
                              {"remote", calls.remote_calls},
                              {"cache_hits", calls.cache_hits},
                              {"per_scorer", calls.per_scorer},
                              {"per_query", calls.per_query},
                              {"violations", calls.violations}};
    return {{"metric", "ndcg_cut_" + std::to_string(k)},
            {"k", k},
            {"gain", to_string(gain)},
            {"mean", mean},
            {"per_query", per_query},
            {"evaluated", evaluated},
            {"skipped_unjudged", skipped_unjudged},
            {"skipped_zero_idcg", skipped_zero_idcg},
            {"calls", calls_json},
            {"tokens", {{"prompt", calls.usage.prompt_tokens},
                        {"generated", calls.usage.completion_tokens},
                        {"billed_prompt", calls.remote_usage.prompt_tokens},
                        {"billed_generated", calls.remote_usage.completion_tokens}}},
            {"cost_model", {{"prompt_per_1k", cost_model.prompt_per_1k},
                            {"generated_per_1k", cost_model.generated_per_1k}}},
            {"estimated_cost", estimated_cost}};
}

std::string EvalReport::to_table() const
{
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %10s\n", "query", "ndcg@k");
    out += line;
    for (auto const& [q, v] : per_query) {
        std::snprintf(line, sizeof line, "%-24s %10.4f\n", q.c_str(), v);
        out += line;
    }
    std::snprintf(line, sizeof line, "%-24s %10.4f\n", "all", mean);
    out += line;
    std::snprintf(line, sizeof line, "k=%zu gain=%s evaluated=%zu skipped=%zu\n", k,
                  to_string(gain).c_str(), evaluated, skipped_unjudged + skipped_zero_idcg);
    out += line;
    if (calls.total > 0) {
        std::snprintf(line, sizeof line, "calls=%llu remote=%llu cache_hits=%llu cost=$%.4f\n",
                      static_cast<unsigned long long>(calls.total),
                      static_cast<unsigned long long>(calls.remote_calls),
                      static_cast<unsigned long long>(calls.cache_hits), estimated_cost);
        out += line;
    }
    return out;
}

}  // namespace gccp
