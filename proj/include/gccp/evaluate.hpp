#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "backend.hpp"
#include "corpus.hpp"
#include "run.hpp"

namespace gccp {

enum class Gain { linear, exponential };

std::string to_string(Gain gain);
Gain parse_gain(std::string const& name);

/// NDCG@k with log2(i+1) discount. IDCG is taken over every judged document of
/// the query; unjudged documents count as grade 0. Returns 0 when IDCG is 0.
double ndcg_at_k(CandidateRun const& run, Qrels::grades_type const& grades, std::size_t k,
                 Gain gain = Gain::linear);

/// Price per 1,000 tokens, defaulting to GPT-4o list prices.
struct CostModel {
    double prompt_per_1k = 0.0025;
    double generated_per_1k = 0.01;
};

double estimate_cost(std::uint64_t prompt_tokens, std::uint64_t generated_tokens,
                     CostModel const& model = {});

/// Backend calls made by one scorer over one query's candidates.
struct CallTraceEntry {
    std::string query_id;
    std::string scorer;  // tag, e.g. "GCCP"
    std::size_t candidates = 0;
    std::size_t calls = 0;
    Usage usage;
};

struct CallAccounting {
    std::map<std::string, std::uint64_t> per_scorer;
    std::map<std::string, std::uint64_t> per_query;
    std::uint64_t total = 0;
    std::uint64_t remote_calls = 0;
    std::uint64_t cache_hits = 0;
    Usage usage;         // every scored request, cached or not
    Usage remote_usage;  // billed requests only
    /// Identity violations: a scorer whose calls differ from candidates x
    /// calls-per-document.
    std::vector<std::string> violations;
};

/// Tallies a pipeline trace. `calls_per_document` maps a scorer tag to its
/// expected calls per candidate (1 when absent).
CallAccounting count_calls(std::span<CallTraceEntry const> trace, CallSnapshot const& backend,
                           std::map<std::string, std::size_t> const& calls_per_document = {});

struct EvalReport {
    std::size_t k = 10;
    Gain gain = Gain::linear;
    std::map<std::string, double> per_query;
    double mean = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped_unjudged = 0;  // query has no qrels
    std::size_t skipped_zero_idcg = 0; // judged but nothing relevant
    CallAccounting calls;
    double estimated_cost = 0.0;
    CostModel cost_model;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string to_table() const;
};

/// Mean NDCG@k over run queries present in qrels with non-zero IDCG. Throws
/// std::invalid_argument when no run query is judged.
EvalReport evaluate_run(std::span<CandidateRun const> runs, Qrels const& qrels, std::size_t k = 10,
                        Gain gain = Gain::linear);

}  // namespace gccp
