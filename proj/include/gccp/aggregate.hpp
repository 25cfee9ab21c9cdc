#pragma once

#include <string>
#include <vector>

#include "run.hpp"

namespace gccp {

enum class AggregationMethod { linear, borda };
enum class Normalization { minmax, none };

AggregationMethod parse_aggregation_method(std::string const& name);
Normalization parse_normalization(std::string const& name);

struct WeightedRun {
    CandidateRun run;
    double weight = 1.0;
};

struct AggregationSpec {
    AggregationMethod method = AggregationMethod::linear;
    Normalization normalization = Normalization::minmax;
    std::vector<WeightedRun> components;

    /// Throws std::invalid_argument: fewer than two components, mixed query
    /// ids, differing document sets, or non-positive total weight.
    void validate() const;
};

/// s' = (s - min) / (max - min); a constant run maps to 0.5 everywhere.
CandidateRun minmax_normalize(CandidateRun run);

/// Weighted mean of (optionally normalized) component scores. With unit
/// weights this is 1/(|R|+1) * (sum of pointwise scores + contrastive score).
CandidateRun linear_aggregate(AggregationSpec const& spec);

/// Sum over components of (n - rank).
CandidateRun borda_aggregate(AggregationSpec const& spec);

CandidateRun aggregate(AggregationSpec const& spec);

/// "PAGC-" followed by one initial per component tag (QG->Q, RG-YN->Y,
/// RG-S->S, GCCP->G, otherwise the tag's first character), in that order
/// whatever the component order.
std::string aggregate_tag(std::vector<std::string> const& component_tags);

}  // namespace gccp
