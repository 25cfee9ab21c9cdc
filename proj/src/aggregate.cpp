#include "gccp/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gccp/error.hpp"

namespace gccp {

AggregationMethod parse_aggregation_method(std::string const& name)
{
    if (name == "linear") {
        return AggregationMethod::linear;
    }
    if (name == "borda") {
        return AggregationMethod::borda;
    }
    throw config_error("unknown aggregation method \"" + name + "\"");
}

Normalization parse_normalization(std::string const& name)
{
    if (name == "minmax") {
        return Normalization::minmax;
    }
    if (name == "none") {
        return Normalization::none;
    }
    throw config_error("unknown normalization \"" + name + "\"");
}

void AggregationSpec::validate() const
{
    if (components.size() < 2) {
        throw std::invalid_argument("aggregation needs at least two component runs");
    }
    auto const& first = components.front().run;
    std::map<std::string, int> docs;
    for (auto const& e : first.entries) {
        docs.emplace(e.doc_id, 0);
    }
    double total = 0.0;
    for (auto const& c : components) {
        if (c.run.query_id != first.query_id) {
            throw std::invalid_argument("component runs mix queries " + first.query_id + " and "
                                        + c.run.query_id);
        }
        if (!std::isfinite(c.weight) || c.weight < 0.0) {
            throw std::invalid_argument("component weights must be finite and >= 0");
        }
        total += c.weight;
        for (auto const& e : c.run.entries) {
            auto it = docs.find(e.doc_id);
            if (it == docs.end()) {
                throw std::invalid_argument("document " + e.doc_id + " is missing from run "
                                            + first.tag);
            }
        }
        if (c.run.size() != docs.size()) {
            for (auto const& [id, unused] : docs) {
                bool found = std::any_of(c.run.entries.begin(), c.run.entries.end(),
                                         [&](RunEntry const& e) { return e.doc_id == id; });
                if (!found) {
                    throw std::invalid_argument("document " + id + " is missing from run "
                                                + c.run.tag);
                }
            }
        }
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("aggregation weights sum to zero");
    }
}

CandidateRun minmax_normalize(CandidateRun run)
{
    if (run.empty()) {
        return run;
    }
    auto [lo, hi] = std::minmax_element(run.entries.begin(), run.entries.end(),
                                        [](auto const& a, auto const& b) { return a.score < b.score; });
    double min = lo->score;
    double range = hi->score - min;
    for (auto& e : run.entries) {
        e.score = range > 0.0 ? (e.score - min) / range : 0.5;
    }
    return run;
}

namespace {

struct Accumulator {
    std::vector<double> terms;
    std::uint32_t best_rank = UINT32_MAX;
};

/// Sums in ascending order so the result does not depend on component order.
double ordered_sum(std::vector<double> terms)
{
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) {
        s += t;
    }
    return s;
}

CandidateRun collect(std::map<std::string, Accumulator> const& acc, std::string query_id,
                     std::vector<WeightedRun> const& components)
{
    std::vector<std::string> tags;
    for (auto const& c : components) {
        tags.push_back(c.run.tag);
    }
    CandidateRun out{std::move(query_id), {}, aggregate_tag(tags)};
    for (auto const& [id, a] : acc) {
        out.entries.push_back({id, ordered_sum(a.terms), a.best_rank});
    }
    normalize(out);
    return out;
}

}  // namespace

CandidateRun linear_aggregate(AggregationSpec const& spec)
{
    spec.validate();
    double total = 0.0;
    for (auto const& c : spec.components) {
        total += c.weight;
    }
    std::map<std::string, Accumulator> acc;
    for (auto const& c : spec.components) {
        auto run = spec.normalization == Normalization::minmax ? minmax_normalize(c.run) : c.run;
        for (auto const& e : run.entries) {
            auto& a = acc[e.doc_id];
            a.terms.push_back(c.weight * e.score / total);
            a.best_rank = std::min(a.best_rank, e.rank);
        }
    }
    return collect(acc, spec.components.front().run.query_id, spec.components);
}

CandidateRun borda_aggregate(AggregationSpec const& spec)
{
    spec.validate();
    std::map<std::string, Accumulator> acc;
    for (auto const& c : spec.components) {
        auto run = c.run;
        auto n = static_cast<double>(run.size());
        normalize(run);
        for (auto const& e : run.entries) {
            auto& a = acc[e.doc_id];
            a.terms.push_back(c.weight * (n - static_cast<double>(e.rank)));
            a.best_rank = std::min(a.best_rank, e.rank);
        }
    }
    return collect(acc, spec.components.front().run.query_id, spec.components);
}

CandidateRun aggregate(AggregationSpec const& spec)
{
    return spec.method == AggregationMethod::linear ? linear_aggregate(spec) : borda_aggregate(spec);
}

std::string aggregate_tag(std::vector<std::string> const& component_tags)
{
    // pointwise scorers first, the contrastive one last; unknown tags after, sorted
    static std::string const known = "QYSG";
    std::string initials;
    for (auto const& t : component_tags) {
        if (t == "QG") {
            initials += 'Q';
        } else if (t == "RG-YN") {
            initials += 'Y';
        } else if (t == "RG-S") {
            initials += 'S';
        } else if (t == "GCCP") {
            initials += 'G';
        } else if (!t.empty()) {
            initials += static_cast<char>(std::toupper(static_cast<unsigned char>(t.front())));
        }
    }
    auto order = [](char c) {
        auto k = known.find(c);
        return k == std::string::npos ? known.size() + static_cast<unsigned char>(c) : k;
    };
    std::sort(initials.begin(), initials.end(),
              [&](char a, char b) { return order(a) < order(b); });
    return "PAGC-" + initials;
}

}  // namespace gccp
