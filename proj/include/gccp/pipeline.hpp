#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aggregate.hpp"
#include "anchor.hpp"
#include "bm25.hpp"
#include "evaluate.hpp"
#include "remote_backend.hpp"
#include "scorers.hpp"

namespace gccp {

enum class BackendKind { hash, oracle, remote };

BackendKind parse_backend_kind(std::string const& name);

struct BackendSelection {
    BackendKind kind = BackendKind::hash;
    BackendConfig remote;
    double oracle_sigma = 0.0;
    /// Cache file; empty disables caching.
    std::filesystem::path cache;
};

/// Everything one experiment needs. Loaded from a JSON file; see README for
/// the schema.
struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path queries;
    std::filesystem::path qrels;  // optional
    /// First stage: a run file, or built-in BM25 when empty.
    std::filesystem::path first_stage_run;
    std::size_t bm25_k = 100;
    Bm25Params bm25;
    AnchorParams anchor;
    std::vector<ScorerSpec> scorers;
    AggregationMethod aggregation = AggregationMethod::linear;
    Normalization normalization = Normalization::minmax;
    std::vector<double> weights;
    BackendSelection backend;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    int workers = 1;
    std::size_t eval_k = 10;
    Gain gain = Gain::linear;
    CostModel cost;

    /// Relative paths resolve against `base_dir`. Throws config_error.
    static PipelineConfig from_json(nlohmann::json const& j,
                                    std::filesystem::path const& base_dir = {});
    static PipelineConfig load(std::filesystem::path const& path);
    void validate() const;
};

struct QueryFailure {
    std::string query_id;
    std::string message;
};

struct PipelineResult {
    std::vector<std::string> scorer_stems;
    std::vector<std::vector<CandidateRun>> scorer_runs;  // [scorer][query]
    std::vector<CandidateRun> aggregated;
    std::vector<AnchorDocument> anchors;
    std::vector<CallTraceEntry> trace;
    std::optional<EvalReport> report;
    nlohmann::json report_json;
    std::vector<QueryFailure> failures;

    [[nodiscard]] int exit_code() const noexcept { return failures.empty() ? 0 : 1; }
};

/// Builds the configured backend stack (mock/remote, metered or cached).
std::shared_ptr<Backend> make_backend(BackendSelection const& selection, Qrels const* qrels,
                                      std::uint64_t seed, std::shared_ptr<CallCounter> counter);

/// first stage -> anchor -> scorers -> aggregation -> evaluation, per query.
/// A failing query is recorded and skipped. Writes runs/<stem>.run,
/// runs/aggregated.run, anchors.jsonl and report.json under output_dir.
PipelineResult run_pipeline(PipelineConfig const& config);

/// Same, with a caller-supplied backend (call counts come from `counter`).
PipelineResult run_pipeline(PipelineConfig const& config, std::shared_ptr<Backend> backend,
                            std::shared_ptr<CallCounter> counter);

}  // namespace gccp
