#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "gccp/aggregate.hpp"
#include "gccp/anchor.hpp"
#include "gccp/bm25.hpp"
#include "gccp/cache.hpp"
#include "gccp/error.hpp"
#include "gccp/evaluate.hpp"
#include "gccp/pipeline.hpp"
#include "gccp/scorers.hpp"

namespace {

constexpr int exit_partial = 1;
constexpr int exit_config = 2;

struct AnchorFlags {
    std::size_t m = 10;
    std::size_t z = 10;
    double theta = 0.1;
    std::string strategy = "spectral";
    std::uint64_t seed = 0;
    std::string idf_source = "sentences";

    void add_to(CLI::App& app)
    {
        app.add_option("--m", m, "Documents feeding the anchor summary")->capture_default_str();
        app.add_option("--z", z, "Sentences kept in the anchor")->capture_default_str();
        app.add_option("--theta", theta, "Affinity threshold")->capture_default_str();
        app.add_option("--anchor-strategy", strategy, "spectral, top or random")
            ->capture_default_str();
        app.add_option("--anchor-seed", seed, "Seed for the random strategy")->capture_default_str();
        app.add_option("--idf-source", idf_source, "sentences or documents")->capture_default_str();
    }

    [[nodiscard]] gccp::AnchorParams params() const
    {
        gccp::AnchorParams p;
        p.m = m;
        p.z = z;
        p.theta = theta;
        p.strategy = gccp::parse_anchor_strategy(strategy);
        p.seed = seed;
        if (idf_source == "documents") {
            p.idf_source = gccp::IdfSource::documents;
        } else if (idf_source != "sentences") {
            throw gccp::config_error("unknown idf source \"" + idf_source + "\"");
        }
        return p;
    }
};

struct BackendFlags {
    std::string kind = "hash";
    std::string qrels;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string cache;
    std::string remote_config;
    std::string model;

    void add_to(CLI::App& app)
    {
        app.add_option("--backend", kind, "hash, oracle or remote")->capture_default_str();
        app.add_option("--qrels", qrels, "Judgments (oracle backend)");
        app.add_option("--sigma", sigma, "Oracle noise")->capture_default_str();
        app.add_option("--seed", seed, "Oracle noise seed")->capture_default_str();
        app.add_option("--cache", cache, "Persistent response cache (JSONL)");
        app.add_option("--remote-config", remote_config, "JSON file with remote backend settings");
        app.add_option("--model", model, "Model id sent with each request");
    }

    [[nodiscard]] gccp::BackendSelection selection() const
    {
        gccp::BackendSelection s;
        s.kind = gccp::parse_backend_kind(kind);
        s.oracle_sigma = sigma;
        s.cache = cache;
        if (!remote_config.empty()) {
            std::ifstream in(remote_config);
            if (!in) {
                throw gccp::config_error("cannot open " + remote_config);
            }
            gccp::from_json(nlohmann::json::parse(in), s.remote);
        }
        if (!model.empty()) {
            s.remote.model = model;
        }
        if (s.kind == gccp::BackendKind::remote) {
            s.remote.validate();
        }
        return s;
    }
};

std::map<std::string, gccp::CandidateRun> runs_by_query(std::string const& path)
{
    std::map<std::string, gccp::CandidateRun> out;
    for (auto& run : gccp::read_run(path)) {
        auto id = run.query_id;
        out.emplace(id, std::move(run));
    }
    return out;
}

void write_output(std::string const& path, std::string const& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

int cmd_run(std::string const& config_path, std::optional<std::string> const& output_dir,
            std::optional<std::uint64_t> seed, std::optional<int> workers,
            std::optional<std::string> const& cache)
{
    auto config = gccp::PipelineConfig::load(config_path);
    if (output_dir) {
        config.output_dir = *output_dir;
    }
    if (seed) {
        config.seed = *seed;
        config.anchor.seed = *seed;
    }
    if (workers) {
        config.workers = *workers;
    }
    if (cache) {
        config.backend.cache = *cache;
    }
    config.validate();
    auto result = gccp::run_pipeline(config);
    for (auto const& f : result.failures) {
        std::cerr << "query " << f.query_id << " failed: " << f.message << "\n";
    }
    if (result.report) {
        std::cout << result.report->to_table();
    }
    std::cout << "outputs written to " << config.output_dir.string() << "\n";
    return result.exit_code();
}

int cmd_retrieve(std::string const& corpus_path, std::string const& queries_path, std::size_t k,
                 double k1, double b, std::string const& output)
{
    auto corpus = gccp::load_corpus(corpus_path);
    auto queries = gccp::load_queries(queries_path);
    gccp::Bm25Index index(corpus, {k1, b});
    std::vector<gccp::CandidateRun> runs;
    for (auto const& q : queries) {
        runs.push_back(gccp::bm25_retrieve(q, index, k));
    }
    write_output(output, gccp::format_run(runs));
    return 0;
}

int cmd_anchor(std::string const& corpus_path, std::string const& queries_path,
               std::string const& run_path, AnchorFlags const& flags, std::string const& output)
{
    auto corpus = gccp::load_corpus(corpus_path);
    auto queries = gccp::load_queries(queries_path);
    auto runs = runs_by_query(run_path);
    auto params = flags.params();
    std::string text;
    int status = 0;
    for (auto const& q : queries) {
        auto it = runs.find(q.id);
        if (it == runs.end()) {
            continue;
        }
        try {
            text += gccp::anchor_to_json(gccp::select_anchor(q, it->second, corpus, params)) + "\n";
        } catch (std::exception const& e) {
            std::cerr << "query " << q.id << " failed: " << e.what() << "\n";
            status = exit_partial;
        }
    }
    write_output(output, text);
    return status;
}

int cmd_score(std::string const& corpus_path, std::string const& queries_path,
              std::string const& run_path, std::string const& scorer, int levels,
              std::string const& mode, std::string const& template_path, bool order_average,
              AnchorFlags const& anchor_flags, BackendFlags const& backend_flags, int workers,
              std::string const& output)
{
    auto corpus = gccp::load_corpus(corpus_path);
    auto queries = gccp::load_queries(queries_path);
    auto runs = runs_by_query(run_path);

    auto kind = gccp::parse_scorer_kind(scorer);
    auto spec = gccp::ScorerSpec::make(kind, levels);
    spec.mode = gccp::parse_relevance_mode(mode);
    spec.order_average = order_average;
    if (!template_path.empty()) {
        spec.prompt = gccp::PromptTemplate::from_file(template_path, kind, levels);
    }
    auto selection = backend_flags.selection();
    spec.model = selection.remote.model;
    spec.validate();
    auto anchor_params = anchor_flags.params();

    std::optional<gccp::Qrels> qrels;
    if (!backend_flags.qrels.empty()) {
        qrels = gccp::load_qrels(backend_flags.qrels);
    }
    auto counter = std::make_shared<gccp::CallCounter>();
    auto backend = gccp::make_backend(selection, qrels ? &*qrels : nullptr, backend_flags.seed,
                                      counter);

    std::vector<gccp::CandidateRun> scored;
    int status = 0;
    for (auto const& q : queries) {
        auto it = runs.find(q.id);
        if (it == runs.end()) {
            continue;
        }
        try {
            std::optional<gccp::AnchorDocument> anchor;
            if (kind == gccp::ScorerKind::gccp) {
                anchor = gccp::select_anchor(q, it->second, corpus, anchor_params);
            }
            auto result = gccp::score_run(q, it->second, corpus, spec, *backend,
                                          anchor ? &*anchor : nullptr, workers);
            scored.push_back(std::move(result.run));
        } catch (std::exception const& e) {
            std::cerr << "query " << q.id << " failed: " << e.what() << "\n";
            status = exit_partial;
        }
    }
    if (auto cached = std::dynamic_pointer_cast<gccp::CachedBackend>(backend)) {
        cached->save_stats();
    }
    auto snap = counter->snapshot();
    std::cerr << "calls: " << snap.total() << " (remote " << snap.remote_calls << ", cache hits "
              << snap.cache_hits << ")\n";
    write_output(output, gccp::format_run(scored));
    return status;
}

int cmd_aggregate(std::vector<std::string> const& inputs, std::string const& method,
                  std::string const& normalize, std::vector<double> const& weights,
                  std::string const& output)
{
    if (inputs.size() < 2) {
        throw gccp::config_error("aggregate needs at least two run files");
    }
    if (!weights.empty() && weights.size() != inputs.size()) {
        throw gccp::config_error("--weights must give one weight per run file");
    }
    std::vector<std::map<std::string, gccp::CandidateRun>> components;
    for (auto const& path : inputs) {
        components.push_back(runs_by_query(path));
    }
    auto m = gccp::parse_aggregation_method(method);
    auto n = gccp::parse_normalization(normalize);

    std::vector<gccp::CandidateRun> out;
    int status = 0;
    for (auto const& [qid, first] : components.front()) {
        gccp::AggregationSpec spec{m, n, {}};
        bool complete = true;
        for (std::size_t c = 0; c < components.size(); ++c) {
            auto it = components[c].find(qid);
            if (it == components[c].end()) {
                complete = false;
                break;
            }
            spec.components.push_back({it->second, weights.empty() ? 1.0 : weights[c]});
        }
        if (!complete) {
            std::cerr << "query " << qid << " missing from some run; skipped\n";
            status = exit_partial;
            continue;
        }
        try {
            out.push_back(gccp::aggregate(spec));
        } catch (std::exception const& e) {
            std::cerr << "query " << qid << " failed: " << e.what() << "\n";
            status = exit_partial;
        }
    }
    write_output(output, gccp::format_run(out));
    return status;
}

int cmd_eval(std::string const& run_path, std::string const& qrels_path, std::size_t k,
             std::string const& gain, std::string const& json_path)
{
    auto runs = gccp::read_run(run_path);
    auto qrels = gccp::load_qrels(qrels_path);
    gccp::EvalReport report;
    try {
        report = gccp::evaluate_run(runs, qrels, k, gccp::parse_gain(gain));
    } catch (std::invalid_argument const& e) {
        std::cerr << e.what() << "\n";
        return exit_partial;
    }
    std::cout << report.to_table();
    if (!json_path.empty()) {
        write_output(json_path, report.to_json().dump(2) + "\n");
    }
    return 0;
}

int cmd_cache_stats(std::string const& path)
{
    auto stats = gccp::read_cache_stats(path);
    nlohmann::json j{{"entries", stats.entries},
                     {"total_hits", stats.total_hits},
                     {"total_misses", stats.total_misses},
                     {"last_hits", stats.last_hits},
                     {"last_misses", stats.last_misses}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zero-shot re-ranking with anchor-based contrastive scoring and post-aggregation"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the full pipeline from a JSON config");
    std::string config_path;
    std::optional<std::string> run_output;
    std::optional<std::uint64_t> run_seed;
    std::optional<int> run_workers;
    std::optional<std::string> run_cache;
    run->add_option("config", config_path, "Pipeline config file")->required();
    run->add_option("--output-dir", run_output, "Override output_dir");
    run->add_option("--seed", run_seed, "Override seed");
    run->add_option("--workers", run_workers, "Override workers");
    run->add_option("--cache", run_cache, "Override backend cache path");

    std::string corpus, queries, run_path, output;

    auto* retrieve = app.add_subcommand("retrieve", "BM25 first-stage retrieval");
    std::size_t bm25_k = 100;
    double k1 = 0.9, b = 0.4;
    retrieve->add_option("--corpus", corpus, "Corpus JSONL")->required();
    retrieve->add_option("--queries", queries, "Queries TSV")->required();
    retrieve->add_option("--k", bm25_k, "Depth")->capture_default_str();
    retrieve->add_option("--k1", k1)->capture_default_str();
    retrieve->add_option("--b", b)->capture_default_str();
    retrieve->add_option("-o,--output", output, "Run file (stdout when omitted)");

    auto* anchor = app.add_subcommand("anchor", "Build anchor documents as JSONL");
    AnchorFlags anchor_flags;
    anchor->add_option("--corpus", corpus, "Corpus JSONL")->required();
    anchor->add_option("--queries", queries, "Queries TSV")->required();
    anchor->add_option("--run", run_path, "First-stage run")->required();
    anchor->add_option("-o,--output", output, "JSONL file (stdout when omitted)");
    anchor_flags.add_to(*anchor);

    auto* score = app.add_subcommand("score", "Score a run with one scorer");
    AnchorFlags score_anchor;
    BackendFlags backend_flags;
    std::string scorer, mode = "pr", template_path;
    int levels = 5;
    int workers = 0;
    bool order_average = false;
    score->add_option("--corpus", corpus, "Corpus JSONL")->required();
    score->add_option("--queries", queries, "Queries TSV")->required();
    score->add_option("--run", run_path, "First-stage run")->required();
    score->add_option("--scorer", scorer, "qg, rg_yn, rg_s or gccp")->required();
    score->add_option("--levels", levels, "RG-S label count")->capture_default_str();
    score->add_option("--mode", mode, "RG-S relevance mode: pr or er")->capture_default_str();
    score->add_option("--template", template_path, "Prompt template file");
    score->add_flag("--order-average", order_average, "GCCP: also score swapped passages");
    score->add_option("--workers", workers, "Scoring threads (0 = all)")->capture_default_str();
    score->add_option("-o,--output", output, "Run file (stdout when omitted)");
    score_anchor.add_to(*score);
    backend_flags.add_to(*score);

    auto* agg = app.add_subcommand("aggregate", "Aggregate two or more runs");
    std::vector<std::string> inputs;
    std::string method = "linear", normalize = "minmax";
    std::vector<double> weights;
    agg->add_option("runs", inputs, "Component run files")->required();
    agg->add_option("--method", method, "linear or borda")->capture_default_str();
    agg->add_option("--normalize", normalize, "minmax or none")->capture_default_str();
    agg->add_option("--weights", weights, "One weight per run")->delimiter(',');
    agg->add_option("-o,--output", output, "Run file (stdout when omitted)");

    auto* eval = app.add_subcommand("eval", "NDCG@k of a run");
    std::size_t eval_k = 10;
    std::string gain = "linear", json_path, qrels_path;
    eval->add_option("--run", run_path, "Run file")->required();
    eval->add_option("--qrels", qrels_path, "Qrels file")->required();
    eval->add_option("--k", eval_k, "Cutoff")->capture_default_str();
    eval->add_option("--gain", gain, "linear or exponential")->capture_default_str();
    eval->add_option("--json", json_path, "Also write the report as JSON");

    auto* cache_stats = app.add_subcommand("cache-stats", "Summarize a response cache");
    std::string cache_path;
    cache_stats->add_option("cache", cache_path, "Cache JSONL file")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*run) {
            return cmd_run(config_path, run_output, run_seed, run_workers, run_cache);
        }
        if (*retrieve) {
            return cmd_retrieve(corpus, queries, bm25_k, k1, b, output);
        }
        if (*anchor) {
            return cmd_anchor(corpus, queries, run_path, anchor_flags, output);
        }
        if (*score) {
            return cmd_score(corpus, queries, run_path, scorer, levels, mode, template_path,
                             order_average, score_anchor, backend_flags, workers, output);
        }
        if (*agg) {
            return cmd_aggregate(inputs, method, normalize, weights, output);
        }
        if (*eval) {
            return cmd_eval(run_path, qrels_path, eval_k, gain, json_path);
        }
        if (*cache_stats) {
            return cmd_cache_stats(cache_path);
        }
    } catch (gccp::config_error const& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_partial;
    }
    return 0;
}
