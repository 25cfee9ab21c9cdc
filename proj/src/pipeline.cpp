#include "gccp/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include <omp.h>

#include "gccp/cache.hpp"
#include "gccp/error.hpp"
#include "gccp/mock_backends.hpp"
#include "gccp/text.hpp"

namespace gccp {

BackendKind parse_backend_kind(std::string const& name)
{
    if (name == "hash" || name == "hash-mock") {
        return BackendKind::hash;
    }
    if (name == "oracle" || name == "oracle-mock") {
        return BackendKind::oracle;
    }
    if (name == "remote") {
        return BackendKind::remote;
    }
    throw config_error("unknown backend \"" + name + "\"");
}

namespace {

std::filesystem::path resolve(std::filesystem::path const& base, std::string const& p)
{
    if (p.empty()) {
        return {};
    }
    std::filesystem::path path(p);
    return (path.is_absolute() || base.empty()) ? path : base / path;
}

template <typename T>
T get_or(nlohmann::json const& j, char const* key, T fallback)
{
    if (!j.is_object() || !j.contains(key) || j[key].is_null()) {
        return fallback;
    }
    try {
        return j[key].get<T>();
    } catch (nlohmann::json::exception const& e) {
        throw config_error(std::string("config field \"") + key + "\": " + e.what());
    }
}

std::string iso_time(std::chrono::system_clock::time_point t)
{
    auto tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(std::filesystem::path const& path, std::string const& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(nlohmann::json const& j, std::filesystem::path const& base)
{
    if (!j.is_object()) {
        throw config_error("pipeline config must be a JSON object");
    }
    PipelineConfig c;
    c.corpus = resolve(base, get_or<std::string>(j, "corpus", ""));
    c.queries = resolve(base, get_or<std::string>(j, "queries", ""));
    c.qrels = resolve(base, get_or<std::string>(j, "qrels", ""));
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.workers = get_or<int>(j, "workers", 1);
    c.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "out"));

    if (j.contains("first_stage")) {
        auto const& fs = j["first_stage"];
        if (fs.contains("run")) {
            c.first_stage_run = resolve(base, get_or<std::string>(fs, "run", ""));
        } else if (fs.contains("bm25")) {
            auto const& b = fs["bm25"];
            c.bm25_k = get_or<std::size_t>(b, "k", c.bm25_k);
            c.bm25.k1 = get_or<double>(b, "k1", c.bm25.k1);
            c.bm25.b = get_or<double>(b, "b", c.bm25.b);
        } else {
            throw config_error("first_stage needs \"run\" or \"bm25\"");
        }
    }

    c.anchor.seed = c.seed;
    if (j.contains("anchor")) {
        auto const& a = j["anchor"];
        c.anchor.m = get_or<std::size_t>(a, "m", c.anchor.m);
        c.anchor.z = get_or<std::size_t>(a, "z", c.anchor.z);
        c.anchor.theta = get_or<double>(a, "theta", c.anchor.theta);
        c.anchor.strategy = parse_anchor_strategy(get_or<std::string>(a, "strategy", "spectral"));
        c.anchor.seed = get_or<std::uint64_t>(a, "seed", c.seed);
        c.anchor.segmenter.min_tokens =
            get_or<std::size_t>(a, "min_sentence_tokens", c.anchor.segmenter.min_tokens);
        auto idf = get_or<std::string>(a, "idf_source", "sentences");
        if (idf == "sentences") {
            c.anchor.idf_source = IdfSource::sentences;
        } else if (idf == "documents") {
            c.anchor.idf_source = IdfSource::documents;
        } else {
            throw config_error("unknown idf_source \"" + idf + "\"");
        }
        if (auto p = get_or<std::string>(a, "abbreviations", ""); !p.empty()) {
            c.anchor.segmenter.load_abbreviations(resolve(base, p).string());
        }
        if (auto p = get_or<std::string>(a, "stopwords", ""); !p.empty()) {
            for (auto const& w : read_word_list(resolve(base, p).string())) {
                c.anchor.tokenizer.stopwords.insert(to_lower(w));
            }
        }
    }

    std::string model;
    if (j.contains("backend")) {
        auto const& b = j["backend"];
        c.backend.kind = parse_backend_kind(get_or<std::string>(b, "type", "hash"));
        c.backend.oracle_sigma = get_or<double>(b, "sigma", 0.0);
        c.backend.cache = resolve(base, get_or<std::string>(b, "cache", ""));
        if (b.contains("remote")) {
            gccp::from_json(b["remote"], c.backend.remote);
        }
        model = c.backend.remote.model;
    }
    model = get_or<std::string>(j, "model", model);

    if (j.contains("scorers")) {
        for (auto const& s : j["scorers"]) {
            auto kind = parse_scorer_kind(get_or<std::string>(s, "kind", ""));
            auto spec = ScorerSpec::make(kind, get_or<int>(s, "levels", 5));
            spec.mode = parse_relevance_mode(get_or<std::string>(s, "mode", "pr"));
            spec.order_average = get_or<bool>(s, "order_average", false);
            spec.name = get_or<std::string>(s, "name", "");
            spec.model = get_or<std::string>(s, "model", model);
            if (auto t = get_or<std::string>(s, "template", ""); !t.empty()) {
                spec.prompt = PromptTemplate::from_file(resolve(base, t), kind, spec.levels);
            }
            c.scorers.push_back(std::move(spec));
        }
    }

    if (j.contains("aggregation")) {
        auto const& a = j["aggregation"];
        c.aggregation = parse_aggregation_method(get_or<std::string>(a, "method", "linear"));
        c.normalization = parse_normalization(get_or<std::string>(a, "normalize", "minmax"));
        c.weights = get_or<std::vector<double>>(a, "weights", {});
    }
    if (j.contains("eval")) {
        c.eval_k = get_or<std::size_t>(j["eval"], "k", c.eval_k);
        c.gain = parse_gain(get_or<std::string>(j["eval"], "gain", "linear"));
    }
    if (j.contains("cost")) {
        c.cost.prompt_per_1k = get_or<double>(j["cost"], "prompt_per_1k", c.cost.prompt_per_1k);
        c.cost.generated_per_1k =
            get_or<double>(j["cost"], "generated_per_1k", c.cost.generated_per_1k);
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (nlohmann::json::parse_error const& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const
{
    if (corpus.empty() || queries.empty()) {
        throw config_error("config needs \"corpus\" and \"queries\"");
    }
    if (anchor.m < 1 || anchor.z < 1) {
        throw config_error("anchor m and z must be >= 1");
    }
    if (!(anchor.theta >= 0.0 && anchor.theta < 1.0)) {
        throw config_error("anchor theta must lie in [0, 1)");
    }
    if (scorers.empty()) {
        throw config_error("config needs at least one scorer");
    }
    std::set<std::string> stems;
    for (auto const& s : scorers) {
        s.validate();
        if (!stems.insert(s.stem()).second || s.stem() == "aggregated") {
            throw config_error("duplicate scorer name \"" + s.stem() + "\"; set \"name\"");
        }
    }
    if (!weights.empty() && weights.size() != scorers.size()) {
        throw config_error("aggregation weights must match the number of scorers");
    }
    if (workers < 1) {
        throw config_error("workers must be >= 1");
    }
    if (eval_k < 1) {
        throw config_error("eval k must be >= 1");
    }
    if (bm25_k < 1) {
        throw config_error("bm25 k must be >= 1");
    }
    if (backend.kind == BackendKind::oracle && qrels.empty()) {
        throw config_error("the oracle backend needs qrels");
    }
    if (backend.kind == BackendKind::remote) {
        backend.remote.validate();
    }
}

std::shared_ptr<Backend> make_backend(BackendSelection const& selection, Qrels const* qrels,
                                      std::uint64_t seed, std::shared_ptr<CallCounter> counter)
{
    std::shared_ptr<Backend> inner;
    switch (selection.kind) {
    case BackendKind::hash: inner = std::make_shared<HashMockBackend>(); break;
    case BackendKind::oracle:
        if (qrels == nullptr) {
            throw config_error("the oracle backend needs qrels");
        }
        inner = std::make_shared<OracleMockBackend>(*qrels, selection.oracle_sigma, seed);
        break;
    case BackendKind::remote: inner = std::make_shared<RemoteBackend>(selection.remote); break;
    }
    if (!selection.cache.empty()) {
        return std::make_shared<CachedBackend>(std::move(inner), selection.cache, std::move(counter));
    }
    return std::make_shared<MeteredBackend>(std::move(inner), std::move(counter));
}

PipelineResult run_pipeline(PipelineConfig const& config)
{
    std::optional<Qrels> qrels;
    if (!config.qrels.empty()) {
        qrels = load_qrels(config.qrels);
    }
    auto counter = std::make_shared<CallCounter>();
    auto backend = make_backend(config.backend, qrels ? &*qrels : nullptr, config.seed, counter);
    auto result = run_pipeline(config, backend, counter);
    if (auto cached = std::dynamic_pointer_cast<CachedBackend>(backend)) {
        cached->save_stats();
    }
    return result;
}

namespace {

struct QueryOutcome {
    bool ok = false;
    std::string error;
    AnchorDocument anchor;
    std::vector<CandidateRun> runs;  // one per scorer
    CandidateRun aggregated;
    std::vector<CallTraceEntry> trace;
};

}  // namespace

PipelineResult run_pipeline(PipelineConfig const& config, std::shared_ptr<Backend> backend,
                            std::shared_ptr<CallCounter> counter)
{
    config.validate();
    auto started = std::chrono::system_clock::now();
    auto corpus = load_corpus(config.corpus);
    auto queries = load_queries(config.queries);
    std::optional<Qrels> qrels;
    if (!config.qrels.empty()) {
        qrels = load_qrels(config.qrels);
    }

    std::map<std::string, CandidateRun> first_stage;
    if (!config.first_stage_run.empty()) {
        for (auto& run : read_run(config.first_stage_run)) {
            auto id = run.query_id;
            first_stage.emplace(id, std::move(run));
        }
    } else {
        Bm25Index index(corpus, config.bm25);
        for (auto const& q : queries) {
            first_stage.emplace(q.id, bm25_retrieve(q, index, config.bm25_k));
        }
    }

    std::vector<QueryOutcome> outcomes(queries.size());
    auto n = static_cast<std::int64_t>(queries.size());
    // Nested regions are off, so with several query workers each query scores serially.
    int inner_workers = config.workers > 1 ? 1 : 0;
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
    for (std::int64_t qi = 0; qi < n; ++qi) {
        auto const& query = queries[static_cast<std::size_t>(qi)];
        auto& out = outcomes[static_cast<std::size_t>(qi)];
        try {
            auto it = first_stage.find(query.id);
            if (it == first_stage.end() || it->second.empty()) {
                throw std::invalid_argument("no first-stage candidates for query " + query.id);
            }
            auto const& candidates = it->second;
            out.anchor = select_anchor(query, candidates, corpus, config.anchor);
            AggregationSpec agg{config.aggregation, config.normalization, {}};
            for (std::size_t s = 0; s < config.scorers.size(); ++s) {
                auto const& spec = config.scorers[s];
                auto scored = score_run(query, candidates, corpus, spec, *backend, &out.anchor,
                                        inner_workers);
                out.trace.push_back(
                    {query.id, spec.tag(), candidates.size(), scored.calls, scored.usage});
                double w = config.weights.empty() ? 1.0 : config.weights[s];
                agg.components.push_back({scored.run, w});
                out.runs.push_back(std::move(scored.run));
            }
            if (agg.components.size() >= 2) {
                out.aggregated = aggregate(agg);
            } else {
                out.aggregated = out.runs.front();
            }
            out.ok = true;
        } catch (std::exception const& e) {
            out.error = e.what();
        }
    }

    PipelineResult result;
    for (auto const& spec : config.scorers) {
        result.scorer_stems.push_back(spec.stem());
    }
    result.scorer_runs.resize(config.scorers.size());
    for (std::size_t qi = 0; qi < outcomes.size(); ++qi) {
        auto& out = outcomes[qi];
        if (!out.ok) {
            result.failures.push_back({queries[qi].id, out.error});
            continue;
        }
        for (std::size_t s = 0; s < out.runs.size(); ++s) {
            result.scorer_runs[s].push_back(std::move(out.runs[s]));
        }
        result.aggregated.push_back(std::move(out.aggregated));
        result.anchors.push_back(std::move(out.anchor));
        result.trace.insert(result.trace.end(), out.trace.begin(), out.trace.end());
    }

    std::map<std::string, std::size_t> per_doc;
    for (auto const& spec : config.scorers) {
        per_doc[spec.tag()] = spec.calls_per_document();
    }
    auto accounting = count_calls(result.trace, counter->snapshot(), per_doc);
    double cost = estimate_cost(accounting.remote_usage.prompt_tokens,
                                accounting.remote_usage.completion_tokens, config.cost);

    nlohmann::json report;
    report["queries"] = queries.size();
    report["succeeded"] = result.aggregated.size();
    auto failures = nlohmann::json::array();
    for (auto const& f : result.failures) {
        failures.push_back({{"query_id", f.query_id}, {"error", f.message}});
    }
    report["failures"] = failures;
    report["anchor"] = {{"strategy", to_string(config.anchor.strategy)},
                        {"m", config.anchor.m},
                        {"z", config.anchor.z},
                        {"theta", config.anchor.theta},
                        {"fallbacks", std::count_if(result.anchors.begin(), result.anchors.end(),
                                                    [](auto const& a) { return a.fallback; })}};
    report["backend"] = backend->name();
    report["seed"] = config.seed;

    if (qrels && !result.aggregated.empty()) {
        try {
            auto eval = evaluate_run(result.aggregated, *qrels, config.eval_k, config.gain);
            eval.calls = accounting;
            eval.cost_model = config.cost;
            eval.estimated_cost = cost;
            report["evaluation"] = eval.to_json();
            nlohmann::json per_scorer;
            for (std::size_t s = 0; s < config.scorers.size(); ++s) {
                per_scorer[result.scorer_stems[s]] =
                    evaluate_run(result.scorer_runs[s], *qrels, config.eval_k, config.gain).mean;
            }
            report["per_scorer_mean"] = per_scorer;
            result.report = std::move(eval);
        } catch (std::invalid_argument const& e) {
            report["evaluation_error"] = e.what();
        }
    }
    if (!result.report) {
        EvalReport calls_only;
        calls_only.calls = accounting;
        calls_only.cost_model = config.cost;
        calls_only.estimated_cost = cost;
        auto j = calls_only.to_json();
        report["calls"] = j["calls"];
        report["tokens"] = j["tokens"];
        report["estimated_cost"] = cost;
    }

    auto finished = std::chrono::system_clock::now();
    report["timing"] = {
        {"started_at", iso_time(started)},
        {"finished_at", iso_time(finished)},
        {"elapsed_seconds", std::chrono::duration<double>(finished - started).count()}};
    result.report_json = report;

    auto const& dir = config.output_dir;
    for (std::size_t s = 0; s < config.scorers.size(); ++s) {
        write_run(result.scorer_runs[s], dir / "runs" / (result.scorer_stems[s] + ".run"));
    }
    write_run(result.aggregated, dir / "runs" / "aggregated.run");
    std::string anchors;
    for (auto const& a : result.anchors) {
        anchors += anchor_to_json(a) + "\n";
    }
    write_text(dir / "anchors.jsonl", anchors);
    write_text(dir / "report.json", report.dump(2) + "\n");
    return result;
}

}  // namespace gccp
