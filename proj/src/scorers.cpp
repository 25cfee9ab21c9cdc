#include "gccp/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "gccp/error.hpp"

namespace gccp {

std::string to_string(ScorerKind kind)
{
    switch (kind) {
    case ScorerKind::qg: return "QG";
    case ScorerKind::rg_yn: return "RG-YN";
    case ScorerKind::rg_s: return "RG-S";
    case ScorerKind::gccp: return "GCCP";
    }
    return "?";
}

std::string file_stem(ScorerKind kind)
{
    switch (kind) {
    case ScorerKind::qg: return "qg";
    case ScorerKind::rg_yn: return "rg_yn";
    case ScorerKind::rg_s: return "rg_s";
    case ScorerKind::gccp: return "gccp";
    }
    return "?";
}

ScorerKind parse_scorer_kind(std::string const& name)
{
    std::string n;
    for (char c : name) {
        n.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (n == "qg") {
        return ScorerKind::qg;
    }
    if (n == "rg_yn" || n == "yn") {
        return ScorerKind::rg_yn;
    }
    if (n == "rg_s" || n == "rgs") {
        return ScorerKind::rg_s;
    }
    if (n == "gccp") {
        return ScorerKind::gccp;
    }
    throw config_error("unknown scorer \"" + name + "\"");
}

RelevanceMode parse_relevance_mode(std::string const& name)
{
    if (name == "pr" || name == "PR") {
        return RelevanceMode::pr;
    }
    if (name == "er" || name == "ER") {
        return RelevanceMode::er;
    }
    throw config_error("unknown relevance mode \"" + name + "\"");
}

// Prompt templates

namespace {

constexpr char const* qg_template =
    "Passage: {document}\n"
    "Please write a question based on this passage.\n"
    "Question: ";

constexpr char const* rg_yn_template =
    "Passage: {document}\n"
    "Query: {query}\n"
    "Does the passage answer the query? Answer 'Yes' or 'No'\n"
    "Answer: ";

constexpr char const* rg_s_template =
    "Passage: {document}\n"
    "Query: {query}\n"
    "From a scale of 0 to {max_label}, judge the relevance between the query and the passage. "
    "Answer with a single integer.\n"
    "Relevance: ";

constexpr char const* gccp_template =
    "Given a query, which of the following two passages is more relevant to the query?\n\n"
    "Query: {query}\n\n"
    "Passage A: {passage_a}\n\n"
    "Passage B: {passage_b}\n\n"
    "Output Passage A or Passage B: ";

std::vector<std::string> labels_for(ScorerKind kind, int levels)
{
    switch (kind) {
    case ScorerKind::qg: return {};
    case ScorerKind::rg_yn: return {"Yes", "No"};
    case ScorerKind::rg_s: {
        std::vector<std::string> labels;
        for (int k = 0; k < levels; ++k) {
            labels.push_back(std::to_string(k));
        }
        return labels;
    }
    case ScorerKind::gccp: return {"Passage A", "Passage B"};
    }
    return {};
}

bool has(std::string const& text, char const* placeholder)
{
    return text.find(placeholder) != std::string::npos;
}

}  // namespace

std::string PromptTemplate::render(std::map<std::string, std::string> const& values) const
{
    std::string out;
    out.reserve(text.size() + 256);
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            auto close = text.find('}', i);
            if (close != std::string::npos) {
                auto it = values.find(text.substr(i + 1, close - i - 1));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(text[i++]);
    }
    return out;
}

PromptTemplate PromptTemplate::builtin(ScorerKind kind, int levels)
{
    char const* text = nullptr;
    switch (kind) {
    case ScorerKind::qg: text = qg_template; break;
    case ScorerKind::rg_yn: text = rg_yn_template; break;
    case ScorerKind::rg_s: text = rg_s_template; break;
    case ScorerKind::gccp: text = gccp_template; break;
    }
    return {file_stem(kind), text, labels_for(kind, levels)};
}

PromptTemplate PromptTemplate::from_file(std::filesystem::path const& path, ScorerKind kind,
                                         int levels)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw config_error("cannot open template " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    auto text = ss.str();
    if (!text.empty() && text.back() == '\n') {
        text.pop_back();
    }
    PromptTemplate t{path.stem().string(), std::move(text), labels_for(kind, levels)};
    t.validate(kind, levels);
    return t;
}

void PromptTemplate::validate(ScorerKind kind, int levels) const
{
    auto require = [&](char const* p) {
        if (!has(text, p)) {
            throw config_error("template \"" + name + "\" for " + to_string(kind) + " lacks " + p);
        }
    };
    auto forbid = [&](char const* p) {
        if (has(text, p)) {
            throw config_error("template \"" + name + "\" for " + to_string(kind)
                               + " must not use " + p);
        }
    };
    switch (kind) {
    case ScorerKind::qg:
        require("{document}");
        forbid("{query}");
        forbid("{passage_a}");
        forbid("{passage_b}");
        break;
    case ScorerKind::rg_yn:
    case ScorerKind::rg_s:
        require("{query}");
        require("{document}");
        forbid("{passage_a}");
        forbid("{passage_b}");
        break;
    case ScorerKind::gccp:
        require("{query}");
        require("{passage_a}");
        require("{passage_b}");
        forbid("{document}");
        break;
    }
    auto expected = kind == ScorerKind::rg_s ? static_cast<std::size_t>(levels)
                                             : labels_for(kind, levels).size();
    if (labels.size() != expected) {
        throw config_error("template \"" + name + "\" has the wrong number of labels");
    }
}

ScorerSpec ScorerSpec::make(ScorerKind kind, int levels)
{
    ScorerSpec spec;
    spec.kind = kind;
    spec.levels = levels;
    spec.prompt = PromptTemplate::builtin(kind, levels);
    return spec;
}

void ScorerSpec::validate() const
{
    if (kind == ScorerKind::rg_s && levels < 2) {
        throw config_error("RG-S needs at least two relevance levels");
    }
    if (order_average && kind != ScorerKind::gccp) {
        throw config_error("order averaging applies to GCCP only");
    }
    prompt.validate(kind, levels);
}

std::string ScorerSpec::tag() const { return name.empty() ? to_string(kind) : name; }

std::string ScorerSpec::stem() const { return name.empty() ? file_stem(kind) : name; }

std::size_t ScorerSpec::calls_per_document() const noexcept
{
    return (kind == ScorerKind::gccp && order_average) ? 2 : 1;
}

// Arithmetic

double mean_logprob(std::span<TokenLogprob const> tokens)
{
    if (tokens.empty()) {
        throw std::invalid_argument("mean log-probability of zero tokens");
    }
    double sum = 0.0;
    for (auto const& t : tokens) {
        sum += t.logprob;
    }
    return sum / static_cast<double>(tokens.size());
}

double two_way_softmax(double a, double b) noexcept
{
    // 1 / (1 + exp(b - a)) without overflow in either direction.
    double d = b - a;
    if (d > 0.0) {
        double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

double expected_relevance(std::span<double const> logits)
{
    if (logits.empty()) {
        throw std::invalid_argument("expected relevance of zero labels");
    }
    double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        double p = std::exp(logits[k] - top);
        z += p;
        acc += p * static_cast<double>(k);
    }
    return acc / z;
}

double peak_relevance(std::span<double const> logits)
{
    if (logits.empty()) {
        throw std::invalid_argument("peak relevance of zero labels");
    }
    return logits.back();
}

// Scorers

namespace {

struct Outcome {
    double score = 0.0;
    Usage usage;
    std::size_t calls = 0;
};

ScoreRequest labels_request(std::string prompt, std::vector<std::string> labels,
                            Query const& query, Document const& doc, std::string const& model,
                            bool descending)
{
    ScoreRequest r;
    r.prompt = std::move(prompt);
    r.mode = ScoreMode::labels;
    r.labels = std::move(labels);
    r.model = model;
    r.metadata = {{"qid", query.id},
                  {"docid", doc.id},
                  {"label_order", descending ? "descending" : "ascending"}};
    return r;
}

std::vector<double> logits_of(ScoreResponse const& response, std::size_t expected)
{
    if (response.label_logits.size() < expected) {
        throw capability_error("backend returned " + std::to_string(response.label_logits.size())
                               + " label scores, expected " + std::to_string(expected));
    }
    for (double v : response.label_logits) {
        if (!std::isfinite(v)) {
            throw capability_error("backend returned a non-finite label score");
        }
    }
    return response.label_logits;
}

Outcome run_qg(Query const& query, Document const& doc, Backend& backend,
               PromptTemplate const& prompt, std::string const& model)
{
    ScoreRequest r;
    r.prompt = prompt.render({{"document", doc.text}});
    r.mode = ScoreMode::continuation;
    r.continuation = query.text;
    r.model = model;
    r.metadata = {{"qid", query.id}, {"docid", doc.id}};
    auto response = backend.score(r);
    if (response.tokens.empty()) {
        throw backend_error("backend returned no query tokens");
    }
    return {mean_logprob(response.tokens), response.usage, 1};
}

Outcome run_rg_yn(Query const& query, Document const& doc, Backend& backend,
                  PromptTemplate const& prompt, std::string const& model)
{
    auto r = labels_request(prompt.render({{"query", query.text}, {"document", doc.text}}),
                            prompt.labels, query, doc, model, true);
    auto response = backend.score(r);
    auto l = logits_of(response, 2);
    return {two_way_softmax(l[0], l[1]), response.usage, 1};
}

Outcome run_rg_s(Query const& query, Document const& doc, Backend& backend,
                 PromptTemplate const& prompt, int levels, RelevanceMode mode,
                 std::string const& model)
{
    auto r = labels_request(prompt.render({{"query", query.text},
                                           {"document", doc.text},
                                           {"max_label", std::to_string(levels - 1)}}),
                            prompt.labels, query, doc, model, false);
    auto response = backend.score(r);
    auto l = logits_of(response, static_cast<std::size_t>(levels));
    l.resize(static_cast<std::size_t>(levels));
    double s = mode == RelevanceMode::er ? expected_relevance(l) : peak_relevance(l);
    return {s, response.usage, 1};
}

Outcome run_gccp(Query const& query, Document const& doc, AnchorDocument const& anchor,
                 Backend& backend, PromptTemplate const& prompt, std::string const& model,
                 bool order_average)
{
    auto forward = labels_request(prompt.render({{"query", query.text},
                                                 {"passage_a", doc.text},
                                                 {"passage_b", anchor.text}}),
                                  prompt.labels, query, doc, model, true);
    auto response = backend.score(forward);
    auto l = logits_of(response, 2);
    Outcome out{two_way_softmax(l[0], l[1]), response.usage, 1};
    if (order_average) {
        auto swapped = labels_request(prompt.render({{"query", query.text},
                                                     {"passage_a", anchor.text},
                                                     {"passage_b", doc.text}}),
                                      prompt.labels, query, doc, model, false);
        auto second = backend.score(swapped);
        auto m = logits_of(second, 2);
        out.score = 0.5 * (out.score + two_way_softmax(m[1], m[0]));
        out.usage += second.usage;
        out.calls = 2;
    }
    return out;
}

}  // namespace

double score_qg(Query const& query, Document const& doc, Backend& backend,
                PromptTemplate const& prompt, std::string const& model)
{
    return run_qg(query, doc, backend, prompt, model).score;
}

double score_rg_yn(Query const& query, Document const& doc, Backend& backend,
                   PromptTemplate const& prompt, std::string const& model)
{
    return run_rg_yn(query, doc, backend, prompt, model).score;
}

double score_rg_s(Query const& query, Document const& doc, Backend& backend,
                  PromptTemplate const& prompt, int levels, RelevanceMode mode,
                  std::string const& model)
{
    return run_rg_s(query, doc, backend, prompt, levels, mode, model).score;
}

double score_gccp(Query const& query, Document const& doc, AnchorDocument const& anchor,
                  Backend& backend, PromptTemplate const& prompt, std::string const& model,
                  bool order_average)
{
    return run_gccp(query, doc, anchor, backend, prompt, model, order_average).score;
}

ScoredCandidate score_candidate(Query const& query, Document const& doc, ScorerSpec const& spec,
                                Backend& backend, AnchorDocument const* anchor)
{
    Outcome o;
    switch (spec.kind) {
    case ScorerKind::qg: o = run_qg(query, doc, backend, spec.prompt, spec.model); break;
    case ScorerKind::rg_yn: o = run_rg_yn(query, doc, backend, spec.prompt, spec.model); break;
    case ScorerKind::rg_s:
        o = run_rg_s(query, doc, backend, spec.prompt, spec.levels, spec.mode, spec.model);
        break;
    case ScorerKind::gccp:
        if (anchor == nullptr) {
            throw std::invalid_argument("GCCP scoring needs an anchor document");
        }
        o = run_gccp(query, doc, *anchor, backend, spec.prompt, spec.model, spec.order_average);
        break;
    }
    if (!std::isfinite(o.score)) {
        throw backend_error("non-finite score for " + doc.id);
    }
    return {doc.id, o.score, spec.kind, o.usage, o.calls};
}

ScoredRun score_run(Query const& query, CandidateRun const& run, Corpus const& corpus,
                    ScorerSpec const& spec, Backend& backend, AnchorDocument const* anchor,
                    int workers)
{
    spec.validate();
    if (spec.kind == ScorerKind::gccp && anchor == nullptr) {
        throw std::invalid_argument("GCCP scoring needs an anchor document");
    }
    std::vector<Document const*> docs;
    docs.reserve(run.size());
    for (auto const& e : run.entries) {
        auto it = corpus.find(e.doc_id);
        if (it == corpus.end()) {
            throw std::invalid_argument("candidate " + e.doc_id + " is not in the corpus");
        }
        docs.push_back(&it->second);
    }

    std::vector<ScoredCandidate> scored(docs.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto n = static_cast<std::int64_t>(docs.size());
    int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        try {
            scored[k] = score_candidate(query, *docs[k], spec, backend, anchor);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ScoredRun out;
    out.run.query_id = run.query_id;
    out.run.tag = spec.tag();
    out.run.entries.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        out.run.entries.push_back({scored[i].doc_id, scored[i].score, run.entries[i].rank});
        out.calls += scored[i].calls;
        out.usage += scored[i].usage;
    }
    normalize(out.run);
    return out;
}

}  // namespace gccp
