#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "anchor.hpp"
#include "backend.hpp"
#include "corpus.hpp"
#include "run.hpp"

namespace gccp {

enum class ScorerKind { qg, rg_yn, rg_s, gccp };
enum class RelevanceMode { er, pr };

std::string to_string(ScorerKind kind);      // "QG", "RG-YN", "RG-S", "GCCP"
std::string file_stem(ScorerKind kind);      // "qg", "rg_yn", "rg_s", "gccp"
ScorerKind parse_scorer_kind(std::string const& name);
RelevanceMode parse_relevance_mode(std::string const& name);

/// Prompt text with {query}, {document}, {passage_a}, {passage_b} and
/// {max_label} placeholders, plus the label set it elicits.
struct PromptTemplate {
    std::string name;
    std::string text;
    std::vector<std::string> labels;

    [[nodiscard]] std::string render(std::map<std::string, std::string> const& values) const;

    /// Built-in template for a scorer kind; `levels` sizes the RG-S label set.
    static PromptTemplate builtin(ScorerKind kind, int levels = 5);
    /// Template text from a file, labels as for builtin().
    static PromptTemplate from_file(std::filesystem::path const& path, ScorerKind kind,
                                    int levels = 5);

    /// Throws config_error when a placeholder the kind needs is missing, or
    /// one it must not see is present, or the labels do not fit.
    void validate(ScorerKind kind, int levels) const;
};

struct ScorerSpec {
    ScorerKind kind = ScorerKind::rg_yn;
    PromptTemplate prompt = PromptTemplate::builtin(ScorerKind::rg_yn);
    int levels = 5;
    RelevanceMode mode = RelevanceMode::pr;
    /// GCCP only: also score with the passages swapped and average.
    bool order_average = false;
    std::string model;
    /// Run tag and output file stem; defaults derive from the kind.
    std::string name;

    static ScorerSpec make(ScorerKind kind, int levels = 5);
    void validate() const;
    [[nodiscard]] std::string tag() const;
    [[nodiscard]] std::string stem() const;
    [[nodiscard]] std::size_t calls_per_document() const noexcept;
};

struct ScoredCandidate {
    std::string doc_id;
    double score = 0.0;
    ScorerKind kind = ScorerKind::rg_yn;
    Usage usage;
    std::size_t calls = 0;
};

// Score arithmetic over backend outputs.

/// (1/|q|) * sum of per-token log-probabilities.
double mean_logprob(std::span<TokenLogprob const> tokens);
/// exp(a) / (exp(a) + exp(b)), computed stably.
double two_way_softmax(double a, double b) noexcept;
/// sum_k softmax(s)_k * k.
double expected_relevance(std::span<double const> logits);
/// The logit of the most relevant (last) label.
double peak_relevance(std::span<double const> logits);

// Single-document scorers. Metadata "qid"/"docid" is attached to each request.

double score_qg(Query const& query, Document const& doc, Backend& backend,
                PromptTemplate const& prompt, std::string const& model = {});
double score_rg_yn(Query const& query, Document const& doc, Backend& backend,
                   PromptTemplate const& prompt, std::string const& model = {});
double score_rg_s(Query const& query, Document const& doc, Backend& backend,
                  PromptTemplate const& prompt, int levels, RelevanceMode mode,
                  std::string const& model = {});
/// Probability that the candidate (Passage A) beats the anchor (Passage B).
double score_gccp(Query const& query, Document const& doc, AnchorDocument const& anchor,
                  Backend& backend, PromptTemplate const& prompt, std::string const& model = {},
                  bool order_average = false);

ScoredCandidate score_candidate(Query const& query, Document const& doc, ScorerSpec const& spec,
                                Backend& backend, AnchorDocument const* anchor);

struct ScoredRun {
    CandidateRun run;
    std::size_t calls = 0;
    Usage usage;
};

/// Scores every candidate independently (in parallel, up to `workers`
/// threads), then re-sorts with the global tie-break and tags the run.
/// Issues exactly calls_per_document() * n backend calls. Throws when a
/// candidate is missing from the corpus or a backend call fails.
ScoredRun score_run(Query const& query, CandidateRun const& run, Corpus const& corpus,
                    ScorerSpec const& spec, Backend& backend,
                    AnchorDocument const* anchor = nullptr, int workers = 0);

}  // namespace gccp
