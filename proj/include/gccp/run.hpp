#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gccp {

struct RunEntry {
    std::string doc_id;
    double score = 0.0;
    std::uint32_t rank = 0;  // 1-based
};

/// Ranked candidates for one query.
///
/// Normalized form: entries sorted by score descending, ties broken by prior
/// rank ascending and then doc id ascending, with ranks 1..n reassigned.
struct CandidateRun {
    std::string query_id;
    std::vector<RunEntry> entries;
    std::string tag;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
};

/// Strict weak order implementing the global tie-break. `rank` is read as the
/// prior rank.
[[nodiscard]] bool ranks_before(RunEntry const& a, RunEntry const& b) noexcept;

/// Sorts with ranks_before and reassigns ranks 1..n. Throws
/// std::invalid_argument on a duplicate doc id or a non-finite score.
void normalize(CandidateRun& run);

/// Throws std::invalid_argument unless ranks are exactly 1..n and doc ids unique.
void check_ranks(CandidateRun const& run);

/// Builds a normalized run from (doc id, score) pairs whose input order is
/// taken as the prior rank.
CandidateRun make_run(std::string query_id,
                      std::vector<std::pair<std::string, double>> scored,
                      std::string tag);

/// Reads a TREC run file ("qid Q0 docid rank score tag"). Queries are returned
/// in order of first appearance; entries within a query are ordered by rank.
std::vector<CandidateRun> read_run(std::filesystem::path const& path);

/// Writes runs in the given order. Each run is normalized first and scores are
/// printed with six decimals.
void write_run(std::span<CandidateRun const> runs, std::filesystem::path const& path);
void write_run(CandidateRun const& run, std::filesystem::path const& path);

std::string format_run(std::span<CandidateRun const> runs);

}  // namespace gccp
