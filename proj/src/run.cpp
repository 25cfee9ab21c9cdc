#include "gccp/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "gccp/error.hpp"
#include "gccp/text.hpp"

namespace gccp {

bool ranks_before(RunEntry const& a, RunEntry const& b) noexcept
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.rank != b.rank) {
        return a.rank < b.rank;
    }
    return a.doc_id < b.doc_id;
}

void normalize(CandidateRun& run)
{
    std::unordered_set<std::string> seen;
    for (auto const& e : run.entries) {
        if (!std::isfinite(e.score)) {
            throw std::invalid_argument("non-finite score for " + e.doc_id);
        }
        if (!seen.insert(e.doc_id).second) {
            throw std::invalid_argument("duplicate doc id " + e.doc_id + " in run for query "
                                        + run.query_id);
        }
    }
    std::sort(run.entries.begin(), run.entries.end(), ranks_before);
    for (std::size_t i = 0; i < run.entries.size(); ++i) {
        run.entries[i].rank = static_cast<std::uint32_t>(i + 1);
    }
}

void check_ranks(CandidateRun const& run)
{
    std::vector<bool> seen(run.entries.size(), false);
    std::unordered_set<std::string> ids;
    for (auto const& e : run.entries) {
        if (e.rank < 1 || e.rank > run.entries.size() || seen[e.rank - 1]) {
            throw std::invalid_argument("ranks of query " + run.query_id
                                        + " are not contiguous from 1");
        }
        seen[e.rank - 1] = true;
        if (!ids.insert(e.doc_id).second) {
            throw std::invalid_argument("duplicate doc id " + e.doc_id);
        }
    }
}

CandidateRun make_run(std::string query_id, std::vector<std::pair<std::string, double>> scored,
                      std::string tag)
{
    CandidateRun run{std::move(query_id), {}, std::move(tag)};
    run.entries.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        run.entries.push_back(
            {std::move(scored[i].first), scored[i].second, static_cast<std::uint32_t>(i + 1)});
    }
    normalize(run);
    return run;
}

std::vector<CandidateRun> read_run(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open " + path.string());
    }
    std::vector<CandidateRun> runs;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = split_whitespace(line);
        if (f.empty()) {
            continue;
        }
        if (f.size() != 6) {
            throw parse_error("expected \"qid Q0 docid rank score tag\"", lineno);
        }
        RunEntry entry;
        entry.doc_id = f[2];
        {
            auto const& s = f[3];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), entry.rank);
            if (ec != std::errc{} || p != s.data() + s.size() || entry.rank == 0) {
                throw parse_error("unparsable rank \"" + s + "\"", lineno);
            }
        }
        {
            auto const& s = f[4];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), entry.score);
            if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(entry.score)) {
                throw parse_error("unparsable score \"" + s + "\"", lineno);
            }
        }
        auto [it, inserted] = index.emplace(f[0], runs.size());
        if (inserted) {
            runs.push_back({f[0], {}, f[5]});
        }
        runs[it->second].entries.push_back(std::move(entry));
    }
    for (auto& run : runs) {
        try {
            check_ranks(run);
        } catch (std::invalid_argument const& e) {
            throw parse_error(e.what());
        }
        std::sort(run.entries.begin(), run.entries.end(),
                  [](RunEntry const& a, RunEntry const& b) { return a.rank < b.rank; });
    }
    return runs;
}

std::string format_run(std::span<CandidateRun const> runs)
{
    std::string out;
    char score[64];
    for (auto run : runs) {
        normalize(run);
        auto const& tag = run.tag.empty() ? std::string("run") : run.tag;
        for (auto const& e : run.entries) {
            std::snprintf(score, sizeof score, "%.6f", e.score);
            out += run.query_id;
            out += " Q0 ";
            out += e.doc_id;
            out += ' ';
            out += std::to_string(e.rank);
            out += ' ';
            out += score;
            out += ' ';
            out += tag;
            out += '\n';
        }
    }
    return out;
}

void write_run(std::span<CandidateRun const> runs, std::filesystem::path const& path)
{
    auto text = format_run(runs);
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void write_run(CandidateRun const& run, std::filesystem::path const& path)
{
    write_run(std::span<CandidateRun const>(&run, 1), path);
}

}  // namespace gccp
