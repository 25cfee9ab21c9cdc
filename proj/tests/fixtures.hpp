#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "json.hpp"

#include "gccp/run.hpp"
#include "support.hpp"

namespace test {

/// Pipeline config over the 8-document toy collection.
inline nlohmann::json toy_config(std::filesystem::path const& output_dir)
{
    auto toy = data_dir() / "toy";
    return {{"corpus", (toy / "corpus.jsonl").string()},
            {"queries", (toy / "queries.tsv").string()},
            {"qrels", (toy / "qrels.txt").string()},
            {"output_dir", output_dir.string()},
            {"seed", 7},
            {"first_stage", {{"bm25", {{"k", 100}}}}},
            {"anchor", {{"m", 8}, {"z", 5}, {"strategy", "spectral"}}},
            {"backend", {{"type", "oracle"}, {"sigma", 0.0}}},
            {"scorers", nlohmann::json::array({{{"kind", "rg-s"}}})},
            {"aggregation", {{"method", "linear"}, {"normalize", "minmax"}}},
            {"eval", {{"k", 10}}}};
}

/// One query over `n` generated documents with a first-stage run listing all
/// of them. Documents are several sentences long so the anchor has a graph.
struct WideFixture {
    std::filesystem::path corpus;
    std::filesystem::path queries;
    std::filesystem::path run;
};

inline WideFixture write_wide_fixture(TempDir const& dir, std::size_t n, std::uint64_t seed = 5)
{
    static char const* const words[] = {"river", "stone", "bridge", "water", "flow",   "bank",
                                        "north", "city",  "road",   "market", "trade", "boat",
                                        "light", "storm", "harbor", "island", "ferry", "tide"};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(words) - 1);
    std::string corpus;
    std::string run;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (int s = 0; s < 4; ++s) {
            std::string sentence;
            for (int w = 0; w < 8; ++w) {
                sentence += (w == 0 ? "" : " ") + std::string(words[pick(rng)]);
            }
            sentence[0] = static_cast<char>(std::toupper(sentence[0]));
            text += (s == 0 ? "" : " ") + sentence + ".";
        }
        auto id = "doc" + std::to_string(i);
        corpus += nlohmann::json{{"id", id}, {"contents", text}}.dump() + "\n";
        run += "q1 Q0 " + id + " " + std::to_string(i + 1) + " " +
               std::to_string(static_cast<double>(n - i)) + " BM25\n";
    }
    return {dir.write("wide/corpus.jsonl", corpus),
            dir.write("wide/queries.tsv", "q1\tharbor ferry crossing to the island\n"),
            dir.write("wide/first_stage.run", run)};
}

inline nlohmann::json wide_config(WideFixture const& f, std::filesystem::path const& output_dir,
                                  nlohmann::json const& scorers)
{
    return {{"corpus", f.corpus.string()},
            {"queries", f.queries.string()},
            {"output_dir", output_dir.string()},
            {"first_stage", {{"run", f.run.string()}}},
            {"backend", {{"type", "hash"}}},
            {"scorers", scorers}};
}

}  // namespace test
