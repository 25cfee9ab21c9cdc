#include <random>
#include <set>

#include "doctest.h"

#include "json.hpp"

#include "anchor_oracle.hpp"
#include "gccp/anchor.hpp"
#include "gccp/corpus.hpp"
#include "gccp/error.hpp"
#include "gccp/run.hpp"
#include "support.hpp"

using namespace gccp;

namespace {

std::vector<Sentence> numbered(std::size_t n)
{
    std::vector<Sentence> s;
    for (std::uint32_t i = 0; i < n; ++i) {
        s.push_back({"sentence " + std::to_string(i), "d" + std::to_string(i / 4), i / 4 + 1, i % 4});
    }
    return s;
}

struct Theme {
    Corpus corpus = load_corpus(test::data_dir() / "theme" / "corpus.jsonl");
    Query query = load_queries(test::data_dir() / "theme" / "queries.tsv").at(0);
    CandidateRun run = read_run(test::data_dir() / "theme" / "first_stage.run").at(0);
};

}  // namespace

TEST_SUITE("anchor")
{
    TEST_CASE("assemble_anchor keeps the larger cluster")
    {
        auto s = numbered(8);
        auto a = assemble_anchor({0, 1, 2, 3, 4}, {5, 6, 7}, s, 10);
        CHECK(a.selected.size() == 5);
        CHECK(a.positive_size == 5);
        CHECK(a.negative_size == 3);
        CHECK(a.text == "sentence 0 sentence 1 sentence 2 sentence 3 sentence 4");

        auto b = assemble_anchor({0, 1, 2}, {3, 4, 5, 6, 7}, s, 10);
        CHECK(b.selected.front().text == "sentence 3");
    }

    TEST_CASE("assemble_anchor breaks size ties by earliest sentence")
    {
        auto s = numbered(8);
        auto a = assemble_anchor({4, 5, 6, 7}, {3, 2, 1, 0}, s, 10);
        CHECK(a.selected.front().text == "sentence 0");
        auto b = assemble_anchor({1, 5, 6, 7}, {0, 2, 3, 4}, s, 10);
        CHECK(b.selected.front().text == "sentence 0");
        auto c = assemble_anchor({0, 5, 6, 7}, {1, 2, 3, 4}, s, 10);
        CHECK(c.selected.size() == 4);
        CHECK(c.selected[1].text == "sentence 5");
    }

    TEST_CASE("assemble_anchor truncates to z in position order")
    {
        auto s = numbered(12);
        std::vector<std::uint32_t> all{11, 3, 7, 0, 1, 2, 4, 5, 6, 8, 9, 10};
        auto a = assemble_anchor(all, {}, s, 10);
        REQUIRE(a.selected.size() == 10);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(a.selected[i].text == "sentence " + std::to_string(i));
        }
    }

    TEST_CASE("theme fixture: anchor holds only theme sentences and matches the oracle")
    {
        Theme t;
        AnchorParams params;
        params.m = 4;
        auto anchor = build_anchor(t.query, t.run, t.corpus, params);
        REQUIRE(!anchor.selected.empty());
        std::set<std::pair<std::string, std::uint32_t>> got;
        for (auto const& s : anchor.selected) {
            CHECK(s.doc_id != "o1");
            got.emplace(s.doc_id, s.index);
        }
        CHECK(got == test::oracle_anchor_keys(t.run, t.corpus, params));
        auto chosen = std::max(anchor.positive_size, anchor.negative_size);
        CHECK(anchor.selected.size() == std::min(params.z, chosen));
        CHECK(anchor_to_json(anchor) ==
              anchor_to_json(build_anchor(t.query, t.run, t.corpus, params)));
    }

    TEST_CASE("near-duplicate sentences still give an anchor")
    {
        Corpus corpus{{"d", {"d", "The quick brown fox jumps. The quick brown fox leaps."}}};
        auto run = make_run("q", {{"d", 1.0}}, "t");
        AnchorParams params;
        params.m = 1;
        auto a = build_anchor({"q", "fox"}, run, corpus, params);
        CHECK(!a.selected.empty());
        CHECK(a.selected.size() <= params.z);
    }

    TEST_CASE("unrelated sentences make the anchor unavailable")
    {
        Corpus corpus{{"d", {"d", "Alpha beta gamma. Delta epsilon zeta. Eta theta iota."}}};
        auto run = make_run("q", {{"d", 1.0}}, "t");
        CHECK_THROWS_AS((void)build_anchor({"q", "x"}, run, corpus, {}), anchor_unavailable);
        Corpus tiny{{"d", {"d", "Only one sentence here."}}};
        CHECK_THROWS_AS((void)build_anchor({"q", "x"}, run, tiny, {}), anchor_unavailable);

        auto fallback = select_anchor({"q", "x"}, run, corpus, {});
        CHECK(fallback.fallback);
        CHECK(fallback.text == corpus.at("d").text);
        CHECK(!fallback.lambda2);
        auto j = nlohmann::json::parse(anchor_to_json(fallback));
        CHECK(j["fallback"] == true);
    }

    TEST_CASE("anchor never leaves the top-m documents")
    {
        auto corpus = load_corpus(test::data_dir() / "toy" / "corpus.jsonl");
        std::vector<std::string> ids;
        for (auto const& [id, _] : corpus) {
            ids.push_back(id);
        }
        std::mt19937 rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            std::shuffle(ids.begin(), ids.end(), rng);
            std::vector<std::pair<std::string, double>> scored;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                scored.emplace_back(ids[i], static_cast<double>(ids.size() - i));
            }
            auto run = make_run("q1", scored, "t");
            AnchorParams params;
            params.m = 3;
            auto a = select_anchor({"q1", "caffeine sleep"}, run, corpus, params);
            std::set<std::string> top(ids.begin(), ids.begin() + 3);
            for (auto const& s : a.selected) {
                CHECK(top.count(s.doc_id) == 1);
            }
        }
    }

    TEST_CASE("top and random strategies")
    {
        auto corpus = load_corpus(test::data_dir() / "toy" / "corpus.jsonl");
        auto run = make_run("q1", {{"d3", 3.0}, {"d1", 2.0}, {"d2", 1.0}}, "t");
        AnchorParams params;
        params.strategy = AnchorStrategy::top;
        auto top = select_anchor({"q1", "x"}, run, corpus, params);
        CHECK(top.text == corpus.at("d3").text);
        CHECK(!top.fallback);

        params.strategy = AnchorStrategy::random;
        params.seed = 42;
        auto r1 = select_anchor({"q1", "x"}, run, corpus, params);
        auto r2 = select_anchor({"q1", "x"}, run, corpus, params);
        CHECK(r1.text == r2.text);
        CHECK(r1.selected.size() == 1);
        std::set<std::string> seen;
        for (std::uint64_t seed = 0; seed < 64; ++seed) {
            params.seed = seed;
            seen.insert(select_anchor({"q1", "x"}, run, corpus, params).selected[0].doc_id);
        }
        CHECK(seen.size() == 3);
    }

    TEST_CASE("anchor json layout")
    {
        Theme t;
        auto a = select_anchor(t.query, t.run, t.corpus, {});
        auto j = nlohmann::json::parse(anchor_to_json(a));
        CHECK(j["query_id"] == "q1");
        CHECK(j["anchor_text"] == a.text);
        CHECK(j["sentence_provenance"].size() == a.selected.size());
        CHECK(j["cluster_sizes"].size() == 2);
        CHECK(j["lambda2"].is_number());
        CHECK(j["fallback"] == false);
    }

    TEST_CASE("strategy names")
    {
        CHECK(parse_anchor_strategy("random") == AnchorStrategy::random);
        CHECK_THROWS_AS((void)parse_anchor_strategy("synthetic"), config_error);
    }
}
