#include <algorithm>
#include <chrono>

#include "doctest.h"

#include "gccp/cache.hpp"
#include "gccp/error.hpp"
#include "gccp/mock_backends.hpp"
#include "gccp/pipeline.hpp"
#include "fixtures.hpp"

using namespace gccp;
using nlohmann::json;

namespace {

std::vector<std::string> doc_order(CandidateRun const& run)
{
    std::vector<std::string> out;
    for (auto const& e : run.entries) {
        out.push_back(e.doc_id);
    }
    return out;
}

json without_timing(std::filesystem::path const& report)
{
    auto j = json::parse(test::slurp(report));
    j.erase("timing");
    return j;
}

std::uint64_t total_calls(PipelineResult const& r)
{
    return r.report_json.contains("evaluation") ? r.report_json["evaluation"]["calls"]["total"]
                                                    .get<std::uint64_t>()
                                                : r.report_json["calls"]["total"].get<std::uint64_t>();
}

}  // namespace

TEST_SUITE("pipeline")
{
    TEST_CASE("oracle backend on the toy collection recovers the grade order")
    {
        test::TempDir dir;
        auto qrels = load_qrels(test::data_dir() / "toy" / "qrels.txt");
        auto config = PipelineConfig::from_json(test::toy_config(dir / "out"));
        auto result = run_pipeline(config);
        REQUIRE(result.exit_code() == 0);
        REQUIRE(result.report);
        CHECK(result.report->mean == 1.0);
        auto const& run = result.aggregated.front();
        for (std::size_t i = 1; i < run.entries.size(); ++i) {
            CHECK(qrels.grade("q1", run.entries[i - 1].doc_id) >=
                  qrels.grade("q1", run.entries[i].doc_id));
        }
        CHECK(std::filesystem::exists(dir / "out/runs/rg_s.run"));
        CHECK(std::filesystem::exists(dir / "out/runs/aggregated.run"));
        CHECK(std::filesystem::exists(dir / "out/anchors.jsonl"));
        auto report = json::parse(test::slurp(dir / "out/report.json"));
        CHECK(report["evaluation"]["mean"] == 1.0);
        CHECK(report["succeeded"] == 1);
    }

    TEST_CASE("each scorer alone and fused with GCCP reaches ndcg 1 under the noiseless oracle")
    {
        for (std::string kind : {"qg", "rg-yn", "rg-s", "gccp"}) {
            test::TempDir dir;
            auto j = test::toy_config(dir / "out");
            j["scorers"] = json::array({{{"kind", kind}}});
            if (kind != "gccp") {
                j["scorers"].push_back({{"kind", "gccp"}});
            }
            auto result = run_pipeline(PipelineConfig::from_json(j));
            REQUIRE(result.report);
            CHECK_MESSAGE(result.report->mean == 1.0, kind);
            for (auto const& [stem, mean] : result.report_json["per_scorer_mean"].items()) {
                CHECK_MESSAGE(mean.get<double>() == 1.0, stem);
            }
        }
    }

    TEST_CASE("hash backend reruns are byte-identical apart from timing")
    {
        test::TempDir dir;
        auto make = [&](std::string const& out, int workers) {
            auto j = test::toy_config(dir / out);
            j["backend"] = {{"type", "hash"}};
            j["workers"] = workers;
            j["scorers"] = json::array({{{"kind", "qg"}}, {{"kind", "rg-yn"}}, {{"kind", "gccp"}}});
            return PipelineConfig::from_json(j);
        };
        run_pipeline(make("a", 1));
        run_pipeline(make("b", 1));
        run_pipeline(make("c", 3));
        for (std::string f : {"runs/qg.run", "runs/rg_yn.run", "runs/gccp.run", "runs/aggregated.run",
                              "anchors.jsonl"}) {
            CHECK_MESSAGE(test::slurp(dir / ("a/" + f)) == test::slurp(dir / ("b/" + f)), f);
            CHECK_MESSAGE(test::slurp(dir / ("a/" + f)) == test::slurp(dir / ("c/" + f)), f);
        }
        CHECK(without_timing(dir / "a/report.json") == without_timing(dir / "b/report.json"));
        CHECK(without_timing(dir / "a/report.json") == without_timing(dir / "c/report.json"));
    }

    TEST_CASE("random anchor strategy is stable for a fixed seed")
    {
        test::TempDir dir;
        auto make = [&](std::string const& out, int seed) {
            auto j = test::toy_config(dir / out);
            j["anchor"]["strategy"] = "random";
            j["anchor"]["seed"] = seed;
            j["scorers"] = json::array({{{"kind", "gccp"}}});
            return PipelineConfig::from_json(j);
        };
        auto a = run_pipeline(make("a", 3));
        auto b = run_pipeline(make("b", 3));
        CHECK(a.anchors.front().text == b.anchors.front().text);
        CHECK(test::slurp(dir / "a/anchors.jsonl") == test::slurp(dir / "b/anchors.jsonl"));
    }

    TEST_CASE("one backend call per candidate per scorer, none for the anchor")
    {
        test::TempDir dir;
        auto fixture = test::write_wide_fixture(dir, 100);
        std::vector<json> scorer_sets = {
            json::array({{{"kind", "qg"}}}),
            json::array({{{"kind", "rg-yn"}}}),
            json::array({{{"kind", "rg-s"}}}),
            json::array({{{"kind", "gccp"}}}),
            json::array({{{"kind", "qg"}}, {{"kind", "gccp"}}}),
            json::array({{{"kind", "qg"}}, {{"kind", "rg-yn"}}, {{"kind", "gccp"}}}),
        };
        std::vector<std::uint64_t> expected = {100, 100, 100, 100, 200, 300};
        for (std::size_t i = 0; i < scorer_sets.size(); ++i) {
            auto config = PipelineConfig::from_json(
                test::wide_config(fixture, dir / ("out" + std::to_string(i)), scorer_sets[i]));
            auto counter = std::make_shared<CallCounter>();
            auto backend = std::make_shared<MeteredBackend>(std::make_shared<HashMockBackend>(), counter);
            auto result = run_pipeline(config, backend, counter);
            REQUIRE(result.exit_code() == 0);
            CHECK(counter->snapshot().remote_calls == expected[i]);
            CHECK(total_calls(result) == expected[i]);
            CHECK(result.report_json["calls"]["violations"].empty());
            CHECK(result.aggregated.front().size() == 100);
        }

        // anchors alone never touch the backend
        auto corpus = load_corpus(fixture.corpus);
        auto run = read_run(fixture.run).front();
        auto anchor = select_anchor({"q1", "harbor ferry crossing to the island"}, run, corpus, {});
        CHECK_FALSE(anchor.text.empty());
    }

    TEST_CASE("order-averaged GCCP costs two calls per candidate")
    {
        test::TempDir dir;
        auto fixture = test::write_wide_fixture(dir, 30);
        auto config = PipelineConfig::from_json(test::wide_config(
            fixture, dir / "out", json::array({{{"kind", "gccp"}, {"order_average", true}}})));
        auto counter = std::make_shared<CallCounter>();
        auto backend = std::make_shared<MeteredBackend>(std::make_shared<HashMockBackend>(), counter);
        auto result = run_pipeline(config, backend, counter);
        CHECK(counter->snapshot().remote_calls == 60);
        CHECK(result.report_json["calls"]["violations"].empty());
    }

    TEST_CASE("cached rerun issues no remote calls and reproduces the runs")
    {
        test::TempDir dir;
        auto make = [&](std::string const& out) {
            auto j = test::toy_config(dir / out);
            j["backend"] = {{"type", "hash"}, {"cache", (dir / "cache.jsonl").string()}};
            j["scorers"] = json::array({{{"kind", "rg-yn"}}, {{"kind", "gccp"}}});
            return PipelineConfig::from_json(j);
        };
        auto first = run_pipeline(make("a"));
        auto second = run_pipeline(make("b"));
        auto const& c1 = first.report_json["evaluation"]["calls"];
        auto const& c2 = second.report_json["evaluation"]["calls"];
        CHECK(c1["remote"] == 16);
        CHECK(c1["cache_hits"] == 0);
        CHECK(c2["remote"] == 0);
        CHECK(c2["cache_hits"] == 16);
        CHECK(second.report_json["evaluation"]["estimated_cost"] == 0.0);
        CHECK(test::slurp(dir / "a/runs/aggregated.run") == test::slurp(dir / "b/runs/aggregated.run"));
        auto stats = read_cache_stats(dir / "cache.jsonl");
        CHECK(stats.entries == 16);
    }

    TEST_CASE("a query without candidates is reported and the rest still run")
    {
        test::TempDir dir;
        auto queries = dir.write("queries.tsv", "q1\thow does caffeine in coffee affect sleep\n"
                                                "q2\tsomething never retrieved\n");
        auto run = dir.write("first.run", "q1 Q0 d1 1 2.0 X\nq1 Q0 d2 2 1.0 X\n");
        auto j = test::toy_config(dir / "out");
        j["queries"] = queries.string();
        j["first_stage"] = {{"run", run.string()}};
        auto result = run_pipeline(PipelineConfig::from_json(j));
        CHECK(result.exit_code() == 1);
        REQUIRE(result.failures.size() == 1);
        CHECK(result.failures.front().query_id == "q2");
        CHECK(result.aggregated.size() == 1);
        auto report = json::parse(test::slurp(dir / "out/report.json"));
        CHECK(report["failures"].size() == 1);
        CHECK(report["succeeded"] == 1);
    }

    TEST_CASE("invalid configurations are rejected")
    {
        test::TempDir dir;
        auto base = test::toy_config(dir / "out");
        auto expect_error = [](json j) {
            CHECK_THROWS_AS_MESSAGE((void)PipelineConfig::from_json(j), config_error, j.dump());
        };
        auto j = base;
        j.erase("corpus");
        expect_error(j);
        j = base;
        j["scorers"] = json::array();
        expect_error(j);
        j = base;
        j["scorers"] = json::array({{{"kind", "bogus"}}});
        expect_error(j);
        j = base;
        j["scorers"] = json::array({{{"kind", "qg"}}, {{"kind", "qg"}}});
        expect_error(j);
        j = base;
        j["aggregation"]["weights"] = {1.0, 2.0};
        expect_error(j);
        j = base;
        j["anchor"]["theta"] = 1.0;
        expect_error(j);
        j = base;
        j["anchor"]["z"] = 0;
        expect_error(j);
        j = base;
        j.erase("qrels");
        expect_error(j);
        j = base;
        j["workers"] = 0;
        expect_error(j);
        j = base;
        j["backend"] = {{"type", "remote"}, {"remote", {{"endpoint", "ftp://host"}}}};
        expect_error(j);
        j = base;
        j["anchor"]["m"] = "ten";
        expect_error(j);

        CHECK_THROWS_AS((void)PipelineConfig::load(dir / "missing.json"), config_error);
        auto broken = dir.write("broken.json", "{ not json");
        CHECK_THROWS_AS((void)PipelineConfig::load(broken), config_error);
    }

    TEST_CASE("relative paths in a config file resolve against its directory")
    {
        test::TempDir dir;
        auto toy = test::data_dir() / "toy";
        for (std::string f : {"corpus.jsonl", "queries.tsv", "qrels.txt"}) {
            std::filesystem::copy_file(toy / f, dir / f);
        }
        auto path = dir.write("config.json", R"({
  "corpus": "corpus.jsonl", "queries": "queries.tsv", "qrels": "qrels.txt",
  "output_dir": "results",
  "backend": {"type": "oracle"},
  "scorers": [{"kind": "rg-yn"}]
})");
        auto config = PipelineConfig::load(path);
        CHECK(config.corpus == dir / "corpus.jsonl");
        CHECK(config.output_dir == dir / "results");
        CHECK(run_pipeline(config).report->mean == 1.0);
    }
}
