#include <cstdlib>
#include <sys/wait.h>

#include "doctest.h"

#include "gccp/evaluate.hpp"
#include "gccp/run.hpp"
#include "fixtures.hpp"

using namespace gccp;
using nlohmann::json;

namespace {

struct Invocation {
    int status = -1;
    std::string out;
    std::string err;
};

Invocation gccp_cli(test::TempDir const& dir, std::string const& args)
{
    auto out = dir / "stdout.txt";
    auto err = dir / "stderr.txt";
    auto cmd = std::string(GCCP_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    int raw = std::system(cmd.c_str());
    Invocation r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = test::slurp(out);
    r.err = test::slurp(err);
    return r;
}

std::string toy(std::string const& name)
{
    return (test::data_dir() / "toy" / name).string();
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("retrieve, score, aggregate and eval chain")
    {
        test::TempDir dir;
        auto bm25 = (dir / "bm25.run").string();
        REQUIRE(gccp_cli(dir, "retrieve --corpus " + toy("corpus.jsonl") + " --queries " +
                                  toy("queries.tsv") + " --k 100 -o " + bm25)
                    .status == 0);
        auto first = read_run(bm25);
        REQUIRE(first.size() == 1);

        auto scored = (dir / "gccp.run").string();
        auto r = gccp_cli(dir, "score --scorer gccp --backend oracle --qrels " + toy("qrels.txt") +
                                   " --corpus " + toy("corpus.jsonl") + " --queries " +
                                   toy("queries.tsv") + " --run " + bm25 + " -o " + scored);
        REQUIRE(r.status == 0);
        auto n = first.front().size();
        CHECK(r.err.find("calls: " + std::to_string(n)) != std::string::npos);
        CHECK(read_run(scored).front().size() == n);

        auto yn = (dir / "yn.run").string();
        REQUIRE(gccp_cli(dir, "score --scorer rg_yn --backend oracle --qrels " + toy("qrels.txt") +
                                  " --corpus " + toy("corpus.jsonl") + " --queries " +
                                  toy("queries.tsv") + " --run " + bm25 + " -o " + yn)
                    .status == 0);
        auto fused = (dir / "fused.run").string();
        REQUIRE(gccp_cli(dir, "aggregate " + scored + " " + yn + " --weights 1,1 -o " + fused).status ==
                0);
        CHECK(read_run(fused).front().tag == "PAGC-YG");

        auto report = (dir / "report.json").string();
        auto e = gccp_cli(dir, "eval --run " + fused + " --qrels " + toy("qrels.txt") + " --json " +
                                   report);
        REQUIRE(e.status == 0);
        auto expected = evaluate_run(read_run(fused), load_qrels(toy("qrels.txt")));
        CHECK(expected.mean == 1.0);
        CHECK(json::parse(test::slurp(report))["mean"] == expected.mean);
        CHECK(e.out == expected.to_table());
    }

    TEST_CASE("eval agrees with the library on a hand-made run")
    {
        test::TempDir dir;
        auto run = dir.write("hand.run", "q1 Q0 d3 1 4 X\nq1 Q0 d1 2 3 X\nq1 Q0 d8 3 2 X\nq1 Q0 d2 4 1 X\n");
        auto report = dir / "r.json";
        auto e = gccp_cli(dir, "eval --run " + run.string() + " --qrels " + toy("qrels.txt") +
                                   " --json " + report.string());
        REQUIRE(e.status == 0);
        CHECK(json::parse(test::slurp(report))["mean"].get<double>() ==
              doctest::Approx(0.7726635982422746).epsilon(1e-12));
    }

    TEST_CASE("run subcommand and cache-stats over two runs")
    {
        test::TempDir dir;
        auto j = test::toy_config(dir / "out");
        j["backend"] = {{"type", "hash"}, {"cache", (dir / "cache.jsonl").string()}};
        j["scorers"] = json::array({{{"kind", "rg-yn"}}, {{"kind", "gccp"}}});
        auto config = dir.write("config.json", j.dump(2));
        REQUIRE(gccp_cli(dir, "run " + config.string()).status == 0);
        REQUIRE(gccp_cli(dir, "run " + config.string() + " --output-dir " + (dir / "again").string())
                    .status == 0);
        CHECK(test::slurp(dir / "out/runs/aggregated.run") ==
              test::slurp(dir / "again/runs/aggregated.run"));

        auto s = gccp_cli(dir, "cache-stats " + (dir / "cache.jsonl").string());
        REQUIRE(s.status == 0);
        auto stats = json::parse(s.out);
        CHECK(stats["entries"] == 16);
        CHECK(stats["total_misses"] == 16);
        CHECK(stats["total_hits"] == 16);
        CHECK(stats["last_hits"] == 16);
        CHECK(stats["last_misses"] == 0);
    }

    TEST_CASE("exit codes")
    {
        test::TempDir dir;
        CHECK(gccp_cli(dir, "--help").status == 0);
        CHECK(gccp_cli(dir, "").status == 2);
        CHECK(gccp_cli(dir, "eval --k 10").status == 2);
        CHECK(gccp_cli(dir, "frobnicate").status == 2);
        CHECK(gccp_cli(dir, "run " + (dir / "missing.json").string()).status == 2);
        auto bad = dir.write("bad.json", R"({"corpus": "c.jsonl"})");
        auto r = gccp_cli(dir, "run " + bad.string());
        CHECK(r.status == 2);
        CHECK_FALSE(r.err.empty());

        auto unjudged = dir.write("u.run", "q9 Q0 d1 1 1 X\n");
        CHECK(gccp_cli(dir, "eval --run " + unjudged.string() + " --qrels " + toy("qrels.txt")).status ==
              1);

        auto queries = dir.write("queries.tsv", "q1\thow does caffeine in coffee affect sleep\n"
                                                "q2\tnever retrieved\n");
        auto first = dir.write("first.run", "q1 Q0 d1 1 2 X\nq1 Q0 d2 2 1 X\n");
        auto j = test::toy_config(dir / "out");
        j["queries"] = queries.string();
        j["first_stage"] = {{"run", first.string()}};
        auto partial = dir.write("partial.json", j.dump());
        auto p = gccp_cli(dir, "run " + partial.string());
        CHECK(p.status == 1);
        CHECK(std::filesystem::exists(dir / "out/runs/aggregated.run"));
    }
}
