#include <cmath>
#include <random>

#include "doctest.h"

#include "gccp/sentences.hpp"
#include "gccp/tfidf.hpp"
#include "support.hpp"

using namespace gccp;

namespace {

std::vector<std::string> texts(std::vector<Sentence> const& s)
{
    std::vector<std::string> out;
    for (auto const& x : s) {
        out.push_back(x.text);
    }
    return out;
}

Sentence sent(std::string text, std::string doc = "d", std::uint32_t rank = 1,
              std::uint32_t index = 0)
{
    return {std::move(text), std::move(doc), rank, index};
}

}  // namespace

TEST_SUITE("textproc")
{
    TEST_CASE("split_sentences basic")
    {
        auto s = split_sentences({"d", "A cat sat here. A dog ran away."}, 1);
        REQUIRE(s.size() == 2);
        CHECK(s[0].text == "A cat sat here.");
        CHECK(s[1].text == "A dog ran away.");
        CHECK(s[0].index == 0);
        CHECK(s[1].index == 1);
        CHECK(s[0].doc_rank == 1);
    }

    TEST_CASE("abbreviations do not split")
    {
        auto s = split_sentences({"d", "See Dr. Smith works here today."}, 1);
        REQUIRE(s.size() == 1);
        CHECK(texts(split_sentences({"d", "Cities in the U.S. Are large. They grow fast."}, 1)) ==
              std::vector<std::string>{"Cities in the U.S. Are large.", "They grow fast."});
    }

    TEST_CASE("short fragments are dropped")
    {
        CHECK(split_sentences({"d", "Hi. Ok."}, 1).empty());
        CHECK(split_sentences({"d", ""}, 1).empty());
        SegmenterConfig loose;
        loose.min_tokens = 1;
        CHECK(split_sentences({"d", "Hi. Ok."}, 1, loose).size() == 2);
    }

    TEST_CASE("lowercase after a period does not split")
    {
        auto s = split_sentences({"d", "Version 2.5 is out. it has fixes and more. Next one soon."}, 1);
        CHECK(texts(s) == std::vector<std::string>{"Version 2.5 is out. it has fixes and more.",
                                                   "Next one soon."});
    }

    TEST_CASE("indices increase strictly")
    {
        auto s = split_sentences({"d", "One two three. No. Four five six! Seven eight nine?"}, 2);
        REQUIRE(s.size() == 3);
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s[i - 1].index < s[i].index);
        }
    }

    TEST_CASE("dedup_sentences")
    {
        auto out = dedup_sentences({sent("The cat sat."), sent("the  cat sat", "d", 1, 1)});
        REQUIRE(out.size() == 1);
        CHECK(out[0].index == 0);

        std::vector<Sentence> distinct{sent("one two three"), sent("four five six", "d", 1, 1)};
        CHECK(texts(dedup_sentences(distinct)) == texts(distinct));

        // the copy from the better-ranked document survives even when listed later
        auto across = dedup_sentences({sent("Shared words here.", "low", 3, 0),
                                       sent("shared words here", "high", 1, 4)});
        REQUIRE(across.size() == 1);
        CHECK(across[0].doc_id == "high");
    }

    TEST_CASE("dedup is idempotent")
    {
        std::mt19937 rng(11);
        std::vector<std::string> pool{"Alpha beta.", "alpha  BETA", "gamma delta", "Gamma delta!",
                                      "eps zeta"};
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<Sentence> in;
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            for (std::uint32_t i = 0; i < 8; ++i) {
                in.push_back(sent(pool[pick(rng)], "d" + std::to_string(i % 3), i % 3 + 1, i));
            }
            auto once = dedup_sentences(in);
            CHECK(texts(dedup_sentences(once)) == texts(once));
        }
    }

    TEST_CASE("vocabulary idf")
    {
        std::vector<Sentence> s{sent("common alpha"), sent("common beta"), sent("common gamma")};
        auto v = build_vocabulary(s);
        CHECK(v.num_units() == 3);
        CHECK(v.idf("common") == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(v.idf("alpha") == doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-12));
        CHECK(v.idf("alpha") == doctest::Approx(1.6931).epsilon(1e-4));
        CHECK(v.id("missing") == -1);
        CHECK(tfidf_embed(std::vector<std::string>{"missing"}, v).is_zero());
    }

    TEST_CASE("tfidf_embed normalization")
    {
        std::vector<Sentence> s{sent("alpha beta"), sent("gamma")};
        auto v = build_vocabulary(s);
        auto one = tfidf_embed(std::vector<std::string>{"gamma"}, v);
        REQUIRE(one.weights.size() == 1);
        CHECK(one.weights[0].second == doctest::Approx(1.0).epsilon(1e-15));

        auto two = tfidf_embed(s[0], v);
        REQUIRE(two.weights.size() == 2);
        CHECK(two.weights[0].second == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(two.weights[1].second == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(two.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("cosine")
    {
        std::vector<Sentence> s{sent("a b"), sent("a"), sent("c"), sent("b")};
        auto v = build_vocabulary(s);
        auto ab = tfidf_embed(s[0], v);
        auto a = tfidf_embed(s[1], v);
        auto c = tfidf_embed(s[2], v);
        CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cosine(a, c) == 0.0);
        CHECK(cosine(ab, a) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(cosine(ab, a) == doctest::Approx(0.7071).epsilon(1e-4));
        CHECK(cosine(TfIdfVector{}, a) == 0.0);
    }

    TEST_CASE("cosine properties over random sentences")
    {
        std::mt19937 rng(5);
        std::vector<std::string> words{"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7"};
        std::vector<Sentence> s;
        std::uniform_int_distribution<std::size_t> len(1, 6), pick(0, words.size() - 1);
        for (std::uint32_t i = 0; i < 40; ++i) {
            std::string t;
            for (std::size_t k = len(rng); k > 0; --k) {
                t += words[pick(rng)] + " ";
            }
            s.push_back(sent(t, "d", 1, i));
        }
        auto v = build_vocabulary(s);
        std::vector<TfIdfVector> e;
        for (auto const& x : s) {
            e.push_back(tfidf_embed(x, v));
            for (auto const& [_, w] : e.back().weights) {
                CHECK(w >= 0.0);
            }
            CHECK(std::abs(e.back().norm() - 1.0) <= 1e-9);
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            CHECK(cosine(e[i], e[i]) == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t j = 0; j < e.size(); ++j) {
                double c = cosine(e[i], e[j]);
                CHECK(c >= 0.0);
                CHECK(c <= 1.0);
                CHECK(c == cosine(e[j], e[i]));
            }
        }
    }

    TEST_CASE("stopwords are skipped")
    {
        TokenizerConfig tok;
        tok.stopwords = {"the"};
        CHECK(tok.terms("The cat and the hat") == std::vector<std::string>{"cat", "and", "hat"});
    }
}
