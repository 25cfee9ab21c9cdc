#include "gccp/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gccp/text.hpp"

namespace gccp {

double TfIdfVector::weight(std::uint32_t term) const noexcept
{
    auto it = std::lower_bound(weights.begin(), weights.end(), term,
                               [](auto const& p, std::uint32_t t) { return p.first < t; });
    return (it != weights.end() && it->first == term) ? it->second : 0.0;
}

double TfIdfVector::norm() const noexcept
{
    double s = 0.0;
    for (auto const& [t, w] : weights) {
        s += w * w;
    }
    return std::sqrt(s);
}

std::vector<std::string> TokenizerConfig::terms(std::string const& text) const
{
    auto tokens = tokenize(text);
    if (!stopwords.empty()) {
        std::erase_if(tokens, [this](std::string const& t) { return stopwords.contains(t); });
    }
    return tokens;
}

Vocabulary Vocabulary::build(std::vector<std::vector<std::string>> const& units)
{
    // Ordered map so term ids do not depend on hash iteration order.
    std::map<std::string, std::uint32_t> freq;
    for (auto const& unit : units) {
        std::vector<std::string> unique(unit);
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (auto const& t : unique) {
            ++freq[t];
        }
    }
    Vocabulary v;
    v.m_units = units.size();
    v.m_idf.reserve(freq.size());
    auto n = static_cast<double>(units.size());
    for (auto const& [term, f] : freq) {
        v.m_ids.emplace(term, static_cast<std::uint32_t>(v.m_idf.size()));
        v.m_idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(f))) + 1.0);
    }
    return v;
}

std::int64_t Vocabulary::id(std::string const& term) const
{
    auto it = m_ids.find(term);
    return it == m_ids.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double Vocabulary::idf(std::string const& term) const
{
    auto i = id(term);
    return i < 0 ? 0.0 : m_idf[static_cast<std::size_t>(i)];
}

Vocabulary build_vocabulary(std::vector<Sentence> const& sentences, TokenizerConfig const& tokenizer)
{
    std::vector<std::vector<std::string>> units;
    units.reserve(sentences.size());
    for (auto const& s : sentences) {
        units.push_back(tokenizer.terms(s.text));
    }
    return Vocabulary::build(units);
}

TfIdfVector tfidf_embed(std::vector<std::string> const& terms, Vocabulary const& vocab)
{
    std::map<std::uint32_t, double> tf;
    for (auto const& t : terms) {
        auto id = vocab.id(t);
        if (id >= 0) {
            tf[static_cast<std::uint32_t>(id)] += 1.0;
        }
    }
    TfIdfVector v;
    v.weights.reserve(tf.size());
    double sq = 0.0;
    for (auto const& [id, count] : tf) {
        double w = count * vocab.idf(id);
        v.weights.emplace_back(id, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        double inv = 1.0 / std::sqrt(sq);
        for (auto& [id, w] : v.weights) {
            w *= inv;
        }
    } else {
        v.weights.clear();
    }
    return v;
}

TfIdfVector tfidf_embed(Sentence const& sentence, Vocabulary const& vocab,
                        TokenizerConfig const& tokenizer)
{
    return tfidf_embed(tokenizer.terms(sentence.text), vocab);
}

double cosine(TfIdfVector const& a, TfIdfVector const& b) noexcept
{
    double dot = 0.0;
    auto i = a.weights.begin();
    auto j = b.weights.begin();
    while (i != a.weights.end() && j != b.weights.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            dot += i->second * j->second;
            ++i;
            ++j;
        }
    }
    return std::clamp(dot, 0.0, 1.0);
}

}  // namespace gccp
