#include "gccp/anchor.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

#include "gccp/affinity.hpp"
#include "gccp/error.hpp"
#include "gccp/hashing.hpp"
#include "gccp/spectral.hpp"

namespace gccp {

std::string to_string(AnchorStrategy s)
{
    switch (s) {
    case AnchorStrategy::spectral: return "spectral";
    case AnchorStrategy::top: return "top";
    case AnchorStrategy::random: return "random";
    }
    return "unknown";
}

AnchorStrategy parse_anchor_strategy(std::string const& name)
{
    if (name == "spectral") {
        return AnchorStrategy::spectral;
    }
    if (name == "top") {
        return AnchorStrategy::top;
    }
    if (name == "random") {
        return AnchorStrategy::random;
    }
    throw config_error("unknown anchor strategy \"" + name + "\"");
}

AnchorDocument assemble_anchor(std::vector<std::uint32_t> const& positive,
                               std::vector<std::uint32_t> const& negative,
                               std::vector<Sentence> const& sentences, std::size_t z)
{
    auto earliest = [&](std::vector<std::uint32_t> const& cluster) {
        return *std::min_element(cluster.begin(), cluster.end(), [&](auto a, auto b) {
            return position_before(sentences.at(a), sentences.at(b));
        });
    };
    bool take_positive = positive.size() > negative.size();
    if (positive.size() == negative.size()) {
        if (positive.empty()) {
            throw anchor_unavailable("both clusters are empty");
        }
        take_positive = position_before(sentences.at(earliest(positive)),
                                        sentences.at(earliest(negative)));
    }
    auto const& chosen = take_positive ? positive : negative;

    std::vector<Sentence> ordered;
    ordered.reserve(chosen.size());
    for (auto i : chosen) {
        ordered.push_back(sentences.at(i));
    }
    std::sort(ordered.begin(), ordered.end(), position_before);
    ordered.resize(std::min(z, ordered.size()));

    AnchorDocument anchor;
    anchor.positive_size = positive.size();
    anchor.negative_size = negative.size();
    anchor.z = z;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (i > 0) {
            anchor.text += ' ';
        }
        anchor.text += ordered[i].text;
    }
    anchor.selected = std::move(ordered);
    return anchor;
}

namespace {

std::vector<RunEntry> by_rank(CandidateRun const& run)
{
    auto entries = run.entries;
    std::sort(entries.begin(), entries.end(),
              [](RunEntry const& a, RunEntry const& b) { return a.rank < b.rank; });
    return entries;
}

Document const& lookup(Corpus const& corpus, std::string const& id)
{
    auto it = corpus.find(id);
    if (it == corpus.end()) {
        throw std::invalid_argument("document " + id + " is not in the corpus");
    }
    return it->second;
}

AnchorDocument whole_document(Query const& query, Corpus const& corpus, RunEntry const& entry,
                              AnchorStrategy strategy)
{
    auto const& doc = lookup(corpus, entry.doc_id);
    AnchorDocument anchor;
    anchor.query_id = query.id;
    anchor.text = doc.text;
    anchor.selected.push_back({doc.text, doc.id, entry.rank, 0});
    anchor.positive_size = 1;
    anchor.z = 1;
    anchor.strategy = strategy;
    return anchor;
}

}  // namespace

AnchorDocument build_anchor(Query const& query, CandidateRun const& run, Corpus const& corpus,
                            AnchorParams const& params)
{
    if (run.empty()) {
        throw std::invalid_argument("cannot build an anchor from an empty run");
    }
    if (params.m == 0 || params.z == 0) {
        throw std::invalid_argument("anchor needs m >= 1 and z >= 1");
    }
    auto entries = by_rank(run);
    entries.resize(std::min(params.m, entries.size()));

    std::vector<Sentence> sentences;
    std::vector<std::vector<std::string>> doc_terms;
    for (auto const& e : entries) {
        auto const& doc = lookup(corpus, e.doc_id);
        auto split = split_sentences(doc, e.rank, params.segmenter);
        sentences.insert(sentences.end(), split.begin(), split.end());
        if (params.idf_source == IdfSource::documents) {
            doc_terms.push_back(params.tokenizer.terms(doc.text));
        }
    }
    sentences = dedup_sentences(sentences);
    if (sentences.size() < 2) {
        throw anchor_unavailable("fewer than two usable sentences in the top documents");
    }

    auto vocab = params.idf_source == IdfSource::documents
                     ? Vocabulary::build(doc_terms)
                     : build_vocabulary(sentences, params.tokenizer);
    std::vector<TfIdfVector> embeddings;
    embeddings.reserve(sentences.size());
    for (auto const& s : sentences) {
        embeddings.push_back(tfidf_embed(s, vocab, params.tokenizer));
    }

    auto affinity = build_affinity(embeddings, params.theta);
    NormalizedLaplacian laplacian(affinity);
    auto spectral = fiedler_vector(laplacian);
    auto [positive, negative] = partition(spectral);

    auto anchor = assemble_anchor(positive, negative, sentences, params.z);
    anchor.query_id = query.id;
    anchor.lambda2 = spectral.lambda2;
    anchor.strategy = AnchorStrategy::spectral;
    return anchor;
}

AnchorDocument select_anchor(Query const& query, CandidateRun const& run, Corpus const& corpus,
                             AnchorParams const& params)
{
    if (run.empty()) {
        throw std::invalid_argument("cannot build an anchor from an empty run");
    }
    auto entries = by_rank(run);
    switch (params.strategy) {
    case AnchorStrategy::top:
        return whole_document(query, corpus, entries.front(), AnchorStrategy::top);
    case AnchorStrategy::random: {
        auto h = splitmix64(params.seed ^ fnv1a64(query.id));
        return whole_document(query, corpus, entries[h % entries.size()], AnchorStrategy::random);
    }
    case AnchorStrategy::spectral:
        break;
    }
    try {
        return build_anchor(query, run, corpus, params);
    } catch (anchor_unavailable const& e) {
        auto anchor = whole_document(query, corpus, entries.front(), AnchorStrategy::spectral);
        anchor.fallback = true;
        anchor.fallback_reason = e.what();
        return anchor;
    }
}

std::string anchor_to_json(AnchorDocument const& anchor)
{
    nlohmann::ordered_json provenance = nlohmann::ordered_json::array();
    for (auto const& s : anchor.selected) {
        provenance.push_back({{"doc_id", s.doc_id}, {"rank", s.doc_rank}, {"index", s.index}});
    }
    nlohmann::ordered_json j;
    j["query_id"] = anchor.query_id;
    j["anchor_text"] = anchor.text;
    j["sentence_provenance"] = provenance;
    j["lambda2"] = anchor.lambda2 ? nlohmann::ordered_json(*anchor.lambda2) : nlohmann::ordered_json(nullptr);
    j["cluster_sizes"] = {anchor.positive_size, anchor.negative_size};
    j["fallback"] = anchor.fallback;
    j["strategy"] = to_string(anchor.strategy);
    if (anchor.fallback) {
        j["fallback_reason"] = anchor.fallback_reason;
    }
    return j.dump();
}

}  // namespace gccp
