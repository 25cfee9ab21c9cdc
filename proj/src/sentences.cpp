#include "gccp/sentences.hpp"

#include <cctype>
#include <string_view>
#include <unordered_map>

#include "gccp/text.hpp"

namespace gccp {

bool position_before(Sentence const& a, Sentence const& b) noexcept
{
    if (a.doc_rank != b.doc_rank) {
        return a.doc_rank < b.doc_rank;
    }
    return a.index < b.index;
}

std::unordered_set<std::string> SegmenterConfig::default_abbreviations()
{
    return {"dr.",   "mr.",   "mrs.",  "ms.",  "prof.", "sr.",   "jr.",   "st.",  "mt.",
            "vs.",   "etc.",  "e.g.",  "i.e.", "cf.",   "al.",   "approx.", "fig.", "no.",
            "vol.",  "u.s.",  "u.k.",  "u.n.", "e.u.",  "inc.",  "ltd.",  "co.",  "corp.",
            "dept.", "univ.", "gen.",  "gov.", "sen.",  "rep.",  "jan.",  "feb.", "mar.",
            "apr.",  "jun.",  "jul.",  "aug.", "sep.",  "sept.", "oct.",  "nov.", "dec.",
            "a.m.",  "p.m.",  "ph.d.", "b.c.", "a.d."};
}

void SegmenterConfig::load_abbreviations(std::string const& path)
{
    abbreviations.clear();
    for (auto const& w : read_word_list(path)) {
        abbreviations.insert(to_lower(w));
    }
}

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }

bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

/// The whitespace-delimited word ending at `end` (inclusive), openers stripped.
std::string word_ending_at(std::string_view text, std::size_t end)
{
    std::size_t start = end;
    while (start > 0 && !is_space(text[start - 1])) {
        --start;
    }
    while (start < end && is_opener(text[start])) {
        ++start;
    }
    return to_lower(text.substr(start, end - start + 1));
}

}  // namespace

std::vector<Sentence> split_sentences(Document const& doc, std::uint32_t doc_rank,
                                      SegmenterConfig const& config)
{
    std::string_view text = doc.text;
    std::vector<std::string_view> segments;
    std::size_t seg_start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        std::size_t term = i;
        std::size_t j = i + 1;
        while (j < text.size() && (is_terminator(text[j]) || is_closer(text[j]))) {
            ++j;
        }
        std::size_t k = j;
        while (k < text.size() && is_space(text[k])) {
            ++k;
        }
        bool boundary = false;
        if (k == text.size()) {
            boundary = true;
        } else if (k > j) {
            std::size_t c = k;
            while (c < text.size() && is_opener(text[c])) {
                ++c;
            }
            boundary = c < text.size() && is_upper(text[c]);
        }
        if (boundary && text[term] == '.' && k < text.size()) {
            // Only the last terminator of a run like "e.g." matters for the guard.
            std::size_t last = j;
            while (last > term && !is_terminator(text[last - 1])) {
                --last;
            }
            if (config.abbreviations.contains(word_ending_at(text, last - 1))) {
                boundary = false;
            }
        }
        if (boundary) {
            segments.push_back(text.substr(seg_start, j - seg_start));
            seg_start = j;
        }
        i = j;
    }
    if (seg_start < text.size()) {
        segments.push_back(text.substr(seg_start));
    }

    std::vector<Sentence> out;
    std::uint32_t index = 0;
    for (auto seg : segments) {
        auto t = trim(seg);
        if (t.empty()) {
            continue;
        }
        if (count_tokens(t) >= config.min_tokens) {
            out.push_back({std::string(t), doc.id, doc_rank, index});
        }
        ++index;
    }
    return out;
}

std::string dedup_key(std::string const& text)
{
    std::string key;
    key.reserve(text.size());
    for (char c : text) {
        if (is_space(c)) {
            if (!key.empty() && key.back() != ' ') {
                key.push_back(' ');
            }
        } else {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    while (!key.empty()
           && (key.back() == ' ' || std::ispunct(static_cast<unsigned char>(key.back())))) {
        key.pop_back();
    }
    return key;
}

std::vector<Sentence> dedup_sentences(std::vector<Sentence> const& sentences)
{
    std::unordered_map<std::string, std::size_t> best;
    std::vector<std::string> keys;
    keys.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        keys.push_back(dedup_key(sentences[i].text));
        auto [it, inserted] = best.emplace(keys.back(), i);
        if (!inserted && position_before(sentences[i], sentences[it->second])) {
            it->second = i;
        }
    }
    std::vector<Sentence> out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (best.at(keys[i]) == i) {
            out.push_back(sentences[i]);
        }
    }
    return out;
}

}  // namespace gccp
