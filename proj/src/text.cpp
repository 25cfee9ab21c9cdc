#include "gccp/text.hpp"

#include <fstream>
#include <stdexcept>

namespace gccp {

namespace {

constexpr bool is_word_byte(unsigned char c) noexcept
{
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr bool is_space(unsigned char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr char lower(char c) noexcept
{
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_word_byte(static_cast<unsigned char>(c))) {
            current.push_back(lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::size_t count_tokens(std::string_view text)
{
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool word = is_word_byte(static_cast<unsigned char>(c));
        if (word && !in_word) {
            ++n;
        }
        in_word = word;
    }
    return n;
}

std::size_t count_whitespace_tokens(std::string_view text)
{
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool word = !is_space(static_cast<unsigned char>(c));
        if (word && !in_word) {
            ++n;
        }
        in_word = word;
    }
    return n;
}

std::vector<std::string> split_whitespace(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t start = i;
        while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i > start) {
            out.emplace_back(text.substr(start, i - start));
        }
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) {
        c = lower(c);
    }
    return out;
}

std::string join(std::vector<std::string> const& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

std::vector<std::string> read_word_list(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty() && t.front() != '#') {
            words.emplace_back(t);
        }
    }
    return words;
}

}  // namespace gccp
