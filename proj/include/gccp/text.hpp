#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gccp {

/// Lowercases ASCII and splits on every byte that is not an ASCII letter or
/// digit. Bytes >= 0x80 are kept as word characters so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view text);

std::size_t count_tokens(std::string_view text);

/// Number of whitespace-separated tokens; used for mock usage accounting.
std::size_t count_whitespace_tokens(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

std::string join(std::vector<std::string> const& parts, std::string_view sep);

/// Reads a one-entry-per-line list, skipping blank lines and '#' comments.
std::vector<std::string> read_word_list(std::string const& path);

}  // namespace gccp
