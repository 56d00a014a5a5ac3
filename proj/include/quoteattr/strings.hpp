#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace quoteattr::str {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Case-insensitive ASCII fold + trim; the normal form for alias lookups.
std::string fold(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string_view> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_ascii_upper(char c);
bool is_ascii_alpha(char c);
bool is_ascii_digit(char c);
bool is_ascii_space(char c);

// Words = maximal runs of non-whitespace bytes.
std::size_t word_count(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

std::string replace_all(std::string_view s, std::string_view from, std::string_view to);

}  // namespace quoteattr::str
