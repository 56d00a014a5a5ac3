#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace quoteattr::pyliteral {

// Parsers for the Python-repr list cells used by the annotation CSVs:
// ['a', "b"], [[254, 284], [301, 335]], [[], []], nested string lists.
// Backslash escapes inside strings are honoured. All throw
// quoteattr::Error on malformed input.

std::vector<std::string> parse_string_list(std::string_view cell);
std::vector<std::pair<std::size_t, std::size_t>> parse_span_list(std::string_view cell);
std::vector<std::vector<std::string>> parse_string_list_list(std::string_view cell);
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> parse_span_list_list(std::string_view cell);

std::string format_string_list(const std::vector<std::string>& items);
std::string format_span_list(const std::vector<std::pair<std::size_t, std::size_t>>& spans);

}  // namespace quoteattr::pyliteral
