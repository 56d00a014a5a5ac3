#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace quoteattr::csv {

// RFC-4180 parser: quoted fields, doubled-quote escapes, embedded
// newlines, CRLF or LF row separators. Throws quoteattr::Error on a
// structurally broken file (stray quote in an unquoted field is
// tolerated and taken literally).
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string escape_field(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

}  // namespace quoteattr::csv
