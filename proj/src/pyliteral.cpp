#include "quoteattr/pyliteral.hpp"

#include "quoteattr/errors.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr::pyliteral {
namespace {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && str::is_ascii_space(peek())) ++pos;
    }
    void expect(char c) {
        skip_ws();
        if (done() || peek() != c)
            throw Error("list literal: expected '" + std::string(1, c) + "' in: " + std::string(s));
        ++pos;
    }
    bool accept(char c) {
        skip_ws();
        if (!done() && peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

std::string parse_string(Cursor& c) {
    c.skip_ws();
    if (c.done() || (c.peek() != '\'' && c.peek() != '"'))
        throw Error("list literal: expected string in: " + std::string(c.s));
    const char quote = c.peek();
    ++c.pos;
    std::string out;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == '\\') {
            if (c.pos + 1 >= c.s.size()) throw Error("list literal: dangling escape");
            char esc = c.s[c.pos + 1];
            switch (esc) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                default: out.push_back(esc); break;
            }
            c.pos += 2;
            continue;
        }
        if (ch == quote) {
            ++c.pos;
            return out;
        }
        out.push_back(ch);
        ++c.pos;
    }
    throw Error("list literal: unterminated string in: " + std::string(c.s));
}

std::size_t parse_uint(Cursor& c) {
    c.skip_ws();
    if (c.done() || !str::is_ascii_digit(c.peek()))
        throw Error("list literal: expected integer in: " + std::string(c.s));
    std::size_t v = 0;
    while (!c.done() && str::is_ascii_digit(c.peek())) {
        v = v * 10 + static_cast<std::size_t>(c.peek() - '0');
        ++c.pos;
    }
    return v;
}

template <class Elem, class ParseElem>
std::vector<Elem> parse_list(Cursor& c, ParseElem parse_elem) {
    c.expect('[');
    std::vector<Elem> out;
    if (c.accept(']')) return out;
    while (true) {
        out.push_back(parse_elem(c));
        if (c.accept(']')) return out;
        c.expect(',');
    }
}

std::pair<std::size_t, std::size_t> parse_span(Cursor& c) {
    c.expect('[');
    std::size_t a = parse_uint(c);
    c.expect(',');
    std::size_t b = parse_uint(c);
    c.expect(']');
    return {a, b};
}

void expect_end(Cursor& c) {
    c.skip_ws();
    if (!c.done()) throw Error("list literal: trailing data in: " + std::string(c.s));
}

std::string escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        if (ch == '\'' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

}  // namespace

std::vector<std::string> parse_string_list(std::string_view cell) {
    Cursor c{cell};
    auto out = parse_list<std::string>(c, parse_string);
    expect_end(c);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_span_list(std::string_view cell) {
    Cursor c{cell};
    auto out = parse_list<std::pair<std::size_t, std::size_t>>(c, parse_span);
    expect_end(c);
    return out;
}

std::vector<std::vector<std::string>> parse_string_list_list(std::string_view cell) {
    Cursor c{cell};
    auto out = parse_list<std::vector<std::string>>(
        c, [](Cursor& inner) { return parse_list<std::string>(inner, parse_string); });
    expect_end(c);
    return out;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> parse_span_list_list(
    std::string_view cell) {
    Cursor c{cell};
    auto out = parse_list<std::vector<std::pair<std::size_t, std::size_t>>>(
        c, [](Cursor& inner) {
            return parse_list<std::pair<std::size_t, std::size_t>>(inner, parse_span);
        });
    expect_end(c);
    return out;
}

std::string format_string_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += "'" + escape(items[i]) + "'";
    }
    out += "]";
    return out;
}

std::string format_span_list(const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
    std::string out = "[";
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (i) out += ", ";
        out += "[" + std::to_string(spans[i].first) + ", " + std::to_string(spans[i].second) + "]";
    }
    out += "]";
    return out;
}

}  // namespace quoteattr::pyliteral
