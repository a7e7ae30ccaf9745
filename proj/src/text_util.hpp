#pragma once

// Shared helpers for the line-oriented file formats: "<directive> <names...>
// key=value ..." with '#' comments.

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "discrep/error.hpp"

namespace discrep::detail {

inline long long parse_int(std::string_view tok, int lineno) {
    std::string s(tok);
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty())
        throw Error("line " + std::to_string(lineno) + ": bad integer '" + s + "'");
    return v;
}

struct Attr {
    std::string key, value;
};

// Splits a directive line into positional tokens and key=value attributes.
inline void split_line(std::string_view line, int lineno, std::vector<std::string>& pos,
                       std::vector<Attr>& attrs) {
    pos.clear();
    attrs.clear();
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) i++;
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) j++;
        if (j > i) {
            std::string tok(line.substr(i, j - i));
            auto eq = tok.find('=');
            if (eq != std::string::npos) {
                if (eq == 0 || eq == tok.size() - 1)
                    throw Error("line " + std::to_string(lineno) + ": bad attribute '" + tok + "'");
                attrs.push_back({tok.substr(0, eq), tok.substr(eq + 1)});
            } else {
                if (!attrs.empty())
                    throw Error("line " + std::to_string(lineno) +
                                ": positional token after attributes");
                pos.push_back(std::move(tok));
            }
        }
        i = j;
    }
}

// Calls fn(line_without_comment, lineno) for every line of text.
template <class Fn> void for_each_line(std::string_view text, Fn&& fn) {
    int lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        lineno++;
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        fn(line, lineno);
    }
}

} // namespace discrep::detail
