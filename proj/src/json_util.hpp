// Private JSON helpers shared by the I/O translation units.
#ifndef BELIEFSCOPE_SRC_JSON_UTIL_HPP
#define BELIEFSCOPE_SRC_JSON_UTIL_HPP

#include "beliefscope/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <initializer_list>
#include <string>
#include <string_view>

namespace beliefscope::detail {

using ojson = nlohmann::ordered_json;

/// Parses text, translating syntax errors into a positioned ParseError.
inline ojson parse_json(std::string_view text, std::string_view what, std::size_t line_offset = 0) {
    try {
        return ojson::parse(text.begin(), text.end());
    } catch (const ojson::parse_error& e) {
        // e.byte is 1-based and points at the offending character.
        std::size_t line = 1, col = 1;
        const std::size_t stop = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        line += line_offset;
        throw ParseError(std::string(what) + ": syntax error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what(),
                         line, col);
    }
}

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw ParseError(path + ": " + msg);
}

inline void require_object(const ojson& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

inline void only_keys(const ojson& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) fail(path, "unknown field '" + it.key() + "'");
    }
}

inline double get_number(const ojson& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline std::string get_string(const ojson& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

/// Rounds to 10 significant digits so dumped documents are stable.
inline double round10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::stod(buf);
}

} // namespace beliefscope::detail

#endif
