#pragma once

#include <cstdio>
#include <optional>
#include <string>

namespace reactsim::csv {

// 17 significant digits: enough to reproduce any double exactly.
inline std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string real(const std::optional<double>& v) { return v ? real(*v) : std::string(); }

inline std::string boolean(bool b) { return b ? "true" : "false"; }

// RFC-4180-style quoting; only applied when the field needs it.
inline std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace reactsim::csv
