#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace mobius {

// Shortest-safe decimal for CSV/JSON: 17 significant digits round-trip a
// double. Non-finite values become an empty field.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Quotes a CSV field when it contains a separator or quote.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace mobius
