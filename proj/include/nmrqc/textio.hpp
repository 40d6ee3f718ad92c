#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmrqc {

// Error for malformed program/pulse text; carries the 1-based source line.
struct parse_error : std::runtime_error {
    parse_error(const std::string& msg, int line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    int line;
};

// All machine-readable output uses 17 significant digits (exact double round trip).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// Angles are accepted as integer multiples of pi ("pi", "-pi/2", "3pi/4", "2pi")
// or as plain decimal radians. Symbolic forms are evaluated as (p*pi)/q so that
// format_angle below can reproduce them bit-exactly.
inline double parse_angle(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty angle");
    const std::size_t pos = s.find("pi");
    if (pos != std::string::npos) {
        std::string coef = s.substr(0, pos);
        std::string rest = s.substr(pos + 2);
        double sign = 1.0;
        if (!coef.empty() && (coef[0] == '+' || coef[0] == '-')) {
            if (coef[0] == '-') sign = -1.0;
            coef.erase(coef.begin());
        }
        double p = 1.0;
        if (!coef.empty()) {
            char* end = nullptr;
            p = std::strtod(coef.c_str(), &end);
            if (end != coef.c_str() + coef.size())
                throw std::invalid_argument("bad angle coefficient: " + text);
        }
        double q = 1.0;
        if (!rest.empty()) {
            if (rest[0] != '/') throw std::invalid_argument("bad angle: " + text);
            rest.erase(rest.begin());
            char* end = nullptr;
            q = std::strtod(rest.c_str(), &end);
            if (end != rest.c_str() + rest.size() || q == 0.0)
                throw std::invalid_argument("bad angle divisor: " + text);
        }
        return sign * (p * std::numbers::pi) / q;
    }
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw std::invalid_argument("bad angle: " + text);
    return v;
}

// Renders an angle symbolically ("pi/2", "3pi/4") when it is bit-exactly a small
// multiple of pi, otherwise as a 17-digit decimal. parse_angle(format_angle(x)) == x.
inline std::string format_angle(double v) {
    if (v == 0.0) return "0";
    for (long q = 1; q <= 64; ++q) {
        const double p = std::round(v * static_cast<double>(q) / std::numbers::pi);
        if (p == 0.0 || std::abs(p) > 4096.0) continue;
        if ((p * std::numbers::pi) / static_cast<double>(q) != v) continue;
        const long pl = static_cast<long>(p);
        std::string out = pl < 0 ? "-" : "";
        const long ap = pl < 0 ? -pl : pl;
        if (ap != 1) out += std::to_string(ap);
        out += "pi";
        if (q != 1) out += "/" + std::to_string(q);
        return out;
    }
    return format_double(v);
}

}  // namespace nmrqc
