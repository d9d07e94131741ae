#include "jnkit/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "jnkit/grid.hpp"

namespace jnkit {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Entry parse_key_values(const std::string& line) {
    Entry e;
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) tokens.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (tokens.empty()) throw DomainError("empty entry");
    e.kind = tokens.front();
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0) throw DomainError("malformed parameter '" + tokens[i] + "'");
        const std::string key = tokens[i].substr(0, eq);
        for (const auto& kv : e.params)
            if (kv.first == key) throw DomainError("duplicate parameter '" + key + "'");
        e.params.emplace_back(key, tokens[i].substr(eq + 1));
    }
    return e;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

double parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "inf") return INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        // Accept simple fractions such as 1/3.
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            return parse_double(s.substr(0, slash)) / parse_double(s.substr(slash + 1));
        }
        throw DomainError("not a number: '" + raw + "'");
    }
    return v;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
    return out;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split(s, ',')) {
        const double v = parse_double(part);
        if (v != std::floor(v)) throw DomainError("not an integer: '" + part + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::uint64_t parse_uint(const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DomainError("not an unsigned integer: '" + raw + "'");
    return v;
}

bool parse_bool(const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw DomainError("not a boolean: '" + raw + "'");
}

}  // namespace jnkit
