#pragma once

// Small helpers for the line-oriented text formats (config entries, budgets).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace jnkit {

/// One `kind key=value key=value` line.
struct Entry {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> params;
};

Entry parse_key_values(const std::string& line);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);
std::string join_doubles(const std::vector<double>& v);

double parse_double(const std::string& s);
std::vector<double> parse_doubles(const std::string& s);
std::vector<int> parse_ints(const std::string& s);
std::uint64_t parse_uint(const std::string& s);
bool parse_bool(const std::string& s);

}  // namespace jnkit
