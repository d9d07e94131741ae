#pragma once

// One inequality check: both sides, the factors of the right side and the
// resulting empirical constant, compared with a budget.

#include <string>
#include <utility>
#include <vector>

namespace jnkit {

struct Factor {
    std::string name;
    double value = 1.0;
};

enum class RecordStatus { ok, error, skipped };

const char* to_string(RecordStatus s);

struct VerificationRecord {
    std::string theorem;
    std::string case_id;
    int n = 0;                  ///< grid dimension (0 when not grid-based)
    int J = 0;                  ///< grid depth
    std::string scope = "any";  ///< budget scope key
    std::vector<std::pair<std::string, std::string>> inputs;
    double lhs = 0.0;
    std::vector<Factor> factors;
    double constant = 0.0;  ///< lhs / product(factors)
    double budget = 0.0;
    bool pass = false;
    RecordStatus status = RecordStatus::ok;
    std::string note;
    double runtime_ms = 0.0;  ///< kept out of the JSON-lines report

    double factor_product() const;
    /// Sets constant from lhs and factors, then pass from the budget.
    void finalize(double budget_value);
    void add_input(std::string key, std::string value) { inputs.emplace_back(std::move(key), std::move(value)); }
    void add_input(std::string key, double value);
};

/// One JSON object on a single line (no runtime field).
std::string to_json_line(const VerificationRecord& r);

}  // namespace jnkit
