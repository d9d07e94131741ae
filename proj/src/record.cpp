#include "jnkit/record.hpp"

#include <cmath>

#include <json.hpp>

#include "jnkit/text.hpp"

namespace jnkit {

const char* to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::ok: return "ok";
        case RecordStatus::error: return "error";
        case RecordStatus::skipped: return "skipped";
    }
    return "?";
}

double VerificationRecord::factor_product() const {
    double p = 1.0;
    for (const auto& f : factors) p *= f.value;
    return p;
}

void VerificationRecord::finalize(double budget_value) {
    budget = budget_value;
    const double denom = factor_product();
    if (lhs == 0.0) {
        constant = 0.0;
    } else if (denom == 0.0) {
        constant = INFINITY;
    } else {
        constant = lhs / denom;
    }
    pass = status != RecordStatus::error && constant <= budget;
}

void VerificationRecord::add_input(std::string key, double value) {
    inputs.emplace_back(std::move(key), format_double(value));
}

namespace {

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

std::string to_json_line(const VerificationRecord& r) {
    nlohmann::ordered_json j;
    j["theorem"] = r.theorem;
    j["case_id"] = r.case_id;
    j["n"] = r.n;
    j["J"] = r.J;
    j["scope"] = r.scope;
    j["status"] = to_string(r.status);
    auto& in = j["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.inputs) in[k] = v;
    j["lhs"] = number(r.lhs);
    auto& fs = j["factors"] = nlohmann::ordered_json::array();
    for (const auto& f : r.factors) fs.push_back({{"name", f.name}, {"value", number(f.value)}});
    j["constant"] = number(r.constant);
    j["budget"] = number(r.budget);
    j["pass"] = r.pass;
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump();
}

}  // namespace jnkit
