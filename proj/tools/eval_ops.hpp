#pragma once

// Single-operation evaluation for `jnkit eval OP key=value ...`.
//
// Function-valued arguments (f, h, w, mu) take either a comma list of cell
// values or a quoted function entry such as "martingale seed=3". A list whose
// length is 2^(nJ) is read cell by cell; a shorter list of length 2^(nk) is a
// step function on level-k cubes. Without J= the grid depth is inferred from
// the longest list. Cubes are written cube=level:i[,j]; the default is [0,1)^n.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace jnkit::cli {

using Json = nlohmann::ordered_json;

struct EvalOp {
    std::string summary;
    Json (*run)(const std::map<std::string, std::string>& args);
};

const std::map<std::string, EvalOp>& eval_ops();

/// Throws ConfigError for unknown operations or arguments.
Json evaluate(const std::string& op, const std::vector<std::string>& args);

/// Plain rendering: numbers via shortest round-trip, arrays comma-separated,
/// objects as compact JSON.
std::string render_plain(const Json& value);

}  // namespace jnkit::cli
