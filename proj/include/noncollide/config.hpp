#pragma once

#include <string>

#include <json.hpp>

#include "noncollide/model.hpp"

namespace noncollide {

// JSON configuration schema:
//   { "d": int,
//     "gamma": {"kind": "scalar"|"matrix", "value": number | [[number]]},
//     "sigma": {"kind": "identity"|"diag"|"matrix", "value": number[] | [[number]]},
//     "drift": {"kind": "zero"} | {"kind": "affine", "slope": number, "intercepts": [number]},
//     "x0": [number],
//     "horizon": number }
// "scalar" gamma expands to gamma_ij = value for all i != j (the Dyson case).
// Throws std::runtime_error with a one-line message on malformed input.
SystemSpec spec_from_json(const nlohmann::json& j);
SystemSpec load_spec(const std::string& path);

// Canonical serialization (sorted keys, full-precision numbers); two specs
// with equal canonical forms behave identically.
nlohmann::json spec_to_json(const SystemSpec& spec);

// SHA-256 of the canonical serialization; the spec hash embedded in outputs.
std::string spec_hash(const SystemSpec& spec);

}  // namespace noncollide
