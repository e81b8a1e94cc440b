#pragma once

#include <json.hpp>

#include "pouw/r1cs.hpp"

namespace pouw {

/// {"modulus": "<decimal>", "n_vars": N, "n_public": K,
///  "constraints": [[{"<index>": "<decimal>", ...}, {...}, {...}], ...]}
nlohmann::ordered_json r1cs_to_json(const R1CS& r1cs);
/// Throws Error(Malformed) on schema violations or out-of-range indices.
R1CS r1cs_from_json(const nlohmann::json& doc);

}  // namespace pouw
