#include "pouw/r1cs_json.hpp"

#include <algorithm>

#include "pouw/error.hpp"

namespace pouw {

namespace {

nlohmann::ordered_json row_to_json(const LinearCombination& lc) {
  auto obj = nlohmann::ordered_json::object();
  for (const auto& t : lc) obj[std::to_string(t.var)] = std::to_string(t.coeff);
  return obj;
}

LinearCombination row_from_json(const nlohmann::json& obj, const R1CS& r1cs) {
  if (!obj.is_object()) throw Error(Errc::Malformed, "constraint row must be an object");
  LinearCombination lc;
  for (const auto& [key, val] : obj.items()) {
    if (!val.is_string()) throw Error(Errc::Malformed, "coefficient must be a decimal string");
    std::size_t used = 0;
    unsigned long long idx = 0;
    try {
      idx = std::stoull(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty()) throw Error(Errc::Malformed, "bad variable index " + key);
    if (idx >= r1cs.n_vars) throw Error(Errc::Malformed, "variable index out of range: " + key);
    std::uint64_t c = r1cs.field.from_decimal(val.get<std::string>());
    if (c != 0) lc.push_back({static_cast<std::uint32_t>(idx), c});
  }
  std::sort(lc.begin(), lc.end(), [](const Term& x, const Term& y) { return x.var < y.var; });
  return lc;
}

}  // namespace

nlohmann::ordered_json r1cs_to_json(const R1CS& r1cs) {
  nlohmann::ordered_json doc;
  doc["modulus"] = std::to_string(r1cs.field.modulus());
  doc["n_vars"] = r1cs.n_vars;
  doc["n_public"] = r1cs.n_public;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : r1cs.constraints) {
    rows.push_back(nlohmann::ordered_json::array(
        {row_to_json(c.a), row_to_json(c.b), row_to_json(c.c)}));
  }
  doc["constraints"] = std::move(rows);
  return doc;
}

R1CS r1cs_from_json(const nlohmann::json& doc) {
  try {
    R1CS r1cs;
    r1cs.field = PrimeField(std::stoull(doc.at("modulus").get<std::string>()));
    r1cs.n_vars = doc.at("n_vars").get<std::size_t>();
    r1cs.n_public = doc.at("n_public").get<std::size_t>();
    if (r1cs.n_vars == 0 || r1cs.n_public >= r1cs.n_vars) {
      throw Error(Errc::Malformed, "inconsistent n_vars/n_public");
    }
    for (const auto& row : doc.at("constraints")) {
      if (!row.is_array() || row.size() != 3) {
        throw Error(Errc::Malformed, "constraint must be a list of three rows");
      }
      r1cs.constraints.push_back(
          {row_from_json(row[0], r1cs), row_from_json(row[1], r1cs), row_from_json(row[2], r1cs)});
    }
    return r1cs;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  } catch (const std::logic_error& e) {
    throw Error(Errc::Malformed, e.what());
  }
}

}  // namespace pouw
