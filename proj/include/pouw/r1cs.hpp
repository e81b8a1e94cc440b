#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pouw/circuit.hpp"
#include "pouw/field.hpp"
#include "pouw/hash.hpp"

namespace pouw {

struct Term {
  std::uint32_t var;
  std::uint64_t coeff;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse row, sorted by variable index, no zero coefficients.
using LinearCombination = std::vector<Term>;

struct Constraint {
  LinearCombination a;
  LinearCombination b;
  LinearCombination c;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Variable 0 is the constant ONE; public inputs occupy 1..n_public.
struct R1CS {
  PrimeField field;
  std::size_t n_vars = 1;
  std::size_t n_public = 0;
  std::vector<Constraint> constraints;

  /// True if any row of any constraint has a nonzero coefficient on `var`.
  bool references(std::uint32_t var) const;

  friend bool operator==(const R1CS&, const R1CS&) = default;
};

struct Witness {
  PrimeField field;
  std::vector<std::uint64_t> values;  // values[0] == 1

  FieldElement at(std::size_t i) const { return {field, values.at(i)}; }
  std::span<const std::uint64_t> public_inputs(std::size_t n_public) const {
    return std::span<const std::uint64_t>(values).subspan(1, n_public);
  }
};

/// R1CS variable index of a parameter: publics in declaration order, then
/// privates. Throws Error(NotFound) for unknown names.
std::uint32_t param_var_index(const Circuit& circuit, std::string_view name);

/// Flattens a circuit. Products of two non-constant linear combinations get
/// an auxiliary variable, except a product standing alone on one side of an
/// `==` assert, which becomes that assert's single constraint.
R1CS compile(const Circuit& circuit, const PrimeField& field);

/// Throws Error(ArityMismatch), Error(FieldMismatch), UnsatisfiedAssertion.
Witness generate_witness(const Circuit& circuit, const R1CS& r1cs,
                         std::span<const FieldElement> public_inputs,
                         std::span<const FieldElement> private_inputs);
/// Raw-residue convenience overload; values are reduced mod p.
Witness generate_witness(const Circuit& circuit, const R1CS& r1cs,
                         std::span<const std::uint64_t> public_inputs,
                         std::span<const std::uint64_t> private_inputs);

/// OpenMP kernel. Throws Error(LengthMismatch) when the witness size differs
/// from n_vars.
bool check_satisfaction(const R1CS& r1cs, const Witness& witness);
/// Serial reference kept for tests and benchmarks.
bool check_satisfaction_serial(const R1CS& r1cs, const Witness& witness);

inline std::size_t constraint_count(const R1CS& r1cs) noexcept { return r1cs.constraints.size(); }

/// SHA-256 over the canonical R1CS encoding.
Hash256 r1cs_digest(const R1CS& r1cs);

}  // namespace pouw
