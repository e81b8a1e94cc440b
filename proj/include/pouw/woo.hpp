#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pouw/circuit.hpp"
#include "pouw/field.hpp"
#include "pouw/hash.hpp"
#include "pouw/mock_proof.hpp"
#include "pouw/r1cs.hpp"

// Witness-obfuscating outsourcing: the client adds a uniform mask to every
// private input, and the transformed circuit removes the mask internally
// with the mask values compiled in as constants. Outputs named `out_*` are
// re-masked into public twins so the worker never sees them in the clear.

namespace pouw::woo {

inline constexpr std::string_view kIntegrityParam = "integrity";
inline constexpr std::string_view kReservedPrefix = "__woo_";

struct MaskVector {
  std::uint64_t modulus = PrimeField::kMersenne61;
  std::vector<std::uint64_t> r_in;   // one per private parameter
  std::vector<std::uint64_t> r_out;  // one per `out_*` local

  friend bool operator==(const MaskVector&, const MaskVector&) = default;
};

/// Expands `seed` with a SHA-256 counter stream; 8-byte chunks are
/// rejection-sampled so every residue is equally likely.
MaskVector sample_masks(const Circuit& circuit, const PrimeField& field, const Hash256& seed);

/// Elementwise s + r. Throws Error(LengthMismatch), Error(MixedFields).
std::vector<FieldElement> mask_inputs(std::span<const FieldElement> private_inputs,
                                      const MaskVector& masks);

/// value - r. Throws Error(MixedFields).
FieldElement unmask(const FieldElement& value, const FieldElement& r);

std::string masked_name(std::string_view name);

struct TransformedCircuit {
  Circuit base;
  MaskVector masks;
  std::string integrity_param = std::string(kIntegrityParam);
  Circuit circuit;  // the transformed program
  R1CS compiled;
};

/// Builds the transformed program:
///   publics:  base publics, __woo_masked_<out>, integrity
///   privates: __woo_masked_<s>, then the original s
/// with one unmasking assert per private input, one masking assert per
/// output and the integrity nonzero gadget appended.
/// Throws Error(NameCollision) if the base already uses `integrity` or a
/// `__woo_` name, Error(LengthMismatch) if masks do not fit.
TransformedCircuit transform_circuit(const Circuit& circuit, const MaskVector& masks,
                                     const PrimeField& field);

/// Values of every `out_*` local for the given base-circuit inputs.
std::vector<std::uint64_t> evaluate_outputs(const Circuit& circuit, const PrimeField& field,
                                            std::span<const std::uint64_t> public_inputs,
                                            std::span<const std::uint64_t> private_inputs);

struct WorkerInstance {
  Witness witness;
  std::vector<std::uint64_t> public_inputs;   // full public vector of the transformed circuit
  std::vector<std::uint64_t> masked_outputs;  // s_out + r_out
};

/// Worker side: builds the transformed witness from base public inputs, the
/// masked private inputs, and the integrity value. Unmasking happens inside
/// using the compiled-in constants.
WorkerInstance worker_instance(const TransformedCircuit& tc,
                               std::span<const std::uint64_t> base_public,
                               std::span<const std::uint64_t> masked_private, std::uint64_t eta);

struct Overhead {
  std::int64_t delta_constraints = 0;
  double base_prove_seconds = 0;
  double transformed_prove_seconds = 0;
  double delta_prove_seconds = 0;
};

/// Constraint delta plus mock_prove timings on matched inputs: medians of
/// each side and the median of paired differences over `repetitions`
/// interleaved runs (order alternating). Throws Error(Mismatch) if `tc` was not
/// derived from `base`.
Overhead woo_overhead(const Circuit& base, const TransformedCircuit& tc,
                      std::span<const std::uint64_t> base_public,
                      std::span<const std::uint64_t> base_private, std::uint64_t eta,
                      int repetitions = 15);

}  // namespace pouw::woo
