#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pouw/circuit.hpp"
#include "pouw/hash.hpp"
#include "pouw/r1cs.hpp"

// Commitment-based stand-in for a SNARK backend. It reproduces the binding,
// cost and size profile the consensus layer relies on (proving runs the full
// satisfaction check, verification never touches the witness, proofs are 160
// bytes) but it is NOT sound: anyone who can hash can forge a proof that
// mock_verify accepts. It must never guard real value.

namespace pouw {

struct ContributionTag {};
/// 32 bytes of setup randomness from one ceremony participant.
using Contribution = FixedBytes<32, ContributionTag>;

struct ProvingKey {
  CircuitId circuit_id;
  Hash256 r1cs_digest;
  Hash256 setup_seed;

  friend bool operator==(const ProvingKey&, const ProvingKey&) = default;
};

struct VerifyingKey {
  CircuitId circuit_id;
  Hash256 r1cs_digest;
  Hash256 setup_seed;

  friend bool operator==(const VerifyingKey&, const VerifyingKey&) = default;
};

struct MockKeys {
  ProvingKey proving_key;
  VerifyingKey verifying_key;

  friend bool operator==(const MockKeys&, const MockKeys&) = default;
};

struct MockProof {
  static constexpr std::size_t kSize = 160;

  CircuitId circuit_id;
  Hash256 public_input_digest;
  Hash256 witness_commitment;

  /// circuit_id | public_input_digest | witness_commitment | zero padding.
  std::array<std::uint8_t, kSize> serialize() const;
  /// Throws Error(Malformed) on wrong length or nonzero padding.
  static MockProof deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const MockProof&, const MockProof&) = default;
};

/// Hash of the public inputs (integrity value included) in order.
Hash256 public_input_digest(std::span<const std::uint64_t> public_inputs);

/// seed = SHA-256(c_1 | ... | c_n). Throws Error(NoContributions) if empty.
MockKeys mock_setup(const CircuitId& circuit_id, const R1CS& r1cs,
                    std::span<const Contribution> contributions);

/// Runs the full satisfaction check, then commits to the witness.
/// Throws Error(KeyMismatch) if pk was set up for a different R1CS and
/// Error(UnsatisfiedWitness) if the witness fails or disagrees with
/// `public_inputs`.
MockProof mock_prove(const ProvingKey& pk, const R1CS& r1cs, const Witness& witness,
                     std::span<const std::uint64_t> public_inputs);

/// Constant in the constraint count: compares ids and the public-input digest.
bool mock_verify(const VerifyingKey& vk, const MockProof& proof,
                 std::span<const std::uint64_t> public_inputs);

/// Inner proof wrapped with block metadata. Only digests are serialized.
struct OuterProof {
  static constexpr std::size_t kSize = 32 + 32 + 20 + 32;

  std::optional<MockProof> inner;  // prover-side only
  Hash256 inner_digest;
  Hash256 prev_block_hash;
  Address miner_addr;
  Hash256 outer_commitment;

  std::array<std::uint8_t, kSize> serialize() const;
  static OuterProof deserialize(std::span<const std::uint8_t> bytes);
};

OuterProof wrap_outer(const MockProof& inner, const Hash256& prev_block_hash,
                      const Address& miner_addr);
bool verify_outer(const OuterProof& outer, const Hash256& expected_prev_hash,
                  const Address& expected_miner);

}  // namespace pouw
