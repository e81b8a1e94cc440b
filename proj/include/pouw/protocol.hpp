#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pouw/circuit.hpp"
#include "pouw/field.hpp"
#include "pouw/hash.hpp"
#include "pouw/mock_proof.hpp"

namespace pouw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "0.25", "1/4" or "1" into an exact rational. Throws Error(Malformed).
Rational parse_rational(std::string_view text);
double to_double(const Rational& r);

struct CoinTransaction {
  Hash256 txid;
  Bytes payload;
  std::uint64_t fee = 0;

  friend bool operator==(const CoinTransaction&, const CoinTransaction&) = default;
};

/// txid = SHA-256(canonical(payload, fee)).
CoinTransaction make_coin_tx(Bytes payload, std::uint64_t fee);
Hash256 coin_txid(const CoinTransaction& tx);

/// A client's proof request. `public_inputs` excludes the integrity value.
/// `private_inputs` are published with the request (masked under WOO),
/// since any miner must be able to build the witness.
struct ProofTransaction {
  Hash256 txid;
  CircuitId circuit_id;
  std::vector<std::uint64_t> public_inputs;
  std::vector<std::uint64_t> private_inputs;
  std::uint64_t fee = 0;
  std::uint64_t complexity = 0;

  friend bool operator==(const ProofTransaction&, const ProofTransaction&) = default;
};

/// Fills in fee = fee_rate * complexity and the txid.
ProofTransaction make_proof_tx(const CircuitId& circuit_id, std::vector<std::uint64_t> public_inputs,
                               std::vector<std::uint64_t> private_inputs, std::uint64_t complexity,
                               std::uint64_t fee_rate);
Hash256 proof_txid(const ProofTransaction& tx);

struct IntegrityParameter {
  Hash256 eta;

  /// Big-endian digest reduced mod p.
  std::uint64_t to_field(const PrimeField& field) const;

  friend bool operator==(const IntegrityParameter&, const IntegrityParameter&) = default;
};

struct BlockHeader {
  Hash256 prev_hash;
  Address miner_addr;
  std::uint32_t bucket_index = 0;
  Hash256 coin_root;
  std::uint64_t timestamp = 0;

  Bytes canonical() const;

  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

/// Pairwise SHA-256 Merkle root; the last node is duplicated on odd levels
/// and the empty list maps to the zero hash.
Hash256 merkle_root(std::span<const Hash256> leaves);

/// eta_0 = SHA-256(canonical(header) | txid_1 | ... | txid_n).
IntegrityParameter initial_integrity(const BlockHeader& header, std::span<const Hash256> coin_txids);
/// eta' = SHA-256(prev | proof_bytes).
IntegrityParameter next_integrity(const IntegrityParameter& prev, std::span<const std::uint8_t> proof_bytes);
IntegrityParameter next_integrity(const IntegrityParameter& prev, const MockProof& proof);

struct Difficulty {
  std::uint64_t kappa = 1;

  friend bool operator==(const Difficulty&, const Difficulty&) = default;
};

struct LotteryParams {
  Rational psi = 0;
};

/// min(c / kappa, 1). Throws Error(DomainError) if c or kappa is zero.
Rational p_win(std::uint64_t c, Difficulty kappa);
/// min(c_i / kappa + psi * sum_{j<i} c_j / kappa, 1) for the last entry c_i.
/// Throws Error(EmptyChain), Error(DomainError).
Rational p_win_psi(std::span<const std::uint64_t> chain, Difficulty kappa, const LotteryParams& params);

/// floor(p * 2^256). Throws Error(DomainError) outside [0, 1].
BigInt lottery_target(const Rational& p);
BigInt hash_to_int(const Hash256& h);

/// clamp(kappa * target / actual, kappa / 4, 4 kappa), rounded, at least 1.
/// Throws Error(DomainError) on non-positive durations.
Difficulty adjust_difficulty(Difficulty kappa, double actual_window_time, double target_window_time);

/// First k bits of the txid. Throws Error(PrefixTooLong) for k > 32.
std::uint32_t bucket_of(const Hash256& txid, unsigned k_bits);
inline constexpr unsigned kMaxBucketBits = 32;
/// max(0, floor(log2(pending / target))), capped at 32. Throws
/// Error(DomainError) when target is zero.
unsigned bucket_count_policy(std::uint64_t pending, std::uint64_t target_per_bucket);

struct OverlapProbability {
  Rational exact;
  double value = 0;
};
/// 1 - C(m - t, t) / C(m, t). Throws Error(DomainError) unless m >= 2t >= 2.
OverlapProbability p_overlap(std::uint64_t m, std::uint64_t t);
BigInt binomial(std::uint64_t n, std::uint64_t k);

}  // namespace pouw
