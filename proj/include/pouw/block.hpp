#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pouw/mock_proof.hpp"
#include "pouw/protocol.hpp"
#include "pouw/registry.hpp"

namespace pouw {

struct ProofLink {
  ProofTransaction proof_tx;
  IntegrityParameter eta;  // the value the proof was generated against
  MockProof proof;

  friend bool operator==(const ProofLink&, const ProofLink&) = default;
};

struct Block {
  BlockHeader header;
  std::vector<CoinTransaction> coin_txs;
  std::vector<ProofLink> proof_chain;
  Hash256 block_hash;

  friend bool operator==(const Block&, const Block&) = default;
};

/// SHA-256 over canonical(header) and, per link, txid | eta | proof bytes.
Hash256 compute_block_hash(const Block& block);

/// block_hash < lottery_target(p), using the stored hash.
/// Throws Error(EmptyChain) for a block without proofs.
bool lottery_draw(const Block& block, const Rational& p);

/// Client public inputs with the reduced eta spliced in at the circuit's
/// integrity position.
std::vector<std::uint64_t> statement_inputs(const registry::CircuitRecord& record,
                                            std::span<const std::uint64_t> public_inputs,
                                            const IntegrityParameter& eta);

/// Honest prover for one proof transaction under the given eta. `circuit`
/// must be the parsed source of `record`.
MockProof prove_transaction(const Circuit& circuit, const registry::CircuitRecord& record,
                            const ProofTransaction& tx, const IntegrityParameter& eta);

/// Accumulates a proof chain on top of a fixed header.
class BlockBuilder {
 public:
  /// Sets header.coin_root from the coin transactions.
  BlockBuilder(BlockHeader header, std::vector<CoinTransaction> coin_txs);

  const IntegrityParameter& eta() const noexcept { return eta_; }
  const std::vector<std::uint64_t>& complexities() const noexcept { return complexities_; }

  /// Appends a proof made against eta() and advances the chain.
  void append(ProofTransaction tx, const MockProof& proof);

  /// Current chain as a block with its hash filled in.
  Block candidate() const;

 private:
  Block block_;
  IntegrityParameter eta_;
  std::vector<std::uint64_t> complexities_;
};

enum class RejectReason {
  none,
  PrevHashMismatch,
  BlockHashMismatch,
  EmptyChain,
  UnknownCircuit,
  ComplexityMismatch,
  IntegrityChainBroken,
  ProofInvalid,
  BucketViolation,
  LotteryNotWon,
};

std::string_view to_string(RejectReason r);

struct Verdict {
  RejectReason reason = RejectReason::none;
  std::size_t index = 0;  // offending proof link, where relevant
  Hash256 txid;           // offending transaction, where relevant

  bool accepted() const noexcept { return reason == RejectReason::none; }
};

/// Chain state the block is checked against.
struct ChainContext {
  Hash256 prev_hash;
  Difficulty kappa;
  LotteryParams params;
  unsigned k_bits = 0;  // bucket prefix length recorded for this height
};

using RegistryLookup = std::function<const registry::CircuitRecord*(const CircuitId&)>;

/// Reports the first failed check. Re-entrant.
Verdict verify_block(const Block& block, const ChainContext& context, const RegistryLookup& lookup);

nlohmann::ordered_json block_to_json(const Block& block);

}  // namespace pouw
