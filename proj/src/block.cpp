#include "pouw/block.hpp"

#include "pouw/error.hpp"

namespace pouw {

Hash256 compute_block_hash(const Block& block) {
  CanonicalWriter w;
  w.bytes(block.header.canonical()).u32(static_cast<std::uint32_t>(block.proof_chain.size()));
  for (const auto& link : block.proof_chain) {
    w.fixed(link.proof_tx.txid).fixed(link.eta.eta).bytes(link.proof.serialize());
  }
  return sha256(w.data());
}

bool lottery_draw(const Block& block, const Rational& p) {
  if (block.proof_chain.empty()) throw Error(Errc::EmptyChain, "candidate block has no proofs");
  return hash_to_int(block.block_hash) < lottery_target(p);
}

std::vector<std::uint64_t> statement_inputs(const registry::CircuitRecord& record,
                                            std::span<const std::uint64_t> public_inputs,
                                            const IntegrityParameter& eta) {
  const PrimeField& f = record.r1cs.field;
  std::vector<std::uint64_t> out;
  out.reserve(public_inputs.size() + 1);
  for (auto v : public_inputs) out.push_back(f.reduce(v));
  const std::size_t pos = std::min<std::size_t>(record.integrity_position, out.size());
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), eta.to_field(f));
  return out;
}

MockProof prove_transaction(const Circuit& circuit, const registry::CircuitRecord& record,
                            const ProofTransaction& tx, const IntegrityParameter& eta) {
  const auto pub = statement_inputs(record, tx.public_inputs, eta);
  const Witness w = generate_witness(circuit, record.r1cs, std::span<const std::uint64_t>(pub),
                                     std::span<const std::uint64_t>(tx.private_inputs));
  return mock_prove(record.keys.proving_key, record.r1cs, w, pub);
}

BlockBuilder::BlockBuilder(BlockHeader header, std::vector<CoinTransaction> coin_txs) {
  std::vector<Hash256> ids;
  for (const auto& tx : coin_txs) ids.push_back(tx.txid);
  header.coin_root = merkle_root(ids);
  eta_ = initial_integrity(header, ids);
  block_.header = header;
  block_.coin_txs = std::move(coin_txs);
}

void BlockBuilder::append(ProofTransaction tx, const MockProof& proof) {
  complexities_.push_back(tx.complexity);
  block_.proof_chain.push_back(ProofLink{std::move(tx), eta_, proof});
  eta_ = next_integrity(eta_, proof);
}

Block BlockBuilder::candidate() const {
  Block b = block_;
  b.block_hash = compute_block_hash(b);
  return b;
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "accepted";
    case RejectReason::PrevHashMismatch: return "PrevHashMismatch";
    case RejectReason::BlockHashMismatch: return "BlockHashMismatch";
    case RejectReason::EmptyChain: return "EmptyChain";
    case RejectReason::UnknownCircuit: return "UnknownCircuit";
    case RejectReason::ComplexityMismatch: return "ComplexityMismatch";
    case RejectReason::IntegrityChainBroken: return "IntegrityChainBroken";
    case RejectReason::ProofInvalid: return "ProofInvalid";
    case RejectReason::BucketViolation: return "BucketViolation";
    case RejectReason::LotteryNotWon: return "LotteryNotWon";
  }
  return "?";
}

Verdict verify_block(const Block& block, const ChainContext& ctx, const RegistryLookup& lookup) {
  auto reject = [](RejectReason r, std::size_t i = 0, Hash256 txid = {}) { return Verdict{r, i, txid}; };

  if (block.header.prev_hash != ctx.prev_hash) return reject(RejectReason::PrevHashMismatch);
  if (compute_block_hash(block) != block.block_hash) return reject(RejectReason::BlockHashMismatch);
  if (block.proof_chain.empty()) return reject(RejectReason::EmptyChain);

  std::vector<const registry::CircuitRecord*> records;
  std::vector<std::uint64_t> complexities;
  for (std::size_t i = 0; i < block.proof_chain.size(); ++i) {
    const auto& tx = block.proof_chain[i].proof_tx;
    const auto* rec = lookup ? lookup(tx.circuit_id) : nullptr;
    if (!rec) return reject(RejectReason::UnknownCircuit, i, tx.txid);
    if (tx.complexity != rec->complexity) return reject(RejectReason::ComplexityMismatch, i, tx.txid);
    records.push_back(rec);
    complexities.push_back(tx.complexity);
  }

  std::vector<Hash256> coin_ids;
  for (const auto& tx : block.coin_txs) coin_ids.push_back(tx.txid);
  if (merkle_root(coin_ids) != block.header.coin_root) return reject(RejectReason::IntegrityChainBroken);
  IntegrityParameter eta = initial_integrity(block.header, coin_ids);
  for (std::size_t i = 0; i < block.proof_chain.size(); ++i) {
    const auto& link = block.proof_chain[i];
    if (link.eta != eta) return reject(RejectReason::IntegrityChainBroken, i, link.proof_tx.txid);
    eta = next_integrity(eta, link.proof);
  }

  for (std::size_t i = 0; i < block.proof_chain.size(); ++i) {
    const auto& link = block.proof_chain[i];
    const auto* rec = records[i];
    if (link.proof_tx.public_inputs.size() + 1 != rec->r1cs.n_public ||
        !mock_verify(rec->keys.verifying_key, link.proof,
                     statement_inputs(*rec, link.proof_tx.public_inputs, link.eta))) {
      return reject(RejectReason::ProofInvalid, i, link.proof_tx.txid);
    }
  }

  if (ctx.k_bits < 32 && block.header.bucket_index >> ctx.k_bits != 0) {
    return reject(RejectReason::BucketViolation);
  }
  for (const auto& tx : block.coin_txs) {
    if (bucket_of(tx.txid, ctx.k_bits) != block.header.bucket_index) {
      return reject(RejectReason::BucketViolation, 0, tx.txid);
    }
  }
  for (std::size_t i = 0; i < block.proof_chain.size(); ++i) {
    const auto& tx = block.proof_chain[i].proof_tx;
    if (tx.txid != proof_txid(tx) || bucket_of(tx.txid, ctx.k_bits) != block.header.bucket_index) {
      return reject(RejectReason::BucketViolation, i, tx.txid);
    }
  }

  if (!lottery_draw(block, p_win_psi(complexities, ctx.kappa, ctx.params))) {
    return reject(RejectReason::LotteryNotWon);
  }
  return {};
}

nlohmann::ordered_json block_to_json(const Block& b) {
  using nlohmann::ordered_json;
  ordered_json coins = ordered_json::array();
  for (const auto& tx : b.coin_txs) {
    coins.push_back({{"txid", to_hex(tx.txid)}, {"payload", to_hex(tx.payload)}, {"fee", tx.fee}});
  }
  ordered_json chain = ordered_json::array();
  for (const auto& link : b.proof_chain) {
    const auto& tx = link.proof_tx;
    chain.push_back({{"proof_tx",
                      {{"txid", to_hex(tx.txid)},
                       {"circuit_id", to_hex(tx.circuit_id)},
                       {"public_inputs", tx.public_inputs},
                       {"private_inputs", tx.private_inputs},
                       {"fee", tx.fee},
                       {"complexity", tx.complexity}}},
                     {"eta", to_hex(link.eta.eta)},
                     {"proof", to_hex(link.proof.serialize())}});
  }
  return ordered_json{{"header",
                       {{"prev_hash", to_hex(b.header.prev_hash)},
                        {"miner_addr", to_hex(b.header.miner_addr)},
                        {"bucket_index", b.header.bucket_index},
                        {"coin_root", to_hex(b.header.coin_root)},
                        {"timestamp", b.header.timestamp}}},
                      {"coin_txs", coins},
                      {"proof_chain", chain},
                      {"block_hash", to_hex(b.block_hash)}};
}

}  // namespace pouw
