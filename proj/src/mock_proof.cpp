#include "pouw/mock_proof.hpp"

#include <algorithm>

#include "pouw/error.hpp"

namespace pouw {

namespace {

template <std::size_t N, class Tag>
void put(std::uint8_t*& out, const FixedBytes<N, Tag>& v) {
  out = std::copy(v.bytes.begin(), v.bytes.end(), out);
}

template <std::size_t N, class Tag>
void get(const std::uint8_t*& in, FixedBytes<N, Tag>& v) {
  std::copy(in, in + N, v.bytes.begin());
  in += N;
}

Hash256 witness_commitment(const Hash256& seed, const Witness& witness) {
  Sha256 h;
  h.update(seed);
  Bytes chunk;
  chunk.reserve(8 * 4096);
  for (std::size_t i = 0; i < witness.values.size(); ++i) {
    append_u64_be(chunk, witness.values[i]);
    if (chunk.size() >= 8 * 4096) {
      h.update(chunk);
      chunk.clear();
    }
  }
  h.update(chunk);
  return h.finish();
}

Hash256 outer_commitment(const Hash256& inner_digest, const Hash256& prev, const Address& miner) {
  return Sha256().update(inner_digest).update(prev).update(miner).finish();
}

}  // namespace

std::array<std::uint8_t, MockProof::kSize> MockProof::serialize() const {
  std::array<std::uint8_t, kSize> out{};
  std::uint8_t* p = out.data();
  put(p, circuit_id);
  put(p, public_input_digest);
  put(p, witness_commitment);
  return out;
}

MockProof MockProof::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kSize) {
    throw Error(Errc::Malformed, "mock proof must be " + std::to_string(kSize) + " bytes");
  }
  if (std::any_of(bytes.begin() + 96, bytes.end(), [](std::uint8_t b) { return b != 0; })) {
    throw Error(Errc::Malformed, "nonzero proof padding");
  }
  MockProof p;
  const std::uint8_t* in = bytes.data();
  get(in, p.circuit_id);
  get(in, p.public_input_digest);
  get(in, p.witness_commitment);
  return p;
}

Hash256 public_input_digest(std::span<const std::uint64_t> public_inputs) {
  CanonicalWriter w;
  w.text("pouw-public-inputs").u64(public_inputs.size());
  for (auto v : public_inputs) w.u64(v);
  return sha256(w.data());
}

MockKeys mock_setup(const CircuitId& circuit_id, const R1CS& r1cs,
                    std::span<const Contribution> contributions) {
  if (contributions.empty()) throw Error(Errc::NoContributions, "setup needs at least one contribution");
  Sha256 h;
  for (const auto& c : contributions) h.update(c);
  const Hash256 seed = h.finish();
  const Hash256 digest = r1cs_digest(r1cs);
  return MockKeys{ProvingKey{circuit_id, digest, seed}, VerifyingKey{circuit_id, digest, seed}};
}

MockProof mock_prove(const ProvingKey& pk, const R1CS& r1cs, const Witness& witness,
                     std::span<const std::uint64_t> public_inputs) {
  if (r1cs_digest(r1cs) != pk.r1cs_digest) {
    throw Error(Errc::KeyMismatch, "proving key belongs to a different R1CS");
  }
  if (public_inputs.size() != r1cs.n_public || witness.values.size() != r1cs.n_vars ||
      !std::equal(public_inputs.begin(), public_inputs.end(), witness.values.begin() + 1)) {
    throw Error(Errc::UnsatisfiedWitness, "witness does not match the public inputs");
  }
  if (!check_satisfaction(r1cs, witness)) {
    throw Error(Errc::UnsatisfiedWitness, "witness violates the constraint system");
  }
  return MockProof{pk.circuit_id, public_input_digest(public_inputs),
                   witness_commitment(pk.setup_seed, witness)};
}

bool mock_verify(const VerifyingKey& vk, const MockProof& proof,
                 std::span<const std::uint64_t> public_inputs) {
  return proof.circuit_id == vk.circuit_id &&
         proof.public_input_digest == public_input_digest(public_inputs);
}

std::array<std::uint8_t, OuterProof::kSize> OuterProof::serialize() const {
  std::array<std::uint8_t, kSize> out{};
  std::uint8_t* p = out.data();
  put(p, inner_digest);
  put(p, prev_block_hash);
  put(p, miner_addr);
  put(p, outer_commitment);
  return out;
}

OuterProof OuterProof::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kSize) {
    throw Error(Errc::Malformed, "outer proof must be " + std::to_string(kSize) + " bytes");
  }
  OuterProof o;
  const std::uint8_t* in = bytes.data();
  get(in, o.inner_digest);
  get(in, o.prev_block_hash);
  get(in, o.miner_addr);
  get(in, o.outer_commitment);
  return o;
}

OuterProof wrap_outer(const MockProof& inner, const Hash256& prev_block_hash,
                      const Address& miner_addr) {
  OuterProof o;
  o.inner = inner;
  o.inner_digest = sha256(inner.serialize());
  o.prev_block_hash = prev_block_hash;
  o.miner_addr = miner_addr;
  o.outer_commitment = outer_commitment(o.inner_digest, prev_block_hash, miner_addr);
  return o;
}

bool verify_outer(const OuterProof& outer, const Hash256& expected_prev_hash,
                  const Address& expected_miner) {
  return outer.prev_block_hash == expected_prev_hash && outer.miner_addr == expected_miner &&
         outer.outer_commitment ==
             outer_commitment(outer.inner_digest, expected_prev_hash, expected_miner);
}

}  // namespace pouw
