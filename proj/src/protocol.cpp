#include "pouw/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

#include "pouw/error.hpp"

namespace pouw {

Rational parse_rational(std::string_view text) {
  auto digits = [&](std::string_view s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(Errc::Malformed, "not a non-negative rational: '" + std::string(text) + "'");
    }
    return BigInt(std::string(s));
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt den = digits(text.substr(slash + 1));
    if (den == 0) throw Error(Errc::Malformed, "zero denominator in '" + std::string(text) + "'");
    return Rational(digits(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    BigInt whole = dot == 0 ? BigInt(0) : digits(text.substr(0, dot));
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    return Rational(whole * scale + digits(frac), scale);
  }
  return Rational(digits(text));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Hash256 coin_txid(const CoinTransaction& tx) {
  CanonicalWriter w;
  w.text("coin").bytes(tx.payload).u64(tx.fee);
  return sha256(w.data());
}

CoinTransaction make_coin_tx(Bytes payload, std::uint64_t fee) {
  CoinTransaction tx{{}, std::move(payload), fee};
  tx.txid = coin_txid(tx);
  return tx;
}

Hash256 proof_txid(const ProofTransaction& tx) {
  CanonicalWriter w;
  w.text("proof").fixed(tx.circuit_id).u32(static_cast<std::uint32_t>(tx.public_inputs.size()));
  for (auto v : tx.public_inputs) w.u64(v);
  w.u32(static_cast<std::uint32_t>(tx.private_inputs.size()));
  for (auto v : tx.private_inputs) w.u64(v);
  w.u64(tx.fee).u64(tx.complexity);
  return sha256(w.data());
}

ProofTransaction make_proof_tx(const CircuitId& circuit_id, std::vector<std::uint64_t> public_inputs,
                               std::vector<std::uint64_t> private_inputs, std::uint64_t complexity,
                               std::uint64_t fee_rate) {
  ProofTransaction tx{{}, circuit_id, std::move(public_inputs), std::move(private_inputs),
                      fee_rate * complexity, complexity};
  tx.txid = proof_txid(tx);
  return tx;
}

std::uint64_t IntegrityParameter::to_field(const PrimeField& field) const {
  return field.from_bytes_be(eta.span());
}

Bytes BlockHeader::canonical() const {
  CanonicalWriter w;
  w.fixed(prev_hash).fixed(miner_addr).u32(bucket_index).fixed(coin_root).u64(timestamp);
  return w.take();
}

Hash256 merkle_root(std::span<const Hash256> leaves) {
  if (leaves.empty()) return Hash256{};
  std::vector<Hash256> level(leaves.begin(), leaves.end());
  while (level.size() > 1) {
    if (level.size() % 2) level.push_back(level.back());
    std::vector<Hash256> up;
    up.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      up.push_back(Sha256().update(level[i]).update(level[i + 1]).finish());
    }
    level = std::move(up);
  }
  return level.front();
}

IntegrityParameter initial_integrity(const BlockHeader& header, std::span<const Hash256> coin_txids) {
  Sha256 h;
  h.update(header.canonical());
  for (const auto& id : coin_txids) h.update(id);
  return {h.finish()};
}

IntegrityParameter next_integrity(const IntegrityParameter& prev, std::span<const std::uint8_t> proof_bytes) {
  return {Sha256().update(prev.eta).update(proof_bytes).finish()};
}

IntegrityParameter next_integrity(const IntegrityParameter& prev, const MockProof& proof) {
  const auto bytes = proof.serialize();
  return next_integrity(prev, std::span<const std::uint8_t>(bytes));
}

Rational p_win(std::uint64_t c, Difficulty kappa) {
  const std::uint64_t chain[] = {c};
  return p_win_psi(chain, kappa, LotteryParams{});
}

Rational p_win_psi(std::span<const std::uint64_t> chain, Difficulty kappa, const LotteryParams& params) {
  if (chain.empty()) throw Error(Errc::EmptyChain, "lottery needs at least one proof");
  if (kappa.kappa == 0) throw Error(Errc::DomainError, "difficulty must be positive");
  if (params.psi < 0 || params.psi > 1) throw Error(Errc::DomainError, "psi must lie in [0, 1]");
  BigInt earlier = 0;
  for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
    if (chain[j] == 0) throw Error(Errc::DomainError, "proof complexity must be positive");
    earlier += chain[j];
  }
  if (chain.back() == 0) throw Error(Errc::DomainError, "proof complexity must be positive");
  Rational p = (Rational(chain.back()) + params.psi * Rational(earlier)) / Rational(kappa.kappa);
  return p > 1 ? Rational(1) : p;
}

BigInt lottery_target(const Rational& p) {
  if (p < 0 || p > 1) throw Error(Errc::DomainError, "probability outside [0, 1]");
  const BigInt two256 = BigInt(1) << 256;
  return boost::multiprecision::numerator(p) * two256 / boost::multiprecision::denominator(p);
}

BigInt hash_to_int(const Hash256& h) {
  BigInt v;
  boost::multiprecision::import_bits(v, h.bytes.begin(), h.bytes.end(), 8, true);
  return v;
}

Difficulty adjust_difficulty(Difficulty kappa, double actual_window_time, double target_window_time) {
  if (!(actual_window_time > 0) || !(target_window_time > 0)) {
    throw Error(Errc::DomainError, "window durations must be positive");
  }
  const long double k = static_cast<long double>(kappa.kappa);
  long double next = k * target_window_time / actual_window_time;
  next = std::clamp(next, k / 4, k * 4);
  const long double rounded = std::round(next);
  return Difficulty{rounded < 1 ? 1 : static_cast<std::uint64_t>(rounded)};
}

std::uint32_t bucket_of(const Hash256& txid, unsigned k_bits) {
  if (k_bits > kMaxBucketBits) {
    throw Error(Errc::PrefixTooLong, "bucket prefix of " + std::to_string(k_bits) + " bits");
  }
  if (k_bits == 0) return 0;
  std::uint32_t head = std::uint32_t{txid.bytes[0]} << 24 | std::uint32_t{txid.bytes[1]} << 16 |
                       std::uint32_t{txid.bytes[2]} << 8 | txid.bytes[3];
  return head >> (32 - k_bits);
}

unsigned bucket_count_policy(std::uint64_t pending, std::uint64_t target_per_bucket) {
  if (target_per_bucket == 0) throw Error(Errc::DomainError, "target per bucket must be positive");
  const std::uint64_t q = pending / target_per_bucket;
  if (q == 0) return 0;
  return std::min<unsigned>(static_cast<unsigned>(std::bit_width(q)) - 1, kMaxBucketBits);
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

OverlapProbability p_overlap(std::uint64_t m, std::uint64_t t) {
  if (t < 1 || m < 2 * t) {
    throw Error(Errc::DomainError, "overlap needs m >= 2t >= 2, got m=" + std::to_string(m) +
                                       " t=" + std::to_string(t));
  }
  Rational exact = 1 - Rational(binomial(m - t, t), binomial(m, t));
  return {exact, to_double(exact)};
}

}  // namespace pouw
