#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "pouw/error.hpp"
#include "pouw/hash.hpp"
#include "pouw/protocol.hpp"

using namespace pouw;

namespace {

Hash256 random_hash(std::mt19937_64& rng) {
  Hash256 h;
  for (auto& b : h.bytes) b = static_cast<std::uint8_t>(rng());
  return h;
}

BlockHeader sample_header() {
  BlockHeader h;
  for (std::size_t i = 0; i < 32; ++i) h.prev_hash.bytes[i] = static_cast<std::uint8_t>(i);
  for (std::size_t i = 0; i < 20; ++i) h.miner_addr.bytes[i] = static_cast<std::uint8_t>(0xa0 + i);
  h.bucket_index = 3;
  h.coin_root.bytes[31] = 9;
  h.timestamp = 0x0102030405060708ULL;
  return h;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::Malformed;
}

/// All t-subsets of [m] as bit masks (m <= 16).
std::vector<std::uint32_t> subsets(unsigned m, unsigned t) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    if (static_cast<unsigned>(__builtin_popcount(s)) == t) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("SHA-256 known vectors") {
    CHECK(to_hex(sha256(std::string_view("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(to_hex(sha256(std::string_view(""))) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(to_hex(Sha256().update("a").update("bc").finish()) == to_hex(sha256(std::string_view("abc"))));
    CHECK(fixed_from_hex<Hash256>(to_hex(sha256(std::string_view("abc")))) == sha256(std::string_view("abc")));
    CHECK_THROWS_AS(fixed_from_hex<Hash256>("abcd"), Error);
    CHECK_THROWS_AS(from_hex("0g"), Error);
  }

  TEST_CASE("canonical header layout") {
    const BlockHeader h = sample_header();
    Bytes expected;
    auto field = [&](std::span<const std::uint8_t> data) {
      append_u32_be(expected, static_cast<std::uint32_t>(data.size()));
      expected.insert(expected.end(), data.begin(), data.end());
    };
    field(h.prev_hash.span());
    field(h.miner_addr.span());
    const std::uint8_t bucket[] = {0, 0, 0, 3};
    field(bucket);
    field(h.coin_root.span());
    const std::uint8_t ts[] = {1, 2, 3, 4, 5, 6, 7, 8};
    field(ts);
    CHECK(h.canonical() == expected);
    CHECK(expected.size() == 116);
  }

  TEST_CASE("initial integrity") {
    const BlockHeader h = sample_header();
    CHECK(initial_integrity(h, {}).eta == sha256(h.canonical()));
    CHECK(initial_integrity(h, {}) == initial_integrity(h, {}));

    std::mt19937_64 rng(1);
    const std::vector<Hash256> coins{random_hash(rng), random_hash(rng)};
    Bytes joined = h.canonical();
    for (const auto& c : coins) joined.insert(joined.end(), c.bytes.begin(), c.bytes.end());
    CHECK(initial_integrity(h, coins).eta == sha256(joined));

    BlockHeader flipped = h;
    flipped.prev_hash.bytes[0] ^= 0x80;
    CHECK(initial_integrity(flipped, {}) != initial_integrity(h, {}));
  }

  TEST_CASE("unforgeability: eta_0 depends on prev_hash") {
    std::mt19937_64 rng(99);
    BlockHeader h = sample_header();
    const IntegrityParameter base = initial_integrity(h, {});
    for (int i = 0; i < 10000; ++i) {
      BlockHeader other = h;
      other.prev_hash = random_hash(rng);
      if (other.prev_hash == h.prev_hash) continue;
      REQUIRE(initial_integrity(other, {}) != base);
    }
  }

  TEST_CASE("next integrity") {
    const IntegrityParameter zero{};
    CHECK(next_integrity(zero, std::span<const std::uint8_t>{}).eta == sha256(Bytes(32, 0)));

    std::mt19937_64 rng(5);
    const IntegrityParameter eta0 = initial_integrity(sample_header(), {});
    std::vector<Bytes> proofs(3, Bytes(160));
    for (auto& p : proofs) std::generate(p.begin(), p.end(), [&] { return static_cast<std::uint8_t>(rng()); });
    auto chain = [&](const std::vector<Bytes>& ps) {
      IntegrityParameter e = eta0;
      for (const auto& p : ps) e = next_integrity(e, p);
      return e;
    };
    const IntegrityParameter eta3 = chain(proofs);
    CHECK(chain(proofs) == eta3);
    for (std::size_t i = 0; i < proofs.size(); ++i) {
      auto altered = proofs;
      altered[i][17] ^= 1;
      CHECK(chain(altered) != eta3);
    }
  }

  TEST_CASE("eta reduces big-endian into the field") {
    IntegrityParameter e;
    e.eta.bytes[31] = 0x10;
    e.eta.bytes[30] = 0x01;
    CHECK(e.to_field(PrimeField(11)) == 0x0110 % 11);
    CHECK(e.to_field(PrimeField()) == 0x0110);
  }

  TEST_CASE("merkle root") {
    std::mt19937_64 rng(2);
    const Hash256 a = random_hash(rng), b = random_hash(rng), c = random_hash(rng);
    CHECK(merkle_root({}) == Hash256{});
    const Hash256 one[] = {a};
    CHECK(merkle_root(one) == a);
    const Hash256 two[] = {a, b};
    const Hash256 ab = Sha256().update(a).update(b).finish();
    CHECK(merkle_root(two) == ab);
    const Hash256 three[] = {a, b, c};
    const Hash256 cc = Sha256().update(c).update(c).finish();
    CHECK(merkle_root(three) == Sha256().update(ab).update(cc).finish());
  }

  TEST_CASE("transactions") {
    const CoinTransaction tx = make_coin_tx({1, 2, 3}, 5);
    CHECK(tx.txid == coin_txid(tx));
    CHECK(make_coin_tx({1, 2, 3}, 6).txid != tx.txid);
    const ProofTransaction p = make_proof_tx(sha256(std::string_view("c")), {15}, {3, 5}, 2, 7);
    CHECK(p.fee == 14);
    CHECK(p.complexity == 2);
    CHECK(p.txid == proof_txid(p));
    CHECK(make_proof_tx(sha256(std::string_view("c")), {16}, {3, 5}, 2, 7).txid != p.txid);
  }

  TEST_CASE("p_win") {
    CHECK(p_win(100000, Difficulty{100000}) == 1);
    CHECK(p_win(1000, Difficulty{100000}) == Rational(1, 100));
    CHECK(p_win(200000, Difficulty{100000}) == 1);
    CHECK(code_of([] { p_win(0, Difficulty{10}); }) == Errc::DomainError);
    CHECK(code_of([] { p_win(1, Difficulty{0}); }) == Errc::DomainError);
  }

  TEST_CASE("p_win_psi") {
    const std::uint64_t chain[] = {10, 20};
    CHECK(p_win_psi(chain, Difficulty{100}, LotteryParams{Rational(1, 2)}) == Rational(1, 4));
    const std::uint64_t partial[] = {50, 60};
    CHECK(p_win_psi(partial, Difficulty{100}, LotteryParams{Rational(1, 2)}) == Rational(17, 20));
    const std::uint64_t clamp[] = {80, 60};
    CHECK(p_win_psi(clamp, Difficulty{100}, LotteryParams{Rational(1, 2)}) == 1);
    CHECK(p_win_psi(clamp, Difficulty{100}, LotteryParams{Rational(1)}) == 1);
    CHECK(code_of([] { p_win_psi({}, Difficulty{100}, LotteryParams{}); }) == Errc::EmptyChain);

    std::mt19937_64 rng(8);
    for (int i = 0; i < 500; ++i) {
      std::vector<std::uint64_t> c(1 + rng() % 6);
      for (auto& v : c) v = 1 + rng() % 500;
      const Difficulty k{1 + rng() % 5000};
      // psi = 0 reduces to p_win of the newest proof.
      REQUIRE(p_win_psi(c, k, LotteryParams{0}) == p_win(c.back(), k));
      // Non-decreasing in psi and in every entry.
      Rational prev = -1;
      for (int q = 0; q <= 4; ++q) {
        const Rational p = p_win_psi(c, k, LotteryParams{Rational(q, 4)});
        REQUIRE(p >= prev);
        REQUIRE(p <= 1);
        prev = p;
      }
      auto bigger = c;
      bigger[rng() % bigger.size()] += 1 + rng() % 100;
      REQUIRE(p_win_psi(bigger, k, LotteryParams{Rational(1, 3)}) >= p_win_psi(c, k, LotteryParams{Rational(1, 3)}));
    }
  }

  TEST_CASE("parse_rational") {
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("1/4") == Rational(1, 4));
    CHECK(parse_rational("1") == 1);
    CHECK(parse_rational("0") == 0);
    CHECK_THROWS_AS(parse_rational("-1"), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("x"), Error);
  }

  TEST_CASE("lottery target") {
    const BigInt two256 = BigInt(1) << 256;
    CHECK(lottery_target(1) == two256);
    CHECK(lottery_target(0) == 0);
    CHECK(lottery_target(Rational(1, 2)) == (BigInt(1) << 255));
    CHECK(lottery_target(Rational(1, 3)) == two256 / 3);
    CHECK(code_of([] { lottery_target(Rational(3, 2)); }) == Errc::DomainError);
    Hash256 top;
    top.bytes.fill(0xff);
    CHECK(hash_to_int(top) == two256 - 1);
    Hash256 one;
    one.bytes[31] = 1;
    CHECK(hash_to_int(one) == 1);
  }

  TEST_CASE("difficulty retarget") {
    CHECK(adjust_difficulty(Difficulty{1000}, 10, 10).kappa == 1000);
    CHECK(adjust_difficulty(Difficulty{1000}, 5, 10).kappa == 2000);
    CHECK(adjust_difficulty(Difficulty{1000}, 0.1, 10).kappa == 4000);
    CHECK(adjust_difficulty(Difficulty{1000}, 1000, 10).kappa == 250);
    CHECK(adjust_difficulty(Difficulty{1000}, 3, 10).kappa == 3333);
    CHECK(adjust_difficulty(Difficulty{1}, 100, 10).kappa == 1);
    CHECK(code_of([] { adjust_difficulty(Difficulty{10}, 0, 10); }) == Errc::DomainError);
    CHECK(code_of([] { adjust_difficulty(Difficulty{10}, 1, -1); }) == Errc::DomainError);
  }

  TEST_CASE("bucket_of") {
    std::mt19937_64 rng(4);
    Hash256 h = random_hash(rng);
    CHECK(bucket_of(h, 0) == 0);
    h.bytes[0] = 0b10110110;
    CHECK(bucket_of(h, 3) == 5);
    CHECK(bucket_of(h, 1) == 1);
    CHECK(bucket_of(h, 8) == 0b10110110);
    h.bytes = {};
    h.bytes[0] = 0xde;
    h.bytes[1] = 0xad;
    h.bytes[2] = 0xbe;
    h.bytes[3] = 0xef;
    CHECK(bucket_of(h, 32) == 0xdeadbeefu);
    CHECK(bucket_of(h, 12) == 0xdea);
    CHECK(code_of([&] { bucket_of(h, 33); }) == Errc::PrefixTooLong);
  }

  TEST_CASE("bucket_of is uniform on random txids") {
    std::mt19937_64 rng(12345);
    std::vector<double> counts(16, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[bucket_of(random_hash(rng), 4)] += 1;
    double chi2 = 0;
    for (double c : counts) chi2 += (c - n / 16.0) * (c - n / 16.0) / (n / 16.0);
    // Upper 1% point of chi-square with 15 degrees of freedom.
    CHECK(chi2 < 30.578);
  }

  TEST_CASE("bucket_count_policy") {
    CHECK(bucket_count_policy(0, 64) == 0);
    CHECK(bucket_count_policy(63, 64) == 0);
    CHECK(bucket_count_policy(64, 64) == 0);
    CHECK(bucket_count_policy(128, 64) == 1);
    CHECK(bucket_count_policy(8 * 64, 64) == 3);
    CHECK(bucket_count_policy(8 * 64 - 1, 64) == 2);
    CHECK(code_of([] { bucket_count_policy(10, 0); }) == Errc::DomainError);
    unsigned prev = 0;
    for (std::uint64_t pending = 0; pending <= 1000000; pending += 97) {
      const unsigned k = bucket_count_policy(pending, 50);
      REQUIRE(k >= prev);
      prev = k;
    }
  }

  TEST_CASE("p_overlap examples") {
    CHECK(p_overlap(2, 1).exact == Rational(1, 2));
    CHECK(p_overlap(2, 1).value == doctest::Approx(0.5));
    CHECK(p_overlap(4, 2).exact == Rational(5, 6));
    CHECK(code_of([] { p_overlap(3, 2); }) == Errc::DomainError);
    CHECK(code_of([] { p_overlap(5, 0); }) == Errc::DomainError);
    CHECK(binomial(52, 5) == 2598960);
    CHECK(binomial(5, 7) == 0);
    CHECK(binomial(100, 50) == BigInt("100891344545564193334812497256"));
  }

  TEST_CASE("p_overlap matches enumeration of subset pairs") {
    for (unsigned m = 2; m <= 10; ++m) {
      for (unsigned t = 1; 2 * t <= m; ++t) {
        const auto s = subsets(m, t);
        std::uint64_t hit = 0;
        for (auto a : s) {
          for (auto b : s) hit += (a & b) != 0;
        }
        CAPTURE(m);
        CAPTURE(t);
        REQUIRE(p_overlap(m, t).exact == Rational(hit, s.size() * s.size()));
      }
    }
  }
}
