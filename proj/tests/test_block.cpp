#include <doctest.h>

#include <random>
#include <vector>

#include "pouw/block.hpp"
#include "pouw/error.hpp"

#include "block_fixture.hpp"

using namespace pouw;
using namespace pouw::test;

TEST_SUITE("block") {
  TEST_CASE("honest blocks verify") {
    const Chain c;
    for (int n : {1, 2, 5}) {
      const Block b = c.build(hash_of(1), addr_of(7), n);
      const Verdict v = verify_block(b, certain(hash_of(1)), c.lookup());
      CHECK(v.accepted());
      CHECK(b.proof_chain.size() == static_cast<std::size_t>(n));
    }
    for (unsigned k : {1u, 3u}) {
      for (std::uint32_t bucket = 0; bucket < (1u << k); ++bucket) {
        const Block b = c.build(hash_of(2), addr_of(1), 2, k, bucket);
        CHECK(verify_block(b, certain(hash_of(2), k), c.lookup()).accepted());
      }
    }
  }

  TEST_CASE("lottery draw") {
    const Chain c;
    const Block b = c.build(hash_of(1), addr_of(7), 1);
    CHECK(lottery_draw(b, 1));
    CHECK_FALSE(lottery_draw(b, 0));
    Block empty = b;
    empty.proof_chain.clear();
    CHECK_THROWS_AS(lottery_draw(empty, 1), Error);

    // Win frequency at p = 0.01 over many candidate hashes.
    Block cand = b;
    int wins = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      cand.header.timestamp = static_cast<std::uint64_t>(i);
      rehash(cand);
      wins += lottery_draw(cand, Rational(1, 100));
    }
    const double rate = static_cast<double>(wins) / n;
    CHECK(rate >= 0.008);
    CHECK(rate <= 0.012);
  }

  TEST_CASE("each check has its own rejection reason") {
    const Chain c;
    const Hash256 prev = hash_of(1);
    const Block good = c.build(prev, addr_of(7), 3);
    REQUIRE(verify_block(good, certain(prev), c.lookup()).accepted());

    SUBCASE("wrong parent") {
      CHECK(verify_block(good, certain(hash_of(2)), c.lookup()).reason == RejectReason::PrevHashMismatch);
    }
    SUBCASE("stale block hash") {
      Block b = good;
      b.header.timestamp += 1;
      CHECK(verify_block(b, certain(prev), c.lookup()).reason == RejectReason::BlockHashMismatch);
    }
    SUBCASE("empty chain") {
      Block b = good;
      b.proof_chain.clear();
      rehash(b);
      CHECK(verify_block(b, certain(prev), c.lookup()).reason == RejectReason::EmptyChain);
    }
    SUBCASE("unknown circuit") {
      Block b = good;
      b.proof_chain[1].proof_tx.circuit_id = hash_of(77);
      rehash(b);
      const Verdict v = verify_block(b, certain(prev), c.lookup());
      CHECK(v.reason == RejectReason::UnknownCircuit);
      CHECK(v.index == 1);
    }
    SUBCASE("complexity differs from the registry") {
      Block b = good;
      b.proof_chain[2].proof_tx.complexity = 1;
      rehash(b);
      const Verdict v = verify_block(b, certain(prev), c.lookup());
      CHECK(v.reason == RejectReason::ComplexityMismatch);
      CHECK(v.index == 2);
    }
    SUBCASE("coin set edited") {
      Block b = good;
      b.coin_txs.pop_back();
      rehash(b);
      CHECK(verify_block(b, certain(prev), c.lookup()).reason == RejectReason::IntegrityChainBroken);
    }
    SUBCASE("proofs reordered") {
      Block b = good;
      std::swap(b.proof_chain[0], b.proof_chain[1]);
      rehash(b);
      CHECK(verify_block(b, certain(prev), c.lookup()).reason == RejectReason::IntegrityChainBroken);
    }
    SUBCASE("public input edited") {
      Block b = good;
      auto& tx = b.proof_chain[1].proof_tx;
      tx.public_inputs[0] += 1;
      tx.txid = proof_txid(tx);
      rechain(b);
      rehash(b);
      const Verdict v = verify_block(b, certain(prev), c.lookup());
      CHECK(v.reason == RejectReason::ProofInvalid);
      CHECK(v.index == 1);
    }
    SUBCASE("transaction outside the bucket") {
      const Verdict v = verify_block(good, certain(prev, 8), c.lookup());
      CHECK(v.reason == RejectReason::BucketViolation);
      // Built for bucket 01 of 4: under a 1-bit prefix the txids sit in bucket 0.
      const Block b = c.build(prev, addr_of(7), 2, 2, 1);
      CHECK(verify_block(b, certain(prev, 2), c.lookup()).accepted());
      CHECK(verify_block(b, certain(prev, 1), c.lookup()).reason == RejectReason::BucketViolation);
    }
    SUBCASE("txid not matching its contents") {
      Block b = c.build(prev, addr_of(7), 1, 1, 0);
      b.proof_chain[0].proof_tx.fee += 1;  // proof still verifies; the txid is stale
      rehash(b);
      CHECK(verify_block(b, certain(prev, 1), c.lookup()).reason == RejectReason::BucketViolation);
    }
    SUBCASE("lottery lost") {
      const ChainContext hard{prev, Difficulty{std::uint64_t{1} << 62}, {}, 0};
      CHECK(verify_block(good, hard, c.lookup()).reason == RejectReason::LotteryNotWon);
    }
  }

  TEST_CASE("freshness: links cannot be transplanted") {
    const Chain c;
    std::mt19937_64 rng(31);
    int rejected = 0, total = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const Hash256 pa = hash_of(rng()), pb = hash_of(rng());
      const Block a = c.build(pa, addr_of(static_cast<std::uint8_t>(rng())), 2, 0, 0, trial);
      const Block b = c.build(pb, addr_of(static_cast<std::uint8_t>(rng())), 2, 0, 0, trial + 1000);
      for (std::size_t i = 0; i < 2; ++i) {
        // Moved as-is: the stored eta belongs to the other chain.
        Block moved = a;
        moved.proof_chain[i] = b.proof_chain[i];
        rehash(moved);
        ++total;
        const Verdict v = verify_block(moved, certain(pa), c.lookup());
        rejected += v.reason == RejectReason::IntegrityChainBroken;
        // Eta rewritten to fit the new chain: the proof no longer matches.
        Block relabeled = moved;
        rechain(relabeled);
        rehash(relabeled);
        ++total;
        const Verdict w = verify_block(relabeled, certain(pa), c.lookup());
        rejected += w.reason == RejectReason::ProofInvalid;
      }
    }
    CHECK(rejected == total);
  }

  TEST_CASE("freshness: header edits invalidate the proofs") {
    const Chain c;
    const Hash256 prev = hash_of(5);
    const Block good = c.build(prev, addr_of(1), 3);

    Block other_miner = good;
    other_miner.header.miner_addr = addr_of(2);
    rehash(other_miner);
    CHECK(verify_block(other_miner, certain(prev), c.lookup()).reason == RejectReason::IntegrityChainBroken);
    rechain(other_miner);
    rehash(other_miner);
    CHECK(verify_block(other_miner, certain(prev), c.lookup()).reason == RejectReason::ProofInvalid);

    Block other_parent = good;
    other_parent.header.prev_hash = hash_of(6);
    rechain(other_parent);
    rehash(other_parent);
    CHECK(verify_block(other_parent, certain(hash_of(6)), c.lookup()).reason == RejectReason::ProofInvalid);
  }

  TEST_CASE("statement inputs splice eta at the integrity position") {
    const Chain c;
    IntegrityParameter eta;
    eta.eta.bytes[31] = 42;
    const std::uint64_t pub[] = {15};
    const auto s = statement_inputs(*c.record, pub, eta);
    CHECK(s == std::vector<std::uint64_t>{15, 42});
    CHECK(c.record->integrity_position == 1);
  }

  TEST_CASE("block JSON") {
    const Chain c;
    const Block b = c.build(hash_of(1), addr_of(3), 1);
    const auto j = block_to_json(b);
    CHECK(j["block_hash"] == to_hex(b.block_hash));
    CHECK(j["header"]["prev_hash"] == to_hex(hash_of(1)));
    CHECK(j["proof_chain"].size() == 1);
    CHECK(j["proof_chain"][0]["proof"].get<std::string>().size() == 320);
  }
}
