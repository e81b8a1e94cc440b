#include <doctest.h>

#include <algorithm>
#include <array>
#include <functional>
#include <random>
#include <vector>

#include "pouw/error.hpp"
#include "pouw/mock_proof.hpp"
#include "pouw/woo.hpp"
#include "support.hpp"

using namespace pouw;

namespace {

Hash256 seed_of(std::uint64_t v) {
  Bytes b;
  append_u64_be(b, v);
  return sha256(b);
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Malformed;
}

std::vector<std::uint64_t> masked(const woo::MaskVector& m, const PrimeField& f, std::span<const std::uint64_t> priv) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < priv.size(); ++i) out.push_back(f.add(f.reduce(priv[i]), m.r_in[i]));
  return out;
}

std::size_t expected_delta(const Circuit& c) {
  return c.count(Visibility::private_input) + c.output_names().size() + 1;
}

}  // namespace

TEST_SUITE("woo") {
  TEST_CASE("mask sampling") {
    const PrimeField f;
    const Circuit c = parse_circuit(test::kTripleSource);
    const auto a = woo::sample_masks(c, f, seed_of(1));
    CHECK(a == woo::sample_masks(c, f, seed_of(1)));
    CHECK(a != woo::sample_masks(c, f, seed_of(2)));
    CHECK(a.r_in.size() == 3);
    CHECK(a.r_out.empty());
    CHECK(a.modulus == f.modulus());
    for (auto r : a.r_in) CHECK(r < f.modulus());

    const auto none = woo::sample_masks(parse_circuit(test::kTautologySource), f, seed_of(1));
    CHECK(none.r_in.empty());
    CHECK(none.r_out.empty());

    const Circuit outs = parse_circuit(test::woo_corpus()[4]);
    const auto m = woo::sample_masks(outs, f, seed_of(3));
    CHECK(m.r_in.size() == 3);
    CHECK(m.r_out.size() == 2);
  }

  TEST_CASE("masks are uniform over a small field") {
    const PrimeField f(251);
    const Circuit c = parse_circuit(test::kFactorBaseSource);
    std::vector<int> counts(251, 0);
    const int draws = 100000;
    for (int i = 0; i < draws / 2; ++i) {
      const auto m = woo::sample_masks(c, f, seed_of(static_cast<std::uint64_t>(i)));
      ++counts[m.r_in[0]];
      ++counts[m.r_in[1]];
    }
    const double expected = static_cast<double>(draws) / 251;
    double chi2 = 0;
    for (int n : counts) chi2 += (n - expected) * (n - expected) / expected;
    // 250 degrees of freedom; 99.9th percentile is about 337.
    CHECK(chi2 < 337.0);
  }

  TEST_CASE("mask and unmask") {
    const PrimeField f(11);
    woo::MaskVector m;
    m.modulus = 11;
    m.r_in = {3, 5};
    const std::vector<FieldElement> s{{f, 5}, {f, 9}};
    const auto t = woo::mask_inputs(s, m);
    REQUIRE(t.size() == 2);
    CHECK(t[0].value() == 8);
    CHECK(t[1].value() == 3);
    CHECK(woo::unmask({f, 8}, {f, 3}).value() == 5);
    CHECK(woo::unmask({f, 3}, {f, 5}).value() == 9);

    CHECK(code_of([&] { woo::mask_inputs(std::vector<FieldElement>{{f, 1}}, m); }) == Errc::LengthMismatch);
    const PrimeField g(13);
    CHECK(code_of([&] { woo::unmask({f, 1}, {g, 1}); }) == Errc::MixedFields);
  }

  TEST_CASE("unmask inverts mask") {
    const PrimeField f;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
      const FieldElement s(f, rng()), r(f, rng());
      woo::MaskVector m;
      m.modulus = f.modulus();
      m.r_in = {r.value()};
      const auto t = woo::mask_inputs(std::vector<FieldElement>{s}, m);
      REQUIRE(woo::unmask(t[0], r) == s);
    }
  }

  TEST_CASE("constraint delta is privates + outputs + 1") {
    const PrimeField f;
    const auto corpus = test::woo_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      CAPTURE(i);
      const Circuit c = parse_circuit(corpus[i]);
      const auto tc = woo::transform_circuit(c, woo::sample_masks(c, f, seed_of(i)), f);
      const auto base = compile(c, f);
      CHECK(constraint_count(tc.compiled) - constraint_count(base) == expected_delta(c));
    }
    const Circuit factor = parse_circuit(test::kFactorBaseSource);
    CHECK(expected_delta(factor) == 3);
    CHECK(expected_delta(parse_circuit(corpus[2])) == 1);
  }

  TEST_CASE("transform rejects reserved names and bad masks") {
    const PrimeField f;
    const Circuit with_integrity = parse_circuit(test::kFactorSource);
    CHECK(code_of([&] { woo::transform_circuit(with_integrity, woo::sample_masks(with_integrity, f, seed_of(1)), f); }) ==
          Errc::NameCollision);
    const Circuit reserved = parse_circuit("def main(private field __woo_x, public field y) -> bool { assert(__woo_x == y); return true; }");
    CHECK(code_of([&] { woo::transform_circuit(reserved, woo::sample_masks(reserved, f, seed_of(1)), f); }) ==
          Errc::NameCollision);
    const Circuit base = parse_circuit(test::kFactorBaseSource);
    woo::MaskVector short_masks = woo::sample_masks(base, f, seed_of(1));
    short_masks.r_in.pop_back();
    CHECK(code_of([&] { woo::transform_circuit(base, short_masks, f); }) == Errc::LengthMismatch);
  }

  TEST_CASE("transformed circuit accepts exactly what the base accepts") {
    const PrimeField f;
    const auto corpus = test::woo_corpus();
    std::mt19937_64 rng(99);
    for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
      CAPTURE(ci);
      const Circuit c = parse_circuit(corpus[ci]);
      const R1CS base = compile(c, f);
      for (int trial = 0; trial < 100; ++trial) {
        const auto masks = woo::sample_masks(c, f, seed_of(rng()));
        const auto tc = woo::transform_circuit(c, masks, f);
        auto in = test::corpus_inputs(ci, f, rng);
        const std::uint64_t eta = 1 + rng() % (f.modulus() - 1);

        const Witness bw = generate_witness(c, base, in.pub, in.priv);
        REQUIRE(check_satisfaction(base, bw));
        const auto inst = woo::worker_instance(tc, in.pub, masked(masks, f, in.priv), eta);
        REQUIRE(check_satisfaction(tc.compiled, inst.witness));
        CHECK(inst.public_inputs.back() == eta);

        const auto outs = woo::evaluate_outputs(c, f, in.pub, in.priv);
        REQUIRE(outs.size() == inst.masked_outputs.size());
        for (std::size_t k = 0; k < outs.size(); ++k) {
          CHECK(woo::unmask({f, inst.masked_outputs[k]}, {f, masks.r_out[k]}).value() == outs[k]);
        }

        // A wrong public value is rejected on both sides.
        in.pub[0] = f.add(in.pub[0], 1);
        CHECK_THROWS_AS(generate_witness(c, base, in.pub, in.priv), UnsatisfiedAssertion);
        CHECK_THROWS_AS(woo::worker_instance(tc, in.pub, masked(masks, f, in.priv), eta), UnsatisfiedAssertion);
      }
    }
  }

  TEST_CASE("integrity gadget rejects zero") {
    const PrimeField f;
    const Circuit c = parse_circuit(test::kFactorBaseSource);
    const auto masks = woo::sample_masks(c, f, seed_of(4));
    const auto tc = woo::transform_circuit(c, masks, f);
    const std::vector<std::uint64_t> pub{35}, priv{5, 7};
    CHECK_THROWS_AS(woo::worker_instance(tc, pub, masked(masks, f, priv), 0), UnsatisfiedAssertion);
    // Plain values handed over as if masked unmask to garbage.
    CHECK_THROWS_AS(woo::worker_instance(tc, pub, priv, 1), UnsatisfiedAssertion);
    CHECK_NOTHROW(woo::worker_instance(tc, pub, masked(masks, f, priv), 1));
  }

  TEST_CASE("overhead") {
    const PrimeField f;
    for (std::size_t n : {100u, 1000u}) {
      const Circuit c = parse_circuit(synthetic_chain_source(n));
      const auto tc = woo::transform_circuit(c, woo::sample_masks(c, f, seed_of(n)), f);
      const std::vector<std::uint64_t> priv{2, 3};
      const std::vector<std::uint64_t> pub{synthetic_chain_result(f, priv, n)};
      const auto o = woo::woo_overhead(c, tc, pub, priv, 17, 3);
      CHECK(o.delta_constraints == 3);
      CHECK(o.base_prove_seconds > 0);
    }
    const Circuit a = parse_circuit(test::kFactorBaseSource);
    const Circuit b = parse_circuit(test::kTripleSource);
    const auto tb = woo::transform_circuit(b, woo::sample_masks(b, f, seed_of(1)), f);
    const std::vector<std::uint64_t> pub{6}, priv{2, 3};
    CHECK(code_of([&] { woo::woo_overhead(a, tb, pub, priv, 1, 1); }) == Errc::Mismatch);
  }
}

TEST_SUITE("mock proof") {
  struct Fixture {
    PrimeField f;
    Circuit circuit = parse_circuit(test::kFactorSource);
    R1CS r1cs = compile(circuit, f);
    CircuitId id = circuit_id(test::kFactorSource);
    std::array<Contribution, 2> contributions{};
    MockKeys keys;
    std::vector<std::uint64_t> pub{35, 11};
    Witness witness;

    Fixture() {
      contributions[0].bytes.fill(1);
      contributions[1].bytes.fill(2);
      keys = mock_setup(id, r1cs, contributions);
      witness = generate_witness(circuit, r1cs, pub, std::vector<std::uint64_t>{5, 7});
    }
  };

  TEST_CASE("setup seed") {
    const Fixture fx;
    const std::array<Contribution, 1> zero{};
    const auto k0 = mock_setup(fx.id, fx.r1cs, zero);
    const std::array<std::uint8_t, 32> zeros{};
    CHECK(k0.proving_key.setup_seed == sha256(zeros));
    CHECK(k0.proving_key == ProvingKey{fx.id, r1cs_digest(fx.r1cs), sha256(zeros)});
    CHECK(k0.verifying_key.setup_seed == k0.proving_key.setup_seed);

    std::array<Contribution, 2> swapped{fx.contributions[1], fx.contributions[0]};
    CHECK(mock_setup(fx.id, fx.r1cs, swapped).proving_key.setup_seed != fx.keys.proving_key.setup_seed);
    auto altered = fx.contributions;
    altered[1].bytes[31] ^= 1;
    CHECK(mock_setup(fx.id, fx.r1cs, altered).proving_key.setup_seed != fx.keys.proving_key.setup_seed);
    CHECK(code_of([&] { mock_setup(fx.id, fx.r1cs, std::span<const Contribution>{}); }) == Errc::NoContributions);
  }

  TEST_CASE("prove and verify") {
    const Fixture fx;
    const MockProof proof = mock_prove(fx.keys.proving_key, fx.r1cs, fx.witness, fx.pub);
    CHECK(proof.circuit_id == fx.id);
    CHECK(mock_verify(fx.keys.verifying_key, proof, fx.pub));
    CHECK(proof == mock_prove(fx.keys.proving_key, fx.r1cs, fx.witness, fx.pub));

    for (std::size_t i = 0; i < fx.pub.size(); ++i) {
      auto tampered = fx.pub;
      tampered[i] += 1;
      CHECK_FALSE(mock_verify(fx.keys.verifying_key, proof, tampered));
    }
    CHECK_FALSE(mock_verify(fx.keys.verifying_key, proof, std::vector<std::uint64_t>{35}));

    VerifyingKey other = fx.keys.verifying_key;
    other.circuit_id = sha256("other");
    CHECK_FALSE(mock_verify(other, proof, fx.pub));
  }

  TEST_CASE("proving errors") {
    const Fixture fx;
    Witness bad = fx.witness;
    bad.values.back() = fx.f.add(bad.values.back(), 1);
    CHECK(code_of([&] { mock_prove(fx.keys.proving_key, fx.r1cs, bad, fx.pub); }) == Errc::UnsatisfiedWitness);
    CHECK(code_of([&] { mock_prove(fx.keys.proving_key, fx.r1cs, fx.witness, std::vector<std::uint64_t>{35, 12}); }) ==
          Errc::UnsatisfiedWitness);

    const R1CS other = compile(parse_circuit(test::kTripleSource), fx.f);
    CHECK(code_of([&] { mock_prove(fx.keys.proving_key, other, fx.witness, fx.pub); }) == Errc::KeyMismatch);
  }

  TEST_CASE("proof serialization") {
    const Fixture fx;
    const MockProof proof = mock_prove(fx.keys.proving_key, fx.r1cs, fx.witness, fx.pub);
    const auto bytes = proof.serialize();
    CHECK(bytes.size() == 160);
    CHECK(std::all_of(bytes.begin() + 96, bytes.end(), [](std::uint8_t b) { return b == 0; }));
    CHECK(MockProof::deserialize(bytes) == proof);

    auto padded = bytes;
    padded[150] = 1;
    CHECK(code_of([&] { MockProof::deserialize(padded); }) == Errc::Malformed);
    CHECK(code_of([&] { MockProof::deserialize(std::span(bytes).first(159)); }) == Errc::Malformed);
  }

  TEST_CASE("outer wrapping") {
    const Fixture fx;
    const MockProof proof = mock_prove(fx.keys.proving_key, fx.r1cs, fx.witness, fx.pub);
    const Hash256 prev = sha256("prev");
    Address miner;
    miner.bytes.fill(9);
    const OuterProof outer = wrap_outer(proof, prev, miner);
    CHECK(verify_outer(outer, prev, miner));
    CHECK_FALSE(verify_outer(outer, sha256("other"), miner));
    Address thief = miner;
    thief.bytes[0] = 0;
    CHECK_FALSE(verify_outer(outer, prev, thief));

    const auto bytes = outer.serialize();
    CHECK(bytes.size() == OuterProof::kSize);
    const OuterProof back = OuterProof::deserialize(bytes);
    CHECK_FALSE(back.inner.has_value());
    CHECK(verify_outer(back, prev, miner));

    // Metadata rewritten without recomputing the commitment.
    OuterProof moved = back;
    moved.miner_addr = thief;
    CHECK_FALSE(verify_outer(moved, prev, thief));

    const OuterProof zero = wrap_outer(proof, Hash256{}, Address{});
    CHECK(verify_outer(zero, Hash256{}, Address{}));
    CHECK(code_of([&] { OuterProof::deserialize(std::span(bytes).first(10)); }) == Errc::Malformed);
  }
}
