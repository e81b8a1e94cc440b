#include <doctest.h>

#include <random>

#include "pouw/error.hpp"
#include "pouw/field.hpp"

using namespace pouw;

namespace {

bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

FieldElement el(const PrimeField& f, std::uint64_t v) { return FieldElement(f, v); }

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("small-field examples") {
    const PrimeField f(11);
    CHECK(field_arith(FieldOp::add, el(f, 9), el(f, 5)).value() == 3);
    CHECK(field_arith(FieldOp::inv, el(f, 1)).value() == 1);
    CHECK(field_arith(FieldOp::inv, el(f, 4)).value() == 3);
    CHECK((el(f, 3) - el(f, 5)).value() == 9);
    CHECK((-el(f, 0)).value() == 0);
    CHECK((-el(f, 4)).value() == 7);
  }

  TEST_CASE("inverse matches exhaustive search in GF(11)") {
    const PrimeField f(11);
    for (std::uint64_t a = 1; a < 11; ++a) {
      std::uint64_t expected = 0;
      for (std::uint64_t x = 1; x < 11; ++x) {
        if (a * x % 11 == 1) expected = x;
      }
      CHECK(inverse(el(f, a)).value() == expected);
    }
  }

  TEST_CASE("errors") {
    const PrimeField f(11), g(13);
    CHECK_THROWS_AS(inverse(el(f, 0)), Error);
    try {
      inverse(el(f, 0));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InversionOfZero);
    }
    try {
      (void)(el(f, 1) + el(g, 1));
      FAIL("mixed fields accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MixedFields);
    }
    CHECK_THROWS_AS(PrimeField(12), Error);
    CHECK_THROWS_AS(PrimeField(1), Error);
  }

  TEST_CASE("values are always reduced") {
    const PrimeField f(11);
    CHECK(el(f, 11).value() == 0);
    CHECK(el(f, 25).value() == 3);
    // 10^21 mod 11: 10 = -1 (mod 11), so 10^21 = -1 = 10.
    CHECK(f.from_decimal("1000000000000000000000") == 10);
    CHECK_THROWS_AS(f.from_decimal("12a"), Error);
  }

  TEST_CASE("Miller-Rabin agrees with trial division") {
    for (std::uint64_t n = 0; n < 5000; ++n) CHECK(is_prime_u64(n) == trial_division_prime(n));
    CHECK(is_prime_u64(PrimeField::kMersenne61));
    CHECK_FALSE(is_prime_u64((std::uint64_t{1} << 61) + 1));
    CHECK_FALSE(is_prime_u64(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
    CHECK(is_prime_u64(18446744073709551557ULL));  // largest 64-bit prime
  }

  TEST_CASE("Mersenne-61 multiplication matches 128-bit remainder") {
    const PrimeField f;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t a = rng() % f.modulus(), b = rng() % f.modulus();
      const auto expected = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % f.modulus());
      REQUIRE(f.mul(a, b) == expected);
    }
    const std::uint64_t top = f.modulus() - 1;
    CHECK(f.mul(top, top) == 1);
  }

  TEST_CASE("field laws on random elements") {
    for (std::uint64_t p : {std::uint64_t{11}, std::uint64_t{65537}, PrimeField::kMersenne61}) {
      const PrimeField f(p);
      std::mt19937_64 rng(p);
      for (int i = 0; i < 2000; ++i) {
        const auto a = el(f, rng()), b = el(f, rng()), c = el(f, rng());
        REQUIRE(a + b == b + a);
        REQUIRE(a * b == b * a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a - a == el(f, 0));
        if (a.value() != 0) REQUIRE(a * inverse(a) == el(f, 1));
      }
    }
  }

  TEST_CASE("big-endian byte reduction") {
    const PrimeField f(11);
    const std::uint8_t bytes[] = {0x01, 0x00};  // 256 = 23 * 11 + 3
    CHECK(f.from_bytes_be(bytes) == 3);
  }
}
