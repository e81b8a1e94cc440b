#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pouw {

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(std::uint64_t n) noexcept;

/// Prime field GF(p) with p < 2^63.
///
/// Arithmetic works on raw residues in [0, p); FieldElement wraps a residue
/// together with its modulus when values cross module boundaries.
class PrimeField {
 public:
  static constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

  PrimeField() : PrimeField(kMersenne61) {}
  /// Throws Error(NotPrime) unless modulus is a prime in (2, 2^63).
  explicit PrimeField(std::uint64_t modulus);

  std::uint64_t modulus() const noexcept { return p_; }

  std::uint64_t reduce(std::uint64_t x) const noexcept { return x % p_; }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
    std::uint64_t s = a + b;  // p < 2^63 so no overflow
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept {
    return a >= b ? a - b : a + (p_ - b);
  }
  std::uint64_t neg(std::uint64_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
    if (p_ == kMersenne61) {
      unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
      std::uint64_t lo = static_cast<std::uint64_t>(z) & kMersenne61;
      std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
      return add(lo, hi);
    }
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
  }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const noexcept;
  /// Throws Error(InversionOfZero) for a == 0.
  std::uint64_t inv(std::uint64_t a) const;

  /// Decimal string reduced mod p; throws Error(Malformed) on non-digits.
  std::uint64_t from_decimal(std::string_view digits) const;
  /// Big-endian byte string reduced mod p.
  std::uint64_t from_bytes_be(std::span<const std::uint8_t> bytes) const noexcept;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t p_;
};

class FieldElement {
 public:
  FieldElement(const PrimeField& field, std::uint64_t value)
      : value_(field.reduce(value)), modulus_(field.modulus()) {}

  std::uint64_t value() const noexcept { return value_; }
  std::uint64_t modulus() const noexcept { return modulus_; }
  PrimeField field() const { return PrimeField(modulus_); }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

 private:
  std::uint64_t value_;
  std::uint64_t modulus_;
};

enum class FieldOp { add, sub, mul, inv, neg };

/// Single entry point over the field operations. `b` is ignored for the
/// unary ops. Throws Error(MixedFields) when operands disagree on modulus.
FieldElement field_arith(FieldOp op, const FieldElement& a, const FieldElement& b);
FieldElement field_arith(FieldOp op, const FieldElement& a);

FieldElement operator+(const FieldElement& a, const FieldElement& b);
FieldElement operator-(const FieldElement& a, const FieldElement& b);
FieldElement operator*(const FieldElement& a, const FieldElement& b);
FieldElement operator-(const FieldElement& a);
FieldElement inverse(const FieldElement& a);

std::string to_string(const FieldElement& e);

}  // namespace pouw
