#include "pouw/field.hpp"

#include <array>

#include "pouw/error.hpp"

namespace pouw {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) noexcept {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 12> kWitnesses{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto w : kWitnesses) {
    if (n % w == 0) return n == w;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (auto a : kWitnesses) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus) {
  if (modulus <= 2 || modulus >= (std::uint64_t{1} << 63) || !is_prime_u64(modulus)) {
    throw Error(Errc::NotPrime, "modulus " + std::to_string(modulus) +
                                    " is not an odd prime below 2^63");
  }
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t exp) const noexcept {
  std::uint64_t r = 1;
  base = reduce(base);
  while (exp) {
    if (exp & 1) r = mul(r, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return r;
}

std::uint64_t PrimeField::inv(std::uint64_t a) const {
  a = reduce(a);
  if (a == 0) throw Error(Errc::InversionOfZero, "inverse of 0");
  // Fermat: a^(p-2)
  return pow(a, p_ - 2);
}

std::uint64_t PrimeField::from_decimal(std::string_view digits) const {
  if (digits.empty()) throw Error(Errc::Malformed, "empty decimal literal");
  std::uint64_t acc = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') {
      throw Error(Errc::Malformed, "not a decimal literal: " + std::string(digits));
    }
    acc = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(acc) * 10 + static_cast<unsigned>(c - '0')) % p_);
  }
  return acc;
}

std::uint64_t PrimeField::from_bytes_be(std::span<const std::uint8_t> bytes) const noexcept {
  std::uint64_t acc = 0;
  for (auto b : bytes) {
    acc = static_cast<std::uint64_t>((static_cast<unsigned __int128>(acc) * 256 + b) % p_);
  }
  return acc;
}

namespace {

PrimeField same_field(const FieldElement& a, const FieldElement& b) {
  if (a.modulus() != b.modulus()) {
    throw Error(Errc::MixedFields, "moduli " + std::to_string(a.modulus()) + " and " +
                                       std::to_string(b.modulus()));
  }
  return PrimeField(a.modulus());
}

}  // namespace

FieldElement field_arith(FieldOp op, const FieldElement& a, const FieldElement& b) {
  switch (op) {
    case FieldOp::inv:
    case FieldOp::neg:
      return field_arith(op, a);
    default:
      break;
  }
  PrimeField f = same_field(a, b);
  switch (op) {
    case FieldOp::add:
      return {f, f.add(a.value(), b.value())};
    case FieldOp::sub:
      return {f, f.sub(a.value(), b.value())};
    case FieldOp::mul:
      return {f, f.mul(a.value(), b.value())};
    default:
      break;
  }
  throw Error(Errc::DomainError, "unknown field op");
}

FieldElement field_arith(FieldOp op, const FieldElement& a) {
  PrimeField f = a.field();
  switch (op) {
    case FieldOp::inv:
      return {f, f.inv(a.value())};
    case FieldOp::neg:
      return {f, f.neg(a.value())};
    default:
      throw Error(Errc::DomainError, "binary op needs two operands");
  }
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  return field_arith(FieldOp::add, a, b);
}
FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  return field_arith(FieldOp::sub, a, b);
}
FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  return field_arith(FieldOp::mul, a, b);
}
FieldElement operator-(const FieldElement& a) { return field_arith(FieldOp::neg, a); }
FieldElement inverse(const FieldElement& a) { return field_arith(FieldOp::inv, a); }

std::string to_string(const FieldElement& e) { return std::to_string(e.value()); }

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InversionOfZero: return "InversionOfZero";
    case Errc::MixedFields: return "MixedFields";
    case Errc::NotPrime: return "NotPrime";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UndeclaredIdentifier: return "UndeclaredIdentifier";
    case Errc::DuplicateDeclaration: return "DuplicateDeclaration";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::DegreeTooHigh: return "DegreeTooHigh";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::UnsatisfiedAssertion: return "UnsatisfiedAssertion";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyChain: return "EmptyChain";
    case Errc::PrefixTooLong: return "PrefixTooLong";
    case Errc::DomainError: return "DomainError";
    case Errc::NameCollision: return "NameCollision";
    case Errc::NoContributions: return "NoContributions";
    case Errc::UnsatisfiedWitness: return "UnsatisfiedWitness";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::Mismatch: return "Mismatch";
    case Errc::CompileFailed: return "CompileFailed";
    case Errc::IntegrityParamUnused: return "IntegrityParamUnused";
    case Errc::FeeTooLow: return "FeeTooLow";
    case Errc::NoActiveNodes: return "NoActiveNodes";
    case Errc::NotFound: return "NotFound";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::AlreadyInactive: return "AlreadyInactive";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::AllZero: return "AllZero";
    case Errc::Empty: return "Empty";
    case Errc::Malformed: return "Malformed";
  }
  return "Unknown";
}

}  // namespace pouw
