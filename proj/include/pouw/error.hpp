#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pouw {

enum class Errc {
  InversionOfZero,
  MixedFields,
  NotPrime,
  SyntaxError,
  UndeclaredIdentifier,
  DuplicateDeclaration,
  FieldMismatch,
  DegreeTooHigh,
  ArityMismatch,
  UnsatisfiedAssertion,
  LengthMismatch,
  EmptyChain,
  PrefixTooLong,
  DomainError,
  NameCollision,
  NoContributions,
  UnsatisfiedWitness,
  KeyMismatch,
  Mismatch,
  CompileFailed,
  IntegrityParamUnused,
  FeeTooLow,
  NoActiveNodes,
  NotFound,
  UnknownNode,
  AlreadyInactive,
  ConfigInvalid,
  AllZero,
  Empty,
  Malformed,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t col, std::string expected)
      : Error(Errc::SyntaxError, "line " + std::to_string(line) + ", col " + std::to_string(col) +
                                     ": expected " + expected),
        line_(line),
        col_(col),
        expected_(std::move(expected)) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t col() const noexcept { return col_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t col_;
  std::string expected_;
};

class UnsatisfiedAssertion : public Error {
 public:
  explicit UnsatisfiedAssertion(std::size_t statement)
      : Error(Errc::UnsatisfiedAssertion, "statement " + std::to_string(statement)),
        statement_(statement) {}

  /// Index into Circuit::statements of the failing assert.
  std::size_t statement() const noexcept { return statement_; }

 private:
  std::size_t statement_;
};

}  // namespace pouw
