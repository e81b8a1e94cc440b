#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pouw/field.hpp"
#include "pouw/hash.hpp"

namespace pouw {

enum class Visibility { public_input, private_input };
enum class ParamType { field, u32 };

struct Param {
  Visibility visibility;
  ParamType type;
  std::string name;

  friend bool operator==(const Param&, const Param&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Identifier {
  std::string name;
};
/// Decimal literal, kept as text and reduced only when a field is known.
struct IntLiteral {
  std::string digits;
};
enum class BinaryOp { add, sub, mul };
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<Identifier, IntLiteral, Binary> node;
};

ExprPtr make_ident(std::string name);
ExprPtr make_int(std::string digits);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);

bool expr_equal(const Expr& a, const Expr& b);

enum class AssertKind { equal, not_equal };

struct AssertStmt {
  AssertKind kind;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct LocalStmt {
  std::string name;
  ExprPtr value;
};

using Statement = std::variant<AssertStmt, LocalStmt>;

/// Parsed `def main(...) -> bool { ... }` program. Immutable once built.
struct Circuit {
  std::string name = "main";
  std::vector<Param> params;
  std::vector<Statement> statements;

  std::size_t count(Visibility v) const;
  /// Locals following the `out_<name>` convention, in definition order.
  std::vector<std::string> output_names() const;
  const Param* find_param(std::string_view name) const;
};

bool circuit_equal(const Circuit& a, const Circuit& b);

/// Throws SyntaxError, Error(UndeclaredIdentifier), Error(DuplicateDeclaration).
Circuit parse_circuit(std::string_view source);

/// Comments stripped, whitespace runs collapsed to one space, trimmed.
std::string canonical_source(std::string_view source);

using CircuitId = Hash256;

/// SHA-256 of canonical_source(source).
CircuitId circuit_id(std::string_view source);

/// Pretty-prints a circuit back to DSL text; parse_circuit inverts it.
std::string to_source(const Circuit& circuit);

/// Source of a chain circuit with exactly `constraints` R1CS constraints:
/// `n_private` private inputs, one public `result`, and optionally a public
/// `integrity` parameter whose nonzero gadget counts toward the total.
std::string synthetic_chain_source(std::size_t constraints, std::size_t n_private = 2,
                                   bool with_integrity = false);

/// Value of `result` that satisfies synthetic_chain_source for the given
/// private inputs: the product x_0 * x_1 * ... with inputs cycled.
std::uint64_t synthetic_chain_result(const PrimeField& field,
                                     std::span<const std::uint64_t> private_values,
                                     std::size_t constraints, bool with_integrity = false);

}  // namespace pouw
