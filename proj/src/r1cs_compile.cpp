#include <algorithm>
#include <optional>
#include <unordered_map>

#include "pouw/error.hpp"
#include "pouw/r1cs.hpp"

namespace pouw {

bool R1CS::references(std::uint32_t var) const {
  auto in = [var](const LinearCombination& lc) {
    return std::any_of(lc.begin(), lc.end(), [var](const Term& t) { return t.var == var; });
  };
  return std::any_of(constraints.begin(), constraints.end(),
                     [&](const Constraint& c) { return in(c.a) || in(c.b) || in(c.c); });
}

std::uint32_t param_var_index(const Circuit& circuit, std::string_view name) {
  std::uint32_t idx = 1;
  for (auto vis : {Visibility::public_input, Visibility::private_input}) {
    for (const auto& p : circuit.params) {
      if (p.visibility != vis) continue;
      if (p.name == name) return idx;
      ++idx;
    }
  }
  throw Error(Errc::NotFound, "no parameter named '" + std::string(name) + "'");
}

namespace {

class Flattener {
 public:
  Flattener(const Circuit& circuit, const PrimeField& field) : circuit_(circuit), f_(field) {
    r1cs_.field = field;
    r1cs_.n_public = circuit.count(Visibility::public_input);
  }

  /// Symbolic-only pass.
  R1CS compile() && {
    bind_params(std::nullopt, std::nullopt);
    run();
    return std::move(r1cs_);
  }

  /// Symbolic pass carrying concrete values; throws on the first failing assert.
  std::pair<R1CS, std::vector<std::uint64_t>> evaluate(std::span<const std::uint64_t> pub,
                                                       std::span<const std::uint64_t> priv) && {
    bind_params(pub, priv);
    run();
    return {std::move(r1cs_), std::move(values_)};
  }

 private:
  using LC = LinearCombination;

  bool concrete() const { return tracking_; }

  void bind_params(std::optional<std::span<const std::uint64_t>> pub,
                   std::optional<std::span<const std::uint64_t>> priv) {
    tracking_ = pub.has_value();
    values_.push_back(1);
    std::uint32_t idx = 1;
    for (auto vis : {Visibility::public_input, Visibility::private_input}) {
      std::size_t k = 0;
      for (const auto& p : circuit_.params) {
        if (p.visibility != vis) continue;
        env_[p.name] = LC{{idx++, 1}};
        if (tracking_) {
          auto src = vis == Visibility::public_input ? *pub : *priv;
          values_.push_back(f_.reduce(src[k]));
        }
        ++k;
      }
    }
    r1cs_.n_vars = idx;
  }

  void run() {
    for (std::size_t i = 0; i < circuit_.statements.size(); ++i) {
      const auto& st = circuit_.statements[i];
      if (auto* local = std::get_if<LocalStmt>(&st)) {
        env_[local->name] = reduce(*local->value);
      } else {
        assert_stmt(std::get<AssertStmt>(st), i);
      }
    }
  }

  static bool is_constant(const LC& lc) {
    return lc.empty() || (lc.size() == 1 && lc.front().var == 0);
  }
  static std::uint64_t constant_of(const LC& lc) { return lc.empty() ? 0 : lc.front().coeff; }

  LC combine(const LC& x, const LC& y, bool subtract) const {
    LC out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
      if (j == y.size() || (i < x.size() && x[i].var < y[j].var)) {
        out.push_back(x[i++]);
      } else if (i == x.size() || y[j].var < x[i].var) {
        out.push_back({y[j].var, subtract ? f_.neg(y[j].coeff) : y[j].coeff});
        ++j;
      } else {
        std::uint64_t c = subtract ? f_.sub(x[i].coeff, y[j].coeff) : f_.add(x[i].coeff, y[j].coeff);
        if (c != 0) out.push_back({x[i].var, c});
        ++i;
        ++j;
      }
    }
    return out;
  }

  LC scale(const LC& x, std::uint64_t k) const {
    LC out;
    if (k == 0) return out;
    out.reserve(x.size());
    for (const auto& t : x) out.push_back({t.var, f_.mul(t.coeff, k)});
    return out;
  }

  std::uint64_t eval(const LC& lc) const {
    std::uint64_t acc = 0;
    for (const auto& t : lc) acc = f_.add(acc, f_.mul(t.coeff, values_[t.var]));
    return acc;
  }

  std::uint32_t new_aux(std::uint64_t value) {
    auto idx = static_cast<std::uint32_t>(r1cs_.n_vars++);
    if (concrete()) values_.push_back(value);
    return idx;
  }

  LC product(const LC& l, const LC& r) {
    if (is_constant(l)) return scale(r, constant_of(l));
    if (is_constant(r)) return scale(l, constant_of(r));
    std::uint64_t v = concrete() ? f_.mul(eval(l), eval(r)) : 0;
    std::uint32_t t = new_aux(v);
    LC out{{t, 1}};
    r1cs_.constraints.push_back({l, r, out});
    return out;
  }

  LC reduce(const Expr& e) {
    if (auto* id = std::get_if<Identifier>(&e.node)) return env_.at(id->name);
    if (auto* lit = std::get_if<IntLiteral>(&e.node)) {
      std::uint64_t v = f_.from_decimal(lit->digits);
      return v == 0 ? LC{} : LC{{0, v}};
    }
    const auto& b = std::get<Binary>(e.node);
    LC l = reduce(*b.lhs);
    LC r = reduce(*b.rhs);
    switch (b.op) {
      case BinaryOp::add:
        return combine(l, r, false);
      case BinaryOp::sub:
        return combine(l, r, true);
      case BinaryOp::mul:
        return product(l, r);
    }
    throw Error(Errc::DegreeTooHigh, "unknown operator");
  }

  static const Binary* as_product(const Expr& e) {
    auto* b = std::get_if<Binary>(&e.node);
    return b && b->op == BinaryOp::mul ? b : nullptr;
  }

  void fail(std::size_t stmt) const {
    if (concrete()) throw UnsatisfiedAssertion(stmt);
  }

  void assert_stmt(const AssertStmt& a, std::size_t stmt) {
    const LC one{{0, 1}};
    if (a.kind == AssertKind::not_equal) {
      LC d = combine(reduce(*a.lhs), reduce(*a.rhs), true);
      std::uint64_t inv = 0;
      if (concrete()) {
        std::uint64_t dv = eval(d);
        if (dv == 0) fail(stmt);
        inv = f_.inv(dv);
      }
      std::uint32_t v = new_aux(inv);
      r1cs_.constraints.push_back({std::move(d), LC{{v, 1}}, one});
      return;
    }

    // A lone product on either side is fused into the assert's constraint.
    if (const Binary* p = as_product(*a.lhs)) {
      LC l1 = reduce(*p->lhs);
      LC l2 = reduce(*p->rhs);
      LC rhs = reduce(*a.rhs);
      if (!is_constant(l1) && !is_constant(l2)) {
        emit_fused(std::move(l1), std::move(l2), std::move(rhs), stmt);
      } else {
        emit_linear(product(l1, l2), rhs, stmt);
      }
      return;
    }
    LC lhs = reduce(*a.lhs);
    if (const Binary* p = as_product(*a.rhs)) {
      LC r1 = reduce(*p->lhs);
      LC r2 = reduce(*p->rhs);
      if (!is_constant(r1) && !is_constant(r2)) {
        emit_fused(std::move(r1), std::move(r2), std::move(lhs), stmt);
      } else {
        emit_linear(lhs, product(r1, r2), stmt);
      }
      return;
    }
    emit_linear(lhs, reduce(*a.rhs), stmt);
  }

  void emit_fused(LC l1, LC l2, LC out, std::size_t stmt) {
    if (concrete() && f_.mul(eval(l1), eval(l2)) != eval(out)) fail(stmt);
    r1cs_.constraints.push_back({std::move(l1), std::move(l2), std::move(out)});
  }

  void emit_linear(const LC& lhs, const LC& rhs, std::size_t stmt) {
    LC d = combine(lhs, rhs, true);
    if (concrete() && eval(d) != 0) fail(stmt);
    r1cs_.constraints.push_back({std::move(d), LC{{0, 1}}, LC{}});
  }

  const Circuit& circuit_;
  PrimeField f_;
  R1CS r1cs_;
  bool tracking_ = false;
  std::vector<std::uint64_t> values_;
  std::unordered_map<std::string, LC> env_;
};

}  // namespace

R1CS compile(const Circuit& circuit, const PrimeField& field) {
  return Flattener(circuit, field).compile();
}

Witness generate_witness(const Circuit& circuit, const R1CS& r1cs,
                         std::span<const std::uint64_t> public_inputs,
                         std::span<const std::uint64_t> private_inputs) {
  const auto n_pub = circuit.count(Visibility::public_input);
  const auto n_priv = circuit.count(Visibility::private_input);
  if (public_inputs.size() != n_pub || private_inputs.size() != n_priv) {
    throw Error(Errc::ArityMismatch,
                "expected " + std::to_string(n_pub) + " public and " + std::to_string(n_priv) +
                    " private inputs, got " + std::to_string(public_inputs.size()) + " and " +
                    std::to_string(private_inputs.size()));
  }
  auto [shape, values] = Flattener(circuit, r1cs.field).evaluate(public_inputs, private_inputs);
  if (shape.n_vars != r1cs.n_vars || shape.n_public != r1cs.n_public ||
      shape.constraints.size() != r1cs.constraints.size()) {
    throw Error(Errc::Mismatch, "R1CS was not compiled from this circuit");
  }
  return Witness{r1cs.field, std::move(values)};
}

Witness generate_witness(const Circuit& circuit, const R1CS& r1cs,
                         std::span<const FieldElement> public_inputs,
                         std::span<const FieldElement> private_inputs) {
  auto raw = [&](std::span<const FieldElement> in) {
    std::vector<std::uint64_t> out;
    out.reserve(in.size());
    for (const auto& e : in) {
      if (e.modulus() != r1cs.field.modulus()) {
        throw Error(Errc::FieldMismatch, "input modulus " + std::to_string(e.modulus()) +
                                             " vs R1CS modulus " +
                                             std::to_string(r1cs.field.modulus()));
      }
      out.push_back(e.value());
    }
    return out;
  };
  auto pub = raw(public_inputs);
  auto priv = raw(private_inputs);
  return generate_witness(circuit, r1cs, std::span<const std::uint64_t>(pub),
                          std::span<const std::uint64_t>(priv));
}

Hash256 r1cs_digest(const R1CS& r1cs) {
  Sha256 h;
  CanonicalWriter head;
  head.text("pouw-r1cs").u64(r1cs.field.modulus()).u64(r1cs.n_vars).u64(r1cs.n_public).u64(
      r1cs.constraints.size());
  h.update(head.data());
  Bytes buf;
  for (const auto& c : r1cs.constraints) {
    buf.clear();
    for (const auto* row : {&c.a, &c.b, &c.c}) {
      append_u32_be(buf, static_cast<std::uint32_t>(row->size()));
      for (const auto& t : *row) {
        append_u32_be(buf, t.var);
        append_u64_be(buf, t.coeff);
      }
    }
    h.update(buf);
  }
  return h.finish();
}

}  // namespace pouw
