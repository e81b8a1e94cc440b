#include "pouw/woo.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <unordered_map>

#include "pouw/error.hpp"

namespace pouw::woo {

MaskVector sample_masks(const Circuit& circuit, const PrimeField& field, const Hash256& seed) {
  const std::uint64_t p = field.modulus();
  // Largest multiple of p that fits in 64 bits; chunks at or above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / p * p;
  std::uint64_t counter = 0;
  Hash256 block;
  std::size_t offset = 32;
  auto next = [&]() {
    while (true) {
      if (offset == 32) {
        Bytes ctr;
        append_u64_be(ctr, counter++);
        block = Sha256().update("pouw-woo-mask").update(seed).update(ctr).finish();
        offset = 0;
      }
      std::uint64_t x = 0;
      for (int i = 0; i < 8; ++i) x = x << 8 | block.bytes[offset++];
      if (x < limit) return x % p;
    }
  };
  MaskVector m;
  m.modulus = p;
  m.r_in.resize(circuit.count(Visibility::private_input));
  for (auto& r : m.r_in) r = next();
  m.r_out.resize(circuit.output_names().size());
  for (auto& r : m.r_out) r = next();
  return m;
}

std::vector<FieldElement> mask_inputs(std::span<const FieldElement> private_inputs,
                                      const MaskVector& masks) {
  if (private_inputs.size() != masks.r_in.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(private_inputs.size()) + " inputs vs " +
                                          std::to_string(masks.r_in.size()) + " masks");
  }
  const PrimeField f(masks.modulus);
  std::vector<FieldElement> out;
  out.reserve(private_inputs.size());
  for (std::size_t i = 0; i < private_inputs.size(); ++i) {
    out.push_back(private_inputs[i] + FieldElement(f, masks.r_in[i]));
  }
  return out;
}

FieldElement unmask(const FieldElement& value, const FieldElement& r) { return value - r; }

std::string masked_name(std::string_view name) {
  return std::string(kReservedPrefix) + "masked_" + std::string(name);
}

namespace {

void check_names(const Circuit& c) {
  auto bad = [](std::string_view n) { return n == kIntegrityParam || n.starts_with(kReservedPrefix); };
  for (const auto& p : c.params) {
    if (bad(p.name)) throw Error(Errc::NameCollision, "parameter '" + p.name + "' is reserved");
  }
  for (const auto& st : c.statements) {
    if (auto* l = std::get_if<LocalStmt>(&st); l && bad(l->name)) {
      throw Error(Errc::NameCollision, "local '" + l->name + "' is reserved");
    }
  }
}

std::uint64_t eval_expr(const Expr& e, const PrimeField& f,
                        const std::unordered_map<std::string, std::uint64_t>& env) {
  if (auto* id = std::get_if<Identifier>(&e.node)) return env.at(id->name);
  if (auto* lit = std::get_if<IntLiteral>(&e.node)) return f.from_decimal(lit->digits);
  const auto& b = std::get<Binary>(e.node);
  std::uint64_t l = eval_expr(*b.lhs, f, env);
  std::uint64_t r = eval_expr(*b.rhs, f, env);
  switch (b.op) {
    case BinaryOp::add: return f.add(l, r);
    case BinaryOp::sub: return f.sub(l, r);
    case BinaryOp::mul: return f.mul(l, r);
  }
  return 0;
}

}  // namespace

TransformedCircuit transform_circuit(const Circuit& circuit, const MaskVector& masks,
                                     const PrimeField& field) {
  check_names(circuit);
  const auto outputs = circuit.output_names();
  if (masks.r_in.size() != circuit.count(Visibility::private_input) ||
      masks.r_out.size() != outputs.size()) {
    throw Error(Errc::LengthMismatch, "mask vector does not match the circuit's inputs/outputs");
  }
  if (masks.modulus != field.modulus()) throw Error(Errc::FieldMismatch, "masks from another field");

  Circuit t;
  t.name = circuit.name;
  for (const auto& p : circuit.params) {
    if (p.visibility == Visibility::public_input) t.params.push_back(p);
  }
  for (const auto& o : outputs) {
    t.params.push_back({Visibility::public_input, ParamType::field, masked_name(o)});
  }
  t.params.push_back({Visibility::public_input, ParamType::field, std::string(kIntegrityParam)});
  std::vector<std::string> privates;
  for (const auto& p : circuit.params) {
    if (p.visibility == Visibility::private_input) privates.push_back(p.name);
  }
  for (const auto& s : privates) {
    t.params.push_back({Visibility::private_input, ParamType::field, masked_name(s)});
  }
  for (const auto& p : circuit.params) {
    if (p.visibility == Visibility::private_input) t.params.push_back(p);
  }

  // D_in: s == s_hat - r_in
  for (std::size_t i = 0; i < privates.size(); ++i) {
    t.statements.push_back(AssertStmt{
        AssertKind::equal, make_ident(privates[i]),
        make_binary(BinaryOp::sub, make_ident(masked_name(privates[i])),
                    make_int(std::to_string(masks.r_in[i])))});
  }
  t.statements.insert(t.statements.end(), circuit.statements.begin(), circuit.statements.end());
  // D_out: s_out_hat == s_out + r_out
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    t.statements.push_back(AssertStmt{
        AssertKind::equal, make_ident(masked_name(outputs[i])),
        make_binary(BinaryOp::add, make_ident(outputs[i]), make_int(std::to_string(masks.r_out[i])))});
  }
  t.statements.push_back(
      AssertStmt{AssertKind::not_equal, make_ident(std::string(kIntegrityParam)), make_int("0")});

  R1CS compiled = compile(t, field);
  return TransformedCircuit{circuit, masks, std::string(kIntegrityParam), std::move(t),
                            std::move(compiled)};
}

std::vector<std::uint64_t> evaluate_outputs(const Circuit& circuit, const PrimeField& field,
                                            std::span<const std::uint64_t> public_inputs,
                                            std::span<const std::uint64_t> private_inputs) {
  if (public_inputs.size() != circuit.count(Visibility::public_input) ||
      private_inputs.size() != circuit.count(Visibility::private_input)) {
    throw Error(Errc::ArityMismatch, "input counts do not match the circuit");
  }
  std::unordered_map<std::string, std::uint64_t> env;
  std::size_t ip = 0, is = 0;
  for (const auto& p : circuit.params) {
    env[p.name] = field.reduce(p.visibility == Visibility::public_input ? public_inputs[ip++]
                                                                        : private_inputs[is++]);
  }
  std::vector<std::uint64_t> out;
  for (const auto& st : circuit.statements) {
    if (auto* l = std::get_if<LocalStmt>(&st)) {
      env[l->name] = eval_expr(*l->value, field, env);
      if (l->name.starts_with("out_")) out.push_back(env[l->name]);
    }
  }
  return out;
}

WorkerInstance worker_instance(const TransformedCircuit& tc,
                               std::span<const std::uint64_t> base_public,
                               std::span<const std::uint64_t> masked_private, std::uint64_t eta) {
  const PrimeField f = tc.compiled.field;
  if (masked_private.size() != tc.masks.r_in.size()) {
    throw Error(Errc::ArityMismatch, "masked input count does not match the circuit");
  }
  std::vector<std::uint64_t> plain(masked_private.size());
  for (std::size_t i = 0; i < plain.size(); ++i) plain[i] = f.sub(f.reduce(masked_private[i]), tc.masks.r_in[i]);

  WorkerInstance inst;
  auto outs = evaluate_outputs(tc.base, f, base_public, plain);
  for (std::size_t i = 0; i < outs.size(); ++i) inst.masked_outputs.push_back(f.add(outs[i], tc.masks.r_out[i]));

  inst.public_inputs.assign(base_public.begin(), base_public.end());
  for (auto& v : inst.public_inputs) v = f.reduce(v);
  inst.public_inputs.insert(inst.public_inputs.end(), inst.masked_outputs.begin(), inst.masked_outputs.end());
  inst.public_inputs.push_back(f.reduce(eta));

  std::vector<std::uint64_t> priv;
  for (auto v : masked_private) priv.push_back(f.reduce(v));
  priv.insert(priv.end(), plain.begin(), plain.end());
  inst.witness = generate_witness(tc.circuit, tc.compiled, std::span<const std::uint64_t>(inst.public_inputs),
                                  std::span<const std::uint64_t>(priv));
  return inst;
}

Overhead woo_overhead(const Circuit& base, const TransformedCircuit& tc,
                      std::span<const std::uint64_t> base_public,
                      std::span<const std::uint64_t> base_private, std::uint64_t eta,
                      int repetitions) {
  if (!circuit_equal(base, tc.base)) throw Error(Errc::Mismatch, "transformed circuit has another base");
  const PrimeField f = tc.compiled.field;
  const R1CS base_r1cs = compile(base, f);

  Overhead o;
  o.delta_constraints = static_cast<std::int64_t>(constraint_count(tc.compiled)) -
                        static_cast<std::int64_t>(constraint_count(base_r1cs));

  const Witness base_w = generate_witness(base, base_r1cs, base_public, base_private);
  std::vector<std::uint64_t> base_pub(base_w.public_inputs(base_r1cs.n_public).begin(),
                                      base_w.public_inputs(base_r1cs.n_public).end());
  std::vector<FieldElement> plain;
  for (auto v : base_private) plain.emplace_back(f, v);
  std::vector<std::uint64_t> masked;
  for (const auto& e : mask_inputs(plain, tc.masks)) masked.push_back(e.value());
  const WorkerInstance inst = worker_instance(tc, base_public, masked, eta);

  const Contribution entropy{};
  const std::array<Contribution, 1> contributions{entropy};
  const MockKeys base_keys = mock_setup(circuit_id(to_source(base)), base_r1cs, contributions);
  const MockKeys tc_keys = mock_setup(circuit_id(to_source(tc.circuit)), tc.compiled, contributions);

  using clock = std::chrono::steady_clock;
  auto time_base = [&] {
    const auto t0 = clock::now();
    (void)mock_prove(base_keys.proving_key, base_r1cs, base_w, base_pub);
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  auto time_transformed = [&] {
    const auto t0 = clock::now();
    (void)mock_prove(tc_keys.proving_key, tc.compiled, inst.witness, inst.public_inputs);
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  // One untimed pair warms caches; the order then alternates per repetition.
  time_base();
  time_transformed();
  std::vector<double> tb, tt;
  for (int r = 0; r < std::max(1, repetitions); ++r) {
    if (r % 2 == 0) {
      tb.push_back(time_base());
      tt.push_back(time_transformed());
    } else {
      tt.push_back(time_transformed());
      tb.push_back(time_base());
    }
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  std::vector<double> diffs(tb.size());
  for (std::size_t i = 0; i < tb.size(); ++i) diffs[i] = tt[i] - tb[i];
  o.base_prove_seconds = median(tb);
  o.transformed_prove_seconds = median(tt);
  o.delta_prove_seconds = median(diffs);
  return o;
}

}  // namespace pouw::woo
