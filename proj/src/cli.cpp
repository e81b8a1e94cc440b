#include "pouw/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pouw/circuit.hpp"
#include "pouw/config.hpp"
#include "pouw/csv.hpp"
#include "pouw/error.hpp"
#include "pouw/experiments.hpp"
#include "pouw/hash.hpp"
#include "pouw/mock_proof.hpp"
#include "pouw/r1cs.hpp"
#include "pouw/r1cs_json.hpp"
#include "pouw/registry.hpp"
#include "pouw/sim.hpp"
#include "pouw/woo.hpp"

namespace pouw::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw UsageError(std::string(what) + ": expected an unsigned integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string json_string(const json& doc, std::string_view key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) {
    throw Error(Errc::Malformed, "missing string field '" + std::string(key) + "'");
  }
  return it->get<std::string>();
}

const json& json_object(const json& doc, std::string_view key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_object()) {
    throw Error(Errc::Malformed, "missing object field '" + std::string(key) + "'");
  }
  return *it;
}

/// Decimal value from a JSON string or unsigned number.
std::string json_decimal(const json& v, std::string_view name) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  throw Error(Errc::Malformed, "value of '" + std::string(name) + "' must be a decimal string or unsigned integer");
}

struct LoadedCircuit {
  std::string source;
  Circuit circuit;
};

LoadedCircuit load_circuit(const fs::path& path) {
  LoadedCircuit c{read_text(path), {}};
  c.circuit = parse_circuit(c.source);
  return c;
}

using Assignments = std::map<std::string, std::string>;

/// "a=1,b=2" -> {a: "1", b: "2"}.
Assignments parse_assignments(std::string_view text) {
  Assignments out;
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw UsageError("expected name=value, got '" + std::string(item) + "'");
    }
    out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
  }
  return out;
}

Assignments assignments_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Malformed, "inputs must be a JSON object of name -> decimal");
  Assignments out;
  for (const auto& [k, v] : doc.items()) out[k] = json_decimal(v, k);
  return out;
}

/// Values of the parameters with visibility `v`, in declaration order.
std::vector<std::uint64_t> values_for(const Circuit& c, Visibility v, const Assignments& vals,
                                      const PrimeField& field) {
  std::vector<std::uint64_t> out;
  for (const auto& p : c.params) {
    if (p.visibility != v) continue;
    auto it = vals.find(p.name);
    if (it == vals.end()) throw Error(Errc::ArityMismatch, "no value given for parameter '" + p.name + "'");
    out.push_back(field.from_decimal(it->second));
  }
  return out;
}

void reject_unknown(const Circuit& c, const Assignments& vals) {
  for (const auto& [name, _] : vals) {
    if (!c.find_param(name)) throw Error(Errc::ArityMismatch, "circuit has no parameter '" + name + "'");
  }
}

json named_values(const Circuit& c, Visibility v, std::span<const std::uint64_t> values) {
  json out = json::object();
  std::size_t i = 0;
  for (const auto& p : c.params) {
    if (p.visibility == v) out[p.name] = std::to_string(values[i++]);
  }
  return out;
}

Hash256 seeded(std::string_view domain, std::uint64_t seed) {
  CanonicalWriter w;
  w.text(domain).u64(seed);
  return sha256(w.data());
}

// ---- mask and key files --------------------------------------------------

json masks_to_json(const Circuit& c, const CircuitId& id, const woo::MaskVector& m) {
  json r_in = json::object(), r_out = json::object();
  std::size_t i = 0;
  for (const auto& p : c.params) {
    if (p.visibility == Visibility::private_input) r_in[p.name] = std::to_string(m.r_in[i++]);
  }
  const auto outs = c.output_names();
  for (std::size_t j = 0; j < outs.size(); ++j) r_out[outs[j]] = std::to_string(m.r_out[j]);
  return json{{"circuit_id", to_hex(id)}, {"modulus", std::to_string(m.modulus)}, {"r_in", r_in}, {"r_out", r_out}};
}

woo::MaskVector masks_from_json(const Circuit& c, const json& doc) {
  woo::MaskVector m;
  m.modulus = parse_u64(json_string(doc, "modulus"), "modulus");
  const PrimeField field(m.modulus);
  const json& r_in = json_object(doc, "r_in");
  const json& r_out = json_object(doc, "r_out");
  for (const auto& p : c.params) {
    if (p.visibility != Visibility::private_input) continue;
    if (!r_in.contains(p.name)) throw Error(Errc::Mismatch, "mask file has no mask for '" + p.name + "'");
    m.r_in.push_back(field.from_decimal(json_decimal(r_in[p.name], p.name)));
  }
  for (const auto& o : c.output_names()) {
    if (!r_out.contains(o)) throw Error(Errc::Mismatch, "mask file has no mask for '" + o + "'");
    m.r_out.push_back(field.from_decimal(json_decimal(r_out[o], o)));
  }
  if (r_in.size() != m.r_in.size() || r_out.size() != m.r_out.size()) {
    throw Error(Errc::Mismatch, "mask file does not match the circuit");
  }
  return m;
}

template <class Key>
json key_to_json(const Key& k) {
  return json{{"circuit_id", to_hex(k.circuit_id)},
              {"r1cs_digest", to_hex(k.r1cs_digest)},
              {"setup_seed", to_hex(k.setup_seed)}};
}

template <class Key>
Key key_from_json(const json& doc) {
  Key k;
  k.circuit_id = fixed_from_hex<CircuitId>(json_string(doc, "circuit_id"));
  k.r1cs_digest = fixed_from_hex<Hash256>(json_string(doc, "r1cs_digest"));
  k.setup_seed = fixed_from_hex<Hash256>(json_string(doc, "setup_seed"));
  return k;
}

// ---- shared command state ------------------------------------------------

struct Globals {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct Context {
  AppConfig config;
  std::uint64_t seed = 1;
  fs::path out_dir;
  std::ostream& out;
};

Context make_context(const Globals& g, std::ostream& out) {
  AppConfig cfg = g.config ? load_config(*g.config) : default_app_config();
  std::uint64_t seed = 1;
  if (g.seed) {
    seed = *g.seed;
  } else if (const char* env = std::getenv("POUW_SEED"); env && *env) {
    seed = parse_u64(env, "POUW_SEED");
  } else if (cfg.seed) {
    seed = *cfg.seed;
  }
  cfg.sim.seed = seed;
  fs::path dir = g.out ? fs::path(*g.out) : cfg.out_dir;
  return Context{std::move(cfg), seed, std::move(dir), out};
}

// ---- circuit -------------------------------------------------------------

int circuit_compile(Context& ctx, const std::string& file) {
  const auto c = load_circuit(file);
  const R1CS r1cs = compile(c.circuit, ctx.config.field());
  const fs::path dest = ctx.out_dir / (fs::path(file).stem().string() + ".r1cs.json");
  write_json(dest, r1cs_to_json(r1cs));
  ctx.out << "constraints: " << constraint_count(r1cs) << "\n";
  ctx.out << "circuit_id: " << to_hex(circuit_id(c.source)) << "\n";
  ctx.out << "wrote " << dest.string() << "\n";
  return kExitOk;
}

int circuit_check(Context& ctx, const std::string& file, const std::optional<std::string>& inputs,
                  const std::string& pub, const std::string& priv) {
  const auto c = load_circuit(file);
  const PrimeField field = ctx.config.field();
  Assignments vals;
  if (inputs) vals = assignments_from_json(read_json(*inputs));
  for (auto& [k, v] : parse_assignments(pub)) vals[k] = v;
  for (auto& [k, v] : parse_assignments(priv)) vals[k] = v;
  reject_unknown(c.circuit, vals);

  const R1CS r1cs = compile(c.circuit, field);
  const auto pv = values_for(c.circuit, Visibility::public_input, vals, field);
  const auto sv = values_for(c.circuit, Visibility::private_input, vals, field);
  Witness w;
  try {
    w = generate_witness(c.circuit, r1cs, pv, sv);
  } catch (const UnsatisfiedAssertion& e) {
    ctx.out << "unsatisfied: " << e.what() << "\n";
    return kExitFailure;
  }
  if (!check_satisfaction(r1cs, w)) {
    ctx.out << "unsatisfied\n";
    return kExitFailure;
  }
  ctx.out << "satisfied\n";
  return kExitOk;
}

// ---- woo -----------------------------------------------------------------

int woo_mask(Context& ctx, const std::string& file, const std::string& pub, const std::string& priv) {
  const auto c = load_circuit(file);
  const PrimeField field = ctx.config.field();
  Assignments vals = parse_assignments(pub);
  for (auto& [k, v] : parse_assignments(priv)) vals[k] = v;
  reject_unknown(c.circuit, vals);
  const auto pv = values_for(c.circuit, Visibility::public_input, vals, field);
  const auto sv = values_for(c.circuit, Visibility::private_input, vals, field);

  const CircuitId id = circuit_id(c.source);
  const woo::MaskVector masks = woo::sample_masks(c.circuit, field, seeded("pouw-woo-mask", ctx.seed));
  std::vector<FieldElement> secret;
  for (auto v : sv) secret.emplace_back(field, v);
  std::vector<std::uint64_t> masked;
  for (const auto& e : woo::mask_inputs(secret, masks)) masked.push_back(e.value());

  const fs::path masks_path = ctx.out_dir / "masks.json";
  const fs::path request_path = ctx.out_dir / "request.json";
  write_json(masks_path, masks_to_json(c.circuit, id, masks));
  write_json(request_path, json{{"circuit_id", to_hex(id)},
                                {"public", named_values(c.circuit, Visibility::public_input, pv)},
                                {"masked_private", named_values(c.circuit, Visibility::private_input, masked)}});
  ctx.out << "masked " << masked.size() << " private input(s)\n";
  ctx.out << "wrote " << masks_path.string() << " (keep secret)\n";
  ctx.out << "wrote " << request_path.string() << "\n";
  return kExitOk;
}

int woo_transform(Context& ctx, const std::string& file, const std::string& masks_file) {
  const auto c = load_circuit(file);
  const json mj = read_json(masks_file);
  const CircuitId base_id = circuit_id(c.source);
  if (json_string(mj, "circuit_id") != to_hex(base_id)) {
    throw Error(Errc::Mismatch, "masks were sampled for a different circuit");
  }
  const woo::MaskVector masks = masks_from_json(c.circuit, mj);
  const PrimeField field(masks.modulus);
  const woo::TransformedCircuit tc = woo::transform_circuit(c.circuit, masks, field);
  const std::string tsrc = to_source(tc.circuit);
  const CircuitId tid = circuit_id(tsrc);

  Contribution share;
  share.bytes = Sha256().update("pouw-woo-setup").update(seeded("pouw-woo-client", ctx.seed)).update(tid).finish().bytes;
  const MockKeys keys = mock_setup(tid, tc.compiled, std::span<const Contribution>(&share, 1));

  const std::size_t base_n = constraint_count(compile(c.circuit, field));
  const std::size_t n = constraint_count(tc.compiled);
  const fs::path transformed_path = ctx.out_dir / "transformed.json";
  const fs::path r1cs_path = ctx.out_dir / "transformed.r1cs.json";
  const fs::path keys_path = ctx.out_dir / "keys.json";
  // The mask constants are compiled into `source` already; they are repeated
  // so the worker can rebuild the witness layout without parsing constants.
  write_json(transformed_path, json{{"base_circuit_id", to_hex(base_id)},
                                    {"circuit_id", to_hex(tid)},
                                    {"modulus", std::to_string(masks.modulus)},
                                    {"base_source", c.source},
                                    {"source", tsrc},
                                    {"masks", masks_to_json(c.circuit, base_id, masks)},
                                    {"base_constraints", base_n},
                                    {"constraints", n}});
  write_json(r1cs_path, r1cs_to_json(tc.compiled));
  write_json(keys_path, json{{"proving_key", key_to_json(keys.proving_key)},
                             {"verifying_key", key_to_json(keys.verifying_key)}});
  ctx.out << "constraints: " << base_n << " -> " << n << " (delta " << (n - base_n) << ")\n";
  ctx.out << "circuit_id: " << to_hex(tid) << "\n";
  ctx.out << "wrote " << transformed_path.string() << ", " << r1cs_path.string() << ", " << keys_path.string()
          << "\n";
  return kExitOk;
}

int woo_prove(Context& ctx, const std::string& transformed_file, const std::string& keys_file,
              const std::string& request_file, const std::string& eta_text) {
  const json tj = read_json(transformed_file);
  const Circuit base = parse_circuit(json_string(tj, "base_source"));
  const woo::MaskVector masks = masks_from_json(base, json_object(tj, "masks"));
  const PrimeField field(masks.modulus);
  const woo::TransformedCircuit tc = woo::transform_circuit(base, masks, field);
  const CircuitId tid = circuit_id(to_source(tc.circuit));
  if (to_hex(tid) != json_string(tj, "circuit_id")) {
    throw Error(Errc::Mismatch, "transformed circuit does not match its recorded id");
  }

  const json rj = read_json(request_file);
  if (json_string(rj, "circuit_id") != json_string(tj, "base_circuit_id")) {
    throw Error(Errc::Mismatch, "request targets a different circuit");
  }
  const Assignments pub = assignments_from_json(json_object(rj, "public"));
  const Assignments masked = assignments_from_json(json_object(rj, "masked_private"));
  const auto pv = values_for(base, Visibility::public_input, pub, field);
  const auto mv = values_for(base, Visibility::private_input, masked, field);
  const std::uint64_t eta = field.from_decimal(eta_text);

  const ProvingKey pk = key_from_json<ProvingKey>(json_object(read_json(keys_file), "proving_key"));
  const woo::WorkerInstance inst = woo::worker_instance(tc, pv, mv, eta);
  const MockProof proof = mock_prove(pk, tc.compiled, inst.witness, inst.public_inputs);

  json names = json::array(), values = json::array(), outs = json::object();
  for (const auto& p : tc.circuit.params) {
    if (p.visibility == Visibility::public_input) names.push_back(p.name);
  }
  for (auto v : inst.public_inputs) values.push_back(std::to_string(v));
  const auto out_names = base.output_names();
  for (std::size_t i = 0; i < out_names.size(); ++i) outs[out_names[i]] = std::to_string(inst.masked_outputs[i]);
  const auto bytes = proof.serialize();

  const fs::path proof_path = ctx.out_dir / "proof.json";
  write_json(proof_path, json{{"circuit_id", to_hex(tid)},
                              {"eta", std::to_string(eta)},
                              {"public_names", names},
                              {"public_inputs", values},
                              {"masked_outputs", outs},
                              {"proof", to_hex(bytes)}});
  ctx.out << "proved " << constraint_count(tc.compiled) << " constraints\n";
  ctx.out << "wrote " << proof_path.string() << "\n";
  return kExitOk;
}

int woo_verify(Context& ctx, const std::string& keys_file, const std::string& proof_file,
               const std::optional<std::string>& eta_text, const std::optional<std::string>& masks_file) {
  const VerifyingKey vk = key_from_json<VerifyingKey>(json_object(read_json(keys_file), "verifying_key"));
  const json pj = read_json(proof_file);
  const MockProof proof = MockProof::deserialize(from_hex(json_string(pj, "proof")));
  const json& names = pj.at("public_names");
  const json& values = pj.at("public_inputs");
  if (!names.is_array() || !values.is_array() || names.size() != values.size()) {
    throw Error(Errc::Malformed, "public_names and public_inputs must be arrays of equal length");
  }
  const PrimeField field(ctx.config.field_modulus);
  std::vector<std::uint64_t> pub;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string name = names[i].get<std::string>();
    const std::string text = eta_text && name == woo::kIntegrityParam ? *eta_text : json_decimal(values[i], name);
    pub.push_back(field.from_decimal(text));
  }
  if (!mock_verify(vk, proof, pub)) {
    ctx.out << "fail\n";
    return kExitFailure;
  }
  ctx.out << "ok\n";
  if (masks_file) {
    const json mj = read_json(*masks_file);
    const PrimeField mf(parse_u64(json_string(mj, "modulus"), "modulus"));
    const json& outs = json_object(pj, "masked_outputs");
    for (const auto& [name, r] : json_object(mj, "r_out").items()) {
      if (!outs.contains(name)) throw Error(Errc::Mismatch, "proof has no masked output '" + name + "'");
      const FieldElement value(mf, mf.from_decimal(json_decimal(outs[name], name)));
      const FieldElement mask(mf, mf.from_decimal(json_decimal(r, name)));
      ctx.out << name << " = " << woo::unmask(value, mask).value() << "\n";
    }
  }
  return kExitOk;
}

// ---- registry ------------------------------------------------------------

struct NodeArg {
  std::string id;
  std::uint64_t stake;
  registry::Behavior behavior;
};

/// "id:stake[:behavior]".
NodeArg parse_node(std::string_view text) {
  auto c1 = text.find(':');
  if (c1 == std::string_view::npos) throw UsageError("--node expects id:stake[:behavior]");
  NodeArg n{std::string(text.substr(0, c1)), 0, registry::Behavior::honest};
  std::string_view rest = text.substr(c1 + 1);
  auto c2 = rest.find(':');
  n.stake = parse_u64(rest.substr(0, c2), "--node stake");
  if (c2 != std::string_view::npos) {
    try {
      n.behavior = registry::behavior_from_string(rest.substr(c2 + 1));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return n;
}

fs::path ledger_path(const Context& ctx) { return ctx.out_dir / "registry.jsonl"; }

registry::RegistryState open_registry(const Context& ctx) {
  const Hash256 entropy = seeded("pouw-registry-entropy", ctx.seed);
  std::ifstream in(ledger_path(ctx), std::ios::binary);
  if (!in) return registry::RegistryState(ctx.config.registry, entropy);
  return registry::RegistryState::replay(in, ctx.config.registry, entropy);
}

int registry_register(Context& ctx, const std::string& file, std::uint64_t fee, std::uint64_t n_nodes,
                      std::uint64_t stake, const std::vector<std::string>& node_args, std::uint64_t height) {
  const std::string source = read_text(file);
  registry::RegistryState state = open_registry(ctx);
  const std::size_t logged = state.events().size();

  std::vector<NodeArg> wanted;
  for (const auto& a : node_args) wanted.push_back(parse_node(a));
  if (wanted.empty() && state.nodes().empty()) {
    for (std::uint64_t i = 0; i < n_nodes; ++i) wanted.push_back({"node-" + std::to_string(i), stake, {}});
  }
  for (const auto& n : wanted) {
    const bool known = std::any_of(state.nodes().begin(), state.nodes().end(),
                                   [&](const auto& x) { return x.node_id == n.id; });
    if (!known) state.add_node(n.id, n.stake, n.behavior);
  }

  std::optional<registry::CircuitRecord> rec;
  std::optional<Error> failure;
  try {
    rec = state.register_circuit(source, fee, ctx.config.field(), height);
  } catch (const Error& e) {
    failure = e;  // node joins and slashes still belong in the ledger
  }

  const fs::path path = ledger_path(ctx);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  for (std::size_t i = logged; i < state.events().size(); ++i) out << state.events()[i].dump() << '\n';
  if (!out) throw std::runtime_error("cannot append to " + path.string());
  if (failure) throw *failure;

  ctx.out << "circuit_id: " << to_hex(rec->circuit_id) << "\n";
  ctx.out << "complexity: " << rec->complexity << "\n";
  for (const auto& n : state.nodes()) {
    ctx.out << n.node_id << " stake=" << n.stake << " balance=" << n.balance
            << " active=" << (n.active ? "true" : "false") << "\n";
  }
  return kExitOk;
}

int registry_get(Context& ctx, const std::string& id_hex, const std::optional<std::string>& r1cs_out) {
  if (!fs::exists(ledger_path(ctx))) throw Error(Errc::NotFound, "no registry ledger at " + ledger_path(ctx).string());
  const registry::RegistryState state = open_registry(ctx);
  const auto& rec = state.get_circuit(fixed_from_hex<CircuitId>(id_hex));
  json view = registry::record_to_json(rec);
  view.erase("r1cs");
  ctx.out << view.dump(2) << "\n";
  if (r1cs_out) write_json(*r1cs_out, r1cs_to_json(rec.r1cs));
  return kExitOk;
}

// ---- sim -----------------------------------------------------------------

struct SimOverrides {
  std::optional<std::string> psi;
  std::optional<std::uint64_t> blocks;
  std::optional<std::uint64_t> kappa;
  std::optional<std::string> k_bits;
  std::optional<std::string> powers;
  std::optional<double> max_time;
  bool real_work = false;
};

std::string join_powers(const std::vector<sim::MinerSpec>& miners) {
  std::string s;
  for (const auto& m : miners) {
    if (!s.empty()) s += ';';
    s += csv_number(m.power);
  }
  return s;
}

int sim_run(Context& ctx, const SimOverrides& o) {
  auto& s = ctx.config.sim;
  try {
    if (o.psi) s.psi = parse_rational(*o.psi);
  } catch (const Error& e) {
    throw UsageError(std::string("--psi: ") + e.what());
  }
  if (o.blocks) s.max_blocks = *o.blocks;
  if (o.kappa) s.kappa0 = *o.kappa;
  if (o.max_time) s.max_time = *o.max_time;
  if (o.real_work) s.real_work = true;
  if (o.k_bits) {
    if (*o.k_bits == "auto") {
      s.k_auto = true;
    } else {
      s.k_auto = false;
      s.k_bits = static_cast<unsigned>(std::min<std::uint64_t>(parse_u64(*o.k_bits, "--k-bits"), 1000));
    }
  }
  if (o.powers) {
    std::vector<double> powers;
    std::string_view text = *o.powers;
    while (!text.empty()) {
      auto comma = text.find(',');
      const std::string item(text.substr(0, comma));
      text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
      double v = 0;
      auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
        throw UsageError("--miners expects comma-separated powers, got '" + item + "'");
      }
      powers.push_back(v);
    }
    s.miners = sim::make_miners(powers);
  }
  validate(ctx.config);

  const sim::Metrics m = sim::run_sim(s);
  const fs::path metrics_path = ctx.out_dir / "sim_metrics.csv";
  const fs::path summary_path = ctx.out_dir / "sim_summary.csv";
  write_csv_file(metrics_path, sim::metrics_table(m));
  CsvTable summary{{"seed", "psi", "kappa0", "k_bits", "miner_powers", "max_blocks", "real_work", "blocks",
                    "end_time", "mean_block_time", "cv_block_time", "wasted_fraction", "mean_proofs_per_block",
                    "gini", "final_kappa", "final_k_bits"},
                   {}};
  summary.add({csv_number(s.seed), s.psi.str(), csv_number(s.kappa0),
               s.k_auto ? std::string("auto") : std::to_string(s.k_bits), join_powers(s.miners),
               csv_number(s.max_blocks), s.real_work ? "true" : "false", csv_number(m.blocks), csv_number(m.end_time),
               csv_number(m.mean_block_time), csv_number(m.cv_block_time), csv_number(m.wasted_fraction),
               csv_number(m.mean_proofs_per_block), csv_number(m.gini), csv_number(m.final_kappa),
               std::to_string(m.final_k_bits)});
  write_csv_file(summary_path, summary);
  ctx.out << "blocks=" << m.blocks << " mean_block_time=" << csv_number(m.mean_block_time)
          << " wasted_fraction=" << csv_number(m.wasted_fraction) << "\n";
  return kExitOk;
}

// ---- experiments ---------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::optional<std::size_t> seeds;
  std::optional<std::uint64_t> blocks;
  std::vector<std::uint64_t> ms;
  std::vector<std::uint64_t> ts;
  std::uint64_t trials = 1000000;
  bool no_small_pool = false;
};

struct SummaryRow {
  std::string setting;
  std::string metric;
  double value;
};

void update_summary(const fs::path& path, const std::string& experiment, const std::vector<SummaryRow>& rows) {
  const std::vector<std::string> columns{"experiment", "setting", "metric", "value"};
  CsvTable table{columns, {}};
  if (fs::exists(path)) {
    CsvTable old = read_csv(read_text(path));
    if (old.columns == columns) {
      for (auto& r : old.rows) {
        if (r.size() == columns.size() && r[0] != experiment) table.add(std::move(r));
      }
    }
  }
  for (const auto& r : rows) table.add({experiment, r.setting, r.metric, csv_number(r.value)});
  // Fixed experiment order so the file does not depend on invocation order.
  static const std::vector<std::string> order{"h1", "h2", "h3", "h4", "overlap"};
  auto rank = [&](const std::string& e) { return std::find(order.begin(), order.end(), e) - order.begin(); };
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const auto& a, const auto& b) { return rank(a[0]) < rank(b[0]); });
  write_csv_file(path, table);
}

int experiment(Context& ctx, const ExperimentArgs& a) {
  static const std::vector<std::string> names{"h1", "h2", "h3", "h4", "overlap"};
  if (std::find(names.begin(), names.end(), a.name) == names.end()) {
    throw UsageError("unknown experiment '" + a.name + "' (expected h1, h2, h3, h4 or overlap)");
  }
  sim::ExperimentSettings settings;
  if (a.blocks) settings.base.max_blocks = *a.blocks;
  settings.seeds = sim::seed_range(ctx.seed, a.seeds.value_or(a.name == "h1" ? 5 : 3));
  if (settings.seeds.empty()) throw UsageError("--seeds must be at least 1");

  CsvTable table;
  std::vector<SummaryRow> summary;
  if (a.name == "h1") {
    const auto r = sim::experiment_h1(settings);
    table = sim::to_table(r);
    for (const auto& m : r.means) {
      const std::string f = "f=" + csv_number(m.power_ratio);
      summary.push_back({f, "block_reward_ratio", m.block_reward_ratio});
      summary.push_back({f, "proof_reward_ratio", m.proof_reward_ratio});
    }
  } else if (a.name == "h2") {
    const auto r = sim::experiment_h2(settings);
    table = sim::to_table(r);
    for (const auto& m : r.means) {
      summary.push_back({m.preference, "block_reward_share_a", m.share_a});
      summary.push_back({m.preference, "block_reward_share_b", m.share_b});
    }
  } else if (a.name == "h3") {
    const auto r = sim::experiment_h3(settings);
    table = sim::to_table(r);
    for (const auto& m : r.means) {
      summary.push_back({"psi=" + m.psi, "wasted_fraction", m.wasted_fraction});
      summary.push_back({"psi=" + m.psi, "gini", m.gini});
    }
  } else if (a.name == "h4") {
    const auto r = sim::experiment_h4(settings, {0, 1, 2, 3}, !a.no_small_pool);
    table = sim::to_table(r);
    for (const auto& m : r.means) {
      summary.push_back({m.mempool + ";buckets=" + std::to_string(m.buckets), "wasted_fraction", m.wasted_fraction});
    }
  } else {
    const std::vector<std::uint64_t> ms = a.ms.empty() ? std::vector<std::uint64_t>{20, 100, 1000} : a.ms;
    const std::vector<std::uint64_t> ts = a.ts.empty() ? std::vector<std::uint64_t>{1, 2, 5, 10, 20, 50} : a.ts;
    if (a.trials == 0) throw UsageError("--trials must be positive");
    const auto rows = sim::experiment_overlap(ms, ts, a.trials, ctx.seed);
    if (rows.empty()) throw UsageError("no (m, t) pair with m >= 2t in the grid");
    table = sim::to_table(rows);
    for (const auto& r : rows) {
      const std::string key = "m=" + std::to_string(r.m) + ";t=" + std::to_string(r.t);
      summary.push_back({key, "analytic", r.analytic});
      summary.push_back({key, "montecarlo", r.montecarlo});
      summary.push_back({key, "abs_diff", r.abs_diff});
    }
  }

  const fs::path dest = ctx.out_dir / (a.name + ".csv");
  write_csv_file(dest, table);
  update_summary(ctx.out_dir / "summary.csv", a.name, summary);
  write_csv(ctx.out, table);
  return kExitOk;
}

constexpr const char* kCsvHelp =
    "CSV columns:\n"
    "  h1.csv       power_ratio,seed,block_reward_ratio,proof_reward_ratio\n"
    "  h2.csv       preference,seed,block_reward_share_a,block_reward_share_b\n"
    "  h3.csv       psi,seed,wasted_fraction,gini\n"
    "  h4.csv       mempool,buckets,seed,wasted_fraction\n"
    "  overlap.csv  m,t,exact,analytic,montecarlo,abs_diff\n"
    "  summary.csv  experiment,setting,metric,value\n"
    "Rows with seed \"mean\" average the per-seed rows above them.";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proof-of-useful-work toolkit: circuits, outsourcing, registry, simulation", "pouw"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "TOML config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (falls back to $POUW_SEED, then the config, then 1)");
  app.add_option("--out", g.out, "artifact directory (default ./out)");

  // circuit
  auto* circuit = app.add_subcommand("circuit", "compile or check a circuit");
  circuit->require_subcommand(1);
  std::string file, pub, priv;
  std::optional<std::string> inputs;
  auto* compile_cmd = circuit->add_subcommand("compile", "write <out>/<name>.r1cs.json, print the constraint count");
  compile_cmd->add_option("file", file, "circuit source")->required();
  auto* check_cmd = circuit->add_subcommand("check", "print whether the inputs satisfy the circuit");
  check_cmd->add_option("file", file, "circuit source")->required();
  check_cmd->add_option("--public", pub, "public inputs, name=value,...");
  check_cmd->add_option("--private", priv, "private inputs, name=value,...");
  check_cmd->add_option("--inputs", inputs, "JSON file with an object name -> decimal");

  // woo
  auto* woo_cmd = app.add_subcommand("woo", "outsource a proof without revealing private inputs");
  woo_cmd->require_subcommand(1);
  std::string masks_file, transformed_file, keys_file, request_file, proof_file, eta;
  std::optional<std::string> verify_eta, verify_masks;
  auto* mask_cmd = woo_cmd->add_subcommand("mask", "client: sample masks, write masks.json and request.json");
  mask_cmd->add_option("file", file, "base circuit source")->required();
  mask_cmd->add_option("--public", pub, "public inputs, name=value,...");
  mask_cmd->add_option("--private", priv, "private inputs, name=value,...");
  auto* transform_cmd =
      woo_cmd->add_subcommand("transform", "client: build the transformed circuit, run setup, write keys");
  transform_cmd->add_option("file", file, "base circuit source")->required();
  transform_cmd->add_option("--masks", masks_file, "masks.json from `woo mask`")->required();
  auto* prove_cmd = woo_cmd->add_subcommand("prove", "worker: prove the masked request, write proof.json");
  prove_cmd->add_option("--transformed", transformed_file, "transformed.json")->required();
  prove_cmd->add_option("--keys", keys_file, "keys.json")->required();
  prove_cmd->add_option("--request", request_file, "request.json")->required();
  prove_cmd->add_option("--eta", eta, "integrity value (decimal, nonzero)")->required();
  auto* verify_cmd = woo_cmd->add_subcommand("verify", "check proof.json; print ok or fail");
  verify_cmd->add_option("--keys", keys_file, "keys.json")->required();
  verify_cmd->add_option("--proof", proof_file, "proof.json")->required();
  verify_cmd->add_option("--eta", verify_eta, "expected integrity value (default: the one in proof.json)");
  verify_cmd->add_option("--masks", verify_masks, "masks.json; prints unmasked outputs on success");

  // registry
  auto* reg = app.add_subcommand("registry", "circuit registry backed by <out>/registry.jsonl");
  reg->require_subcommand(1);
  std::uint64_t fee = 0, n_nodes = 3, stake = 100, height = 0;
  std::vector<std::string> node_args;
  std::string id_hex;
  std::optional<std::string> r1cs_out;
  auto* register_cmd = reg->add_subcommand("register", "register a circuit and run its setup ceremony");
  register_cmd->add_option("file", file, "circuit source")->required();
  register_cmd->add_option("--fee", fee, "registration fee")->required();
  register_cmd->add_option("--nodes", n_nodes, "honest nodes created for a new ledger")->capture_default_str();
  register_cmd->add_option("--stake", stake, "stake of those nodes")->capture_default_str();
  register_cmd->add_option("--node", node_args, "extra node id:stake[:honest|invalid_share|unresponsive]");
  register_cmd->add_option("--height", height, "block height recorded with the circuit")->capture_default_str();
  auto* get_cmd = reg->add_subcommand("get", "print a registered circuit");
  get_cmd->add_option("id", id_hex, "circuit id (hex)")->required();
  get_cmd->add_option("--r1cs", r1cs_out, "also write the R1CS JSON here");

  // sim
  auto* sim_cmd = app.add_subcommand("sim", "mining simulation");
  sim_cmd->require_subcommand(1);
  SimOverrides so;
  auto* sim_run_cmd = sim_cmd->add_subcommand("run", "write sim_metrics.csv and sim_summary.csv, print a summary");
  sim_run_cmd->add_option("--psi", so.psi, "chain weight, e.g. 0.5 or 1/2");
  sim_run_cmd->add_option("--blocks", so.blocks, "stop after this many blocks");
  sim_run_cmd->add_option("--max-time", so.max_time, "stop at this simulated time");
  sim_run_cmd->add_option("--kappa", so.kappa, "initial difficulty");
  sim_run_cmd->add_option("--k-bits", so.k_bits, "bucket prefix bits, or auto");
  sim_run_cmd->add_option("--miners", so.powers, "comma-separated miner powers");
  sim_run_cmd->add_flag("--real-work", so.real_work, "build, prove and verify real blocks");

  // experiment
  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "reproduce a hypothesis experiment");
  exp_cmd->footer(kCsvHelp);
  exp_cmd->add_option("name", ea.name, "h1, h2, h3, h4 or overlap")->required();
  exp_cmd->add_option("--seeds", ea.seeds, "number of consecutive seeds from --seed (h1: 5, others: 3)");
  exp_cmd->add_option("--blocks", ea.blocks, "blocks per run (default 5000)");
  exp_cmd->add_option("--m", ea.ms, "overlap: pool sizes")->delimiter(',');
  exp_cmd->add_option("--t", ea.ts, "overlap: transactions per miner")->delimiter(',');
  exp_cmd->add_option("--trials", ea.trials, "overlap: Monte Carlo trials")->capture_default_str();
  exp_cmd->add_flag("--no-small-pool", ea.no_small_pool, "h4: skip the Poisson small-pool rows");

  try {
    app.parse(argc, argv);
    Context ctx = make_context(g, out);
    if (compile_cmd->parsed()) return circuit_compile(ctx, file);
    if (check_cmd->parsed()) return circuit_check(ctx, file, inputs, pub, priv);
    if (mask_cmd->parsed()) return woo_mask(ctx, file, pub, priv);
    if (transform_cmd->parsed()) return woo_transform(ctx, file, masks_file);
    if (prove_cmd->parsed()) return woo_prove(ctx, transformed_file, keys_file, request_file, eta);
    if (verify_cmd->parsed()) return woo_verify(ctx, keys_file, proof_file, verify_eta, verify_masks);
    if (register_cmd->parsed()) return registry_register(ctx, file, fee, n_nodes, stake, node_args, height);
    if (get_cmd->parsed()) return registry_get(ctx, id_hex, r1cs_out);
    if (sim_run_cmd->parsed()) return sim_run(ctx, so);
    if (exp_cmd->parsed()) return experiment(ctx, ea);
    err << app.help();
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::ConfigInvalid ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace pouw::cli
