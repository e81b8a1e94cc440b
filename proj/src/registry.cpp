#include "pouw/registry.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "pouw/error.hpp"
#include "pouw/r1cs_json.hpp"
#include "pouw/woo.hpp"

namespace pouw::registry {

using nlohmann::ordered_json;

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::honest: return "honest";
    case Behavior::invalid_share: return "invalid_share";
    case Behavior::unresponsive: return "unresponsive";
  }
  return "?";
}

std::string_view to_string(SlashReason r) {
  switch (r) {
    case SlashReason::invalid_share: return "invalid_share";
    case SlashReason::missed_contribution: return "missed_contribution";
    case SlashReason::unresponsive_query: return "unresponsive_query";
  }
  return "?";
}

Behavior behavior_from_string(std::string_view s) {
  for (auto b : {Behavior::honest, Behavior::invalid_share, Behavior::unresponsive}) {
    if (to_string(b) == s) return b;
  }
  throw Error(Errc::Malformed, "unknown node behavior '" + std::string(s) + "'");
}

SlashReason slash_reason_from_string(std::string_view s) {
  for (auto r : {SlashReason::invalid_share, SlashReason::missed_contribution,
                 SlashReason::unresponsive_query}) {
    if (to_string(r) == s) return r;
  }
  throw Error(Errc::Malformed, "unknown slash reason '" + std::string(s) + "'");
}

Hash256 contribution_tag(const Contribution& contribution) {
  return Sha256().update("woo-smpc").update(contribution).finish();
}

bool validate_contribution(const Contribution& contribution, const Hash256& proof_of_validity) {
  return contribution_tag(contribution) == proof_of_validity;
}

namespace {

ordered_json keys_to_json(const MockKeys& k) {
  // Proving and verifying halves carry the same fields in the mock system.
  return ordered_json{{"circuit_id", to_hex(k.proving_key.circuit_id)},
                      {"r1cs_digest", to_hex(k.proving_key.r1cs_digest)},
                      {"setup_seed", to_hex(k.proving_key.setup_seed)}};
}

MockKeys keys_from_json(const nlohmann::json& j) {
  ProvingKey pk{fixed_from_hex<CircuitId>(j.at("circuit_id").get<std::string>()),
                fixed_from_hex<Hash256>(j.at("r1cs_digest").get<std::string>()),
                fixed_from_hex<Hash256>(j.at("setup_seed").get<std::string>())};
  return MockKeys{pk, VerifyingKey{pk.circuit_id, pk.r1cs_digest, pk.setup_seed}};
}

}  // namespace

ordered_json record_to_json(const CircuitRecord& r) {
  return ordered_json{{"circuit_id", to_hex(r.circuit_id)},
                      {"source", r.source},
                      {"r1cs", r1cs_to_json(r.r1cs)},
                      {"keys", keys_to_json(r.keys)},
                      {"complexity", r.complexity},
                      {"registered_at", r.registered_at},
                      {"integrity_position", r.integrity_position}};
}

CircuitRecord record_from_json(const nlohmann::json& j) {
  try {
    CircuitRecord r;
    r.circuit_id = fixed_from_hex<CircuitId>(j.at("circuit_id").get<std::string>());
    r.source = j.at("source").get<std::string>();
    r.r1cs = r1cs_from_json(j.at("r1cs"));
    r.keys = keys_from_json(j.at("keys"));
    r.complexity = j.at("complexity").get<std::uint64_t>();
    r.registered_at = j.at("registered_at").get<std::uint64_t>();
    r.integrity_position = j.at("integrity_position").get<std::uint32_t>();
    if (circuit_id(r.source) != r.circuit_id) throw Error(Errc::Malformed, "circuit id does not match source");
    if (r.complexity != constraint_count(r.r1cs)) throw Error(Errc::Malformed, "complexity does not match r1cs");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Malformed, std::string("circuit record: ") + e.what());
  }
}

RegistryState::RegistryState(RegistryConfig config, Hash256 entropy)
    : config_(config), entropy_(entropy) {
  if (config_.slash_denominator == 0 || config_.slash_numerator > config_.slash_denominator) {
    throw Error(Errc::ConfigInvalid, "slash fraction must lie in [0, 1]");
  }
}

void RegistryState::record(ordered_json event) {
  apply(event);
  events_.push_back(std::move(event));
}

void RegistryState::add_node(std::string node_id, std::uint64_t stake, Behavior behavior) {
  auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const RegistryNode& n) { return n.node_id == node_id; });
  if (it != nodes_.end()) throw Error(Errc::Malformed, "node '" + node_id + "' already joined");
  if (stake < config_.min_stake) {
    throw Error(Errc::DomainError, "stake " + std::to_string(stake) + " below min_stake");
  }
  record(ordered_json{{"event", "node_join"},
                      {"node_id", node_id},
                      {"stake", stake},
                      {"behavior", to_string(behavior)}});
}

RegistryNode& RegistryState::mutable_node(std::string_view node_id) {
  auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const RegistryNode& n) { return n.node_id == node_id; });
  if (it == nodes_.end()) throw Error(Errc::UnknownNode, "no node '" + std::string(node_id) + "'");
  return *it;
}

const RegistryNode& RegistryState::node(std::string_view node_id) const {
  return const_cast<RegistryState*>(this)->mutable_node(node_id);
}

const CircuitRecord* RegistryState::find(const CircuitId& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

const CircuitRecord& RegistryState::get_circuit(const CircuitId& id) const {
  if (const auto* r = find(id)) return *r;
  throw Error(Errc::NotFound, "no circuit " + to_hex(id));
}

const CircuitRecord& RegistryState::register_circuit(std::string_view source, std::uint64_t fee,
                                                     const PrimeField& field, std::uint64_t height) {
  const CircuitId id = circuit_id(source);
  if (const auto* existing = find(id)) return *existing;
  if (fee < config_.min_registration_fee) {
    throw Error(Errc::FeeTooLow, "fee " + std::to_string(fee) + " below minimum " +
                                     std::to_string(config_.min_registration_fee));
  }

  std::vector<const RegistryNode*> active;
  for (const auto& n : nodes_) {
    if (n.active) active.push_back(&n);
  }
  if (active.empty()) throw Error(Errc::NoActiveNodes, "no active registry nodes");
  std::sort(active.begin(), active.end(),
            [](const RegistryNode* a, const RegistryNode* b) { return a->node_id < b->node_id; });

  Circuit circuit;
  R1CS r1cs;
  try {
    circuit = parse_circuit(source);
    r1cs = compile(circuit, field);
  } catch (const Error& e) {
    throw Error(Errc::CompileFailed, e.what());
  }

  const Param* integrity = circuit.find_param(woo::kIntegrityParam);
  if (!integrity || integrity->visibility != Visibility::public_input ||
      !r1cs.references(param_var_index(circuit, woo::kIntegrityParam))) {
    throw Error(Errc::IntegrityParamUnused, "circuit never constrains a public 'integrity' parameter");
  }
  std::uint32_t integrity_position = param_var_index(circuit, woo::kIntegrityParam) - 1;

  // Simulated ceremony: each active node offers a share plus its validity tag.
  std::vector<Contribution> valid;
  std::vector<std::string> contributors;
  std::vector<std::pair<std::string, SlashReason>> offenders;
  for (const RegistryNode* n : active) {
    if (n->behavior == Behavior::unresponsive) {
      offenders.emplace_back(n->node_id, SlashReason::missed_contribution);
      continue;
    }
    Contribution c;
    c.bytes = Sha256().update("pouw-registry-share").update(entropy_).update(n->node_id).update(id).finish().bytes;
    Hash256 tag = contribution_tag(c);
    if (n->behavior == Behavior::invalid_share) tag.bytes[0] ^= 0x01;
    if (validate_contribution(c, tag)) {
      valid.push_back(c);
      contributors.push_back(n->node_id);
    } else {
      offenders.emplace_back(n->node_id, SlashReason::invalid_share);
    }
  }
  if (valid.empty()) throw Error(Errc::NoContributions, "no valid setup contribution");

  for (const auto& [node_id, reason] : offenders) slash(node_id, reason);

  CircuitRecord rec;
  rec.circuit_id = id;
  rec.source = std::string(source);
  rec.complexity = constraint_count(r1cs);
  rec.keys = mock_setup(id, r1cs, valid);
  rec.r1cs = std::move(r1cs);
  rec.registered_at = height;
  rec.integrity_position = integrity_position;

  ordered_json ev{{"event", "register"}};
  const ordered_json fields = record_to_json(rec);
  for (const auto& [key, value] : fields.items()) ev[key] = value;
  ev["fee"] = fee;
  record(std::move(ev));

  const std::uint64_t share = fee / contributors.size();
  const std::uint64_t remainder = fee % contributors.size();
  for (std::size_t i = 0; i < contributors.size(); ++i) {
    record(ordered_json{{"event", "fee_credit"},
                        {"node_id", contributors[i]},
                        {"circuit_id", to_hex(id)},
                        {"amount", share + (i == 0 ? remainder : 0)}});
  }
  return records_.at(id);
}

void RegistryState::slash(std::string_view node_id, SlashReason reason) {
  const RegistryNode& n = mutable_node(node_id);
  if (!n.active) throw Error(Errc::AlreadyInactive, "node '" + n.node_id + "' is inactive");
  const std::uint64_t amount = static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(n.stake) * config_.slash_numerator / config_.slash_denominator);
  const std::uint64_t stake = n.stake - amount;
  record(ordered_json{{"event", "slash"},
                      {"node_id", n.node_id},
                      {"reason", to_string(reason)},
                      {"amount", amount},
                      {"stake", stake},
                      {"active", stake >= config_.min_stake}});
}

void RegistryState::apply(const ordered_json& ev) {
  const std::string kind = ev.at("event").get<std::string>();
  if (kind == "node_join") {
    nodes_.push_back(RegistryNode{ev.at("node_id").get<std::string>(), ev.at("stake").get<std::uint64_t>(),
                                  true, behavior_from_string(ev.at("behavior").get<std::string>()), 0});
  } else if (kind == "register") {
    CircuitRecord rec = record_from_json(ev);
    if (records_.contains(rec.circuit_id)) throw Error(Errc::Malformed, "circuit registered twice");
    records_.emplace(rec.circuit_id, std::move(rec));
  } else if (kind == "fee_credit") {
    mutable_node(ev.at("node_id").get<std::string>()).balance += ev.at("amount").get<std::uint64_t>();
  } else if (kind == "slash") {
    RegistryNode& n = mutable_node(ev.at("node_id").get<std::string>());
    (void)slash_reason_from_string(ev.at("reason").get<std::string>());
    n.stake = ev.at("stake").get<std::uint64_t>();
    n.active = ev.at("active").get<bool>();
  } else {
    throw Error(Errc::Malformed, "unknown registry event '" + kind + "'");
  }
}

void RegistryState::write_jsonl(std::ostream& out) const {
  for (const auto& ev : events_) out << ev.dump() << '\n';
}

RegistryState RegistryState::replay(std::istream& in, RegistryConfig config, Hash256 entropy) {
  RegistryState state(config, entropy);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      state.record(ordered_json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Malformed, "ledger line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return state;
}

}  // namespace pouw::registry
