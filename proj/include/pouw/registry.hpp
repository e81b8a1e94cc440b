#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pouw/circuit.hpp"
#include "pouw/field.hpp"
#include "pouw/hash.hpp"
#include "pouw/mock_proof.hpp"
#include "pouw/r1cs.hpp"

namespace pouw::registry {

enum class Behavior { honest, invalid_share, unresponsive };
enum class SlashReason { invalid_share, missed_contribution, unresponsive_query };

std::string_view to_string(Behavior b);
std::string_view to_string(SlashReason r);
Behavior behavior_from_string(std::string_view s);
SlashReason slash_reason_from_string(std::string_view s);

struct RegistryNode {
  std::string node_id;
  std::uint64_t stake = 0;
  bool active = true;
  Behavior behavior = Behavior::honest;
  std::uint64_t balance = 0;  // accumulated registration fees

  friend bool operator==(const RegistryNode&, const RegistryNode&) = default;
};

struct RegistryConfig {
  std::uint64_t min_stake = 30;
  std::uint64_t slash_numerator = 1;  // slash_fraction = numerator / denominator
  std::uint64_t slash_denominator = 2;
  std::uint64_t min_registration_fee = 10;
};

struct CircuitRecord {
  CircuitId circuit_id;
  std::string source;
  R1CS r1cs;
  MockKeys keys;
  std::uint64_t complexity = 0;
  std::uint64_t registered_at = 0;
  /// Position of `integrity` among the circuit's public inputs.
  std::uint32_t integrity_position = 0;

  friend bool operator==(const CircuitRecord&, const CircuitRecord&) = default;
};

/// Stand-in validity tag for a ceremony share: SHA-256("woo-smpc" | c).
Hash256 contribution_tag(const Contribution& contribution);
bool validate_contribution(const Contribution& contribution, const Hash256& proof_of_validity);

/// Single-writer registry. Records are append-only; every state change is
/// also appended to an event ledger that replay() turns back into state.
class RegistryState {
 public:
  explicit RegistryState(RegistryConfig config = {}, Hash256 entropy = {});

  const RegistryConfig& config() const noexcept { return config_; }

  void add_node(std::string node_id, std::uint64_t stake, Behavior behavior = Behavior::honest);

  /// Idempotent on the canonical source: a known id returns the existing
  /// record without charging. Throws Error(FeeTooLow), Error(NoActiveNodes),
  /// Error(CompileFailed), Error(IntegrityParamUnused), Error(NoContributions).
  const CircuitRecord& register_circuit(std::string_view source, std::uint64_t fee,
                                        const PrimeField& field, std::uint64_t height = 0);

  /// Throws Error(NotFound).
  const CircuitRecord& get_circuit(const CircuitId& id) const;
  const CircuitRecord* find(const CircuitId& id) const;

  /// Throws Error(UnknownNode), Error(AlreadyInactive).
  void slash(std::string_view node_id, SlashReason reason);

  const std::vector<RegistryNode>& nodes() const noexcept { return nodes_; }
  const RegistryNode& node(std::string_view node_id) const;
  const std::map<CircuitId, CircuitRecord>& records() const noexcept { return records_; }
  const std::vector<nlohmann::ordered_json>& events() const noexcept { return events_; }

  /// One JSON object per line.
  void write_jsonl(std::ostream& out) const;
  static RegistryState replay(std::istream& in, RegistryConfig config = {}, Hash256 entropy = {});

 private:
  RegistryNode& mutable_node(std::string_view node_id);
  void apply(const nlohmann::ordered_json& event);
  void record(nlohmann::ordered_json event);

  RegistryConfig config_;
  Hash256 entropy_;
  std::vector<RegistryNode> nodes_;
  std::map<CircuitId, CircuitRecord> records_;
  std::vector<nlohmann::ordered_json> events_;
};

nlohmann::ordered_json record_to_json(const CircuitRecord& record);
CircuitRecord record_from_json(const nlohmann::json& doc);

}  // namespace pouw::registry
