#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "pouw/field.hpp"
#include "pouw/registry.hpp"
#include "pouw/sim.hpp"

// TOML schema (every key optional, unknown keys rejected):
//
//   seed = 1
//   out = "out"
//   [field]     modulus = "2305843009213693951"
//   [registry]  min_stake, slash_fraction ("0.5" or "1/2"), min_registration_fee, fee_rate
//   [sim]       kappa0, psi, k_bits (integer or "auto"), target_per_bucket,
//               proof_time_a, proof_time_b, block_reward, proof_fee_rate,
//               retarget_window, target_block_time, max_blocks, max_time, real_work
//   [sim.mempool]  model ("infinite" | "poisson"), arrival_rate, initial_pending, c_min, c_max
//   [[sim.miners]] id, power, preference ("uniform_random" | "prefer_small" |
//                  "prefer_large" | "fixed:<n>"), bucket_strategy ("random" |
//                  "least_loaded" | "fixed:<index>")
//   [[sim.power_schedule]] time, miner, power

namespace pouw {

struct AppConfig {
  sim::SimConfig sim;
  std::uint64_t field_modulus = PrimeField::kMersenne61;
  registry::RegistryConfig registry;
  std::uint64_t fee_rate = 1;
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;

  PrimeField field() const { return PrimeField(field_modulus); }
};

/// Two equal miners and the simulator defaults.
AppConfig default_app_config();

/// Throws Error(ConfigInvalid) for syntax errors, unknown keys, wrong types
/// or values that fail validate().
AppConfig parse_config(std::string_view toml_text);
AppConfig load_config(const std::filesystem::path& path);

/// Field modulus prime and > 2^16, registry constants sane, sim config valid.
void validate(const AppConfig& config);

sim::ProofSizePreference parse_preference(std::string_view text);
sim::BucketStrategy parse_bucket_strategy(std::string_view text);

}  // namespace pouw
