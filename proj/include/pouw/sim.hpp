#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pouw/field.hpp"
#include "pouw/protocol.hpp"

// Discrete-event model of miners racing to build proof chains. Places of the
// reference Petri net map to mempool contents and per-miner partial chains;
// its timed transitions map to ProofCompleted events.

namespace pouw::sim {

enum class PreferenceKind { uniform_random, prefer_small, prefer_large, fixed };
struct ProofSizePreference {
  PreferenceKind kind = PreferenceKind::uniform_random;
  std::uint64_t n = 0;  // complexity for `fixed`
};

enum class BucketStrategyKind { random, least_loaded, fixed };
struct BucketStrategy {
  BucketStrategyKind kind = BucketStrategyKind::random;
  std::uint32_t index = 0;  // for `fixed`, taken modulo the bucket count
};

struct MinerSpec {
  std::uint32_t miner_id = 0;
  double power = 1;  // work units per time unit
  ProofSizePreference preference;
  BucketStrategy bucket_strategy;
};

enum class MempoolKind { infinite, poisson };
/// Complexities are uniform over [c_min, c_max] in both models. The
/// infinite pool always offers every complexity in that range.
struct MempoolModel {
  MempoolKind kind = MempoolKind::infinite;
  double arrival_rate = 0;           // poisson: transactions per time unit
  std::uint64_t initial_pending = 0;  // poisson: pool size at t = 0
  std::uint64_t c_min = 1000;
  std::uint64_t c_max = 1000;
};

/// Sets a miner's power from `time` on; proofs already running keep their
/// completion time.
struct PowerChange {
  double time = 0;
  std::uint32_t miner_id = 0;
  double power = 1;
};

struct SimConfig {
  std::vector<MinerSpec> miners;
  std::uint64_t kappa0 = 100000;
  Rational psi = 0;
  bool k_auto = false;  // recompute k with bucket_count_policy at retarget boundaries
  unsigned k_bits = 0;
  std::uint64_t target_per_bucket = 64;
  double proof_time_a = 1.0;  // proof duration = (a * C + b) / power
  double proof_time_b = 0.0;
  std::uint64_t block_reward = 1000;
  std::uint64_t proof_fee_rate = 1;
  std::uint64_t retarget_window = 64;  // blocks
  double target_block_time = 0;        // 0 keeps kappa fixed
  MempoolModel mempool;
  std::uint64_t max_blocks = 10000;  // 0 = unbounded
  double max_time = 0;               // 0 = unbounded
  std::uint64_t seed = 1;
  std::vector<PowerChange> power_schedule;
  /// Build, prove and hash real blocks instead of sampling the lottery.
  bool real_work = false;
  std::uint64_t field_modulus = PrimeField::kMersenne61;
};

/// Throws Error(ConfigInvalid) naming the first bad field.
void validate(const SimConfig& config);

/// Declaration order is the tie-break rank at equal times.
enum class EventKind { RetargetBoundary, BlockPublished, ProofCompleted, TxArrival };
std::string_view to_string(EventKind k);

struct SimEvent {
  double time = 0;
  EventKind kind = EventKind::ProofCompleted;
  std::uint32_t miner_id = 0;
  std::uint32_t bucket = 0;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct MinerMetrics {
  std::uint32_t miner_id = 0;
  std::uint64_t blocks_won = 0;
  std::uint64_t block_rewards = 0;
  std::uint64_t proof_rewards = 0;  // fees of own proofs in own blocks
  std::uint64_t useful_work = 0;    // constraint-work in published blocks
  std::uint64_t wasted_work = 0;    // discarded chains, including the ones open at the end
  std::uint64_t proofs_completed = 0;

  friend bool operator==(const MinerMetrics&, const MinerMetrics&) = default;
};

struct Metrics {
  std::vector<MinerMetrics> miners;
  std::uint64_t blocks = 0;
  std::uint64_t proofs_in_blocks = 0;
  double end_time = 0;
  double wasted_fraction = 0;
  double mean_block_time = 0;
  double var_block_time = 0;
  double cv_block_time = 0;
  double mean_proofs_per_block = 0;
  double gini = 0;  // over block + proof rewards per miner
  std::uint64_t final_kappa = 0;
  unsigned final_k_bits = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct BlockRecord {
  double time = 0;
  std::uint32_t miner_id = 0;
  std::uint32_t bucket = 0;
  std::uint64_t proofs = 0;
  std::uint64_t work = 0;
  std::uint64_t kappa = 0;

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct SimTrace {
  std::vector<SimEvent> events;  // every processed, non-stale event
  std::vector<BlockRecord> blocks;
};

/// Throws Error(ConfigInvalid).
Metrics run_sim(const SimConfig& config);
Metrics run_sim(const SimConfig& config, SimTrace* trace);

/// `n` miners of the given powers with default preferences and ids 0..n-1.
std::vector<MinerSpec> make_miners(const std::vector<double>& powers);

}  // namespace pouw::sim
