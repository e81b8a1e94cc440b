#include "pouw/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <tuple>
#include <unordered_set>

#include "pouw/block.hpp"
#include "pouw/error.hpp"
#include "pouw/registry.hpp"
#include "pouw/stats.hpp"

namespace pouw::sim {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::RetargetBoundary: return "RetargetBoundary";
    case EventKind::BlockPublished: return "BlockPublished";
    case EventKind::ProofCompleted: return "ProofCompleted";
    case EventKind::TxArrival: return "TxArrival";
  }
  return "?";
}

std::vector<MinerSpec> make_miners(const std::vector<double>& powers) {
  std::vector<MinerSpec> out;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    MinerSpec m;
    m.miner_id = static_cast<std::uint32_t>(i);
    m.power = powers[i];
    out.push_back(m);
  }
  return out;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

bool fits_u64(const BigInt& v) { return v >= 0 && v <= std::numeric_limits<std::uint64_t>::max(); }

}  // namespace

void validate(const SimConfig& c) {
  if (c.miners.empty()) invalid("at least one miner is required");
  std::set<std::uint32_t> ids;
  for (const auto& m : c.miners) {
    if (!ids.insert(m.miner_id).second) invalid("duplicate miner id " + std::to_string(m.miner_id));
    if (!(m.power > 0) || !std::isfinite(m.power)) invalid("miner power must be positive");
    if (m.preference.kind == PreferenceKind::fixed && m.preference.n == 0) invalid("fixed proof size must be >= 1");
  }
  if (c.kappa0 < 1) invalid("kappa0 must be >= 1");
  if (c.psi < 0 || c.psi > 1) invalid("psi must lie in [0, 1]");
  if (!fits_u64(boost::multiprecision::numerator(c.psi)) || !fits_u64(boost::multiprecision::denominator(c.psi))) {
    invalid("psi has too large a numerator or denominator");
  }
  if (c.k_bits > kMaxBucketBits) invalid("k_bits must be <= 32");
  if (c.k_auto && c.mempool.kind != MempoolKind::poisson) invalid("k_bits = auto needs the poisson mempool");
  if (c.k_auto && c.target_per_bucket < 1) invalid("target_per_bucket must be >= 1");
  if (!(c.proof_time_a >= 0) || !(c.proof_time_b >= 0) || !std::isfinite(c.proof_time_a) ||
      !std::isfinite(c.proof_time_b)) {
    invalid("proof time coefficients must be non-negative");
  }
  if (c.mempool.c_min < 1 || c.mempool.c_min > c.mempool.c_max) invalid("need 1 <= c_min <= c_max");
  if (!(c.proof_time_a * static_cast<double>(c.mempool.c_min) + c.proof_time_b > 0)) {
    invalid("proof time must be positive");
  }
  if (c.retarget_window < 1) invalid("retarget_window must be >= 1");
  if (!(c.target_block_time >= 0)) invalid("target_block_time must be >= 0");
  if (c.mempool.kind == MempoolKind::poisson && !(c.mempool.arrival_rate > 0)) {
    invalid("poisson mempool needs a positive arrival_rate");
  }
  if (c.max_blocks == 0 && !(c.max_time > 0)) invalid("set max_blocks or max_time");
  if (!(c.max_time >= 0)) invalid("max_time must be >= 0");
  for (const auto& pc : c.power_schedule) {
    if (!ids.contains(pc.miner_id)) invalid("power change for unknown miner " + std::to_string(pc.miner_id));
    if (!(pc.power > 0) || !(pc.time >= 0)) invalid("power change needs time >= 0 and power > 0");
  }
  if (c.real_work) {
    if (c.mempool.kind != MempoolKind::infinite) invalid("real_work needs the infinite mempool");
    if (c.mempool.c_min < 2) invalid("real_work circuits need at least 2 constraints");
    if (c.k_bits > 16) invalid("real_work supports k_bits <= 16");
    if (!is_prime_u64(c.field_modulus) || c.field_modulus <= 2) invalid("field modulus must be prime");
  }
}

namespace {

constexpr std::uint32_t kNoBucket = std::numeric_limits<std::uint32_t>::max();

struct QueuedEvent {
  double time;
  int rank;
  std::uint32_t miner_id;
  std::uint64_t seq;
  std::uint64_t generation;
  std::uint32_t bucket;
};

struct Later {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    return std::tie(a.time, a.rank, a.miner_id, a.seq) > std::tie(b.time, b.rank, b.miner_id, b.seq);
  }
};

struct PoolTx {
  std::uint64_t seq;
  std::uint64_t complexity;
  std::uint32_t prefix;  // first 32 bits of the txid
};

struct RealCircuit {
  Circuit circuit;
  const registry::CircuitRecord* record = nullptr;
};

struct MinerState {
  MinerSpec spec;
  double power = 1;
  std::uint32_t bucket = kNoBucket;
  std::uint64_t generation = 0;
  std::vector<std::uint64_t> chain;  // complexities of completed proofs
  std::vector<std::uint64_t> chain_txs;
  std::uint64_t chain_work = 0;
  std::unordered_set<std::uint64_t> reserved;  // pool txs in the chain or in progress
  bool idle = false;                            // waiting for pool transactions
  std::uint64_t current_c = 0;
  std::uint64_t current_tx = 0;
  std::optional<ProofTransaction> current_real;
  std::optional<BlockBuilder> builder;
  MinerMetrics metrics;
};

class Simulation {
 public:
  Simulation(const SimConfig& config, SimTrace* trace)
      : cfg_(config), trace_(trace), rng_(config.seed), kappa_{config.kappa0}, k_(config.k_bits),
        field_(config.real_work ? config.field_modulus : PrimeField::kMersenne61) {
    psi_num_ = static_cast<std::uint64_t>(boost::multiprecision::numerator(cfg_.psi));
    psi_den_ = static_cast<std::uint64_t>(boost::multiprecision::denominator(cfg_.psi));
    std::vector<MinerSpec> specs = cfg_.miners;
    std::sort(specs.begin(), specs.end(), [](const MinerSpec& a, const MinerSpec& b) { return a.miner_id < b.miner_id; });
    for (const auto& s : specs) {
      MinerState m;
      m.spec = s;
      m.power = s.power;
      m.metrics.miner_id = s.miner_id;
      miners_.push_back(std::move(m));
    }
    schedule_ = cfg_.power_schedule;
    std::stable_sort(schedule_.begin(), schedule_.end(),
                     [](const PowerChange& a, const PowerChange& b) { return a.time < b.time; });
    if (cfg_.real_work) {
      registry::RegistryConfig rc;
      registry_.emplace(rc, sha256("pouw-sim-registry"));
      registry_->add_node("sim-registry", rc.min_stake);
    }
  }

  Metrics run() {
    if (cfg_.mempool.kind == MempoolKind::poisson) {
      for (std::uint64_t i = 0; i < cfg_.mempool.initial_pending; ++i) add_pool_tx();
      schedule_arrival();
      if (cfg_.k_auto) k_ = bucket_count_policy(pending_, cfg_.target_per_bucket);
    }
    std::vector<std::size_t> all(miners_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    restart(all);

    while (!queue_.empty() && !done_) {
      QueuedEvent ev = queue_.top();
      if (cfg_.max_time > 0 && ev.time > cfg_.max_time) {
        now_ = cfg_.max_time;
        break;
      }
      queue_.pop();
      now_ = ev.time;
      apply_power_changes();
      dispatch(ev);
    }
    return finish();
  }

 private:
  void push(double time, EventKind kind, std::uint32_t miner_id, std::uint64_t generation, std::uint32_t bucket) {
    queue_.push(QueuedEvent{time, static_cast<int>(kind), miner_id, seq_++, generation, bucket});
  }

  void record_event(const QueuedEvent& ev) {
    if (trace_) trace_->events.push_back(SimEvent{ev.time, static_cast<EventKind>(ev.rank), ev.miner_id, ev.bucket});
  }

  MinerState& miner_by_id(std::uint32_t id) {
    auto it = std::lower_bound(miners_.begin(), miners_.end(), id,
                               [](const MinerState& m, std::uint32_t v) { return m.spec.miner_id < v; });
    return *it;
  }

  void apply_power_changes() {
    while (next_change_ < schedule_.size() && schedule_[next_change_].time <= now_) {
      miner_by_id(schedule_[next_change_].miner_id).power = schedule_[next_change_].power;
      ++next_change_;
    }
  }

  void dispatch(const QueuedEvent& ev) {
    switch (static_cast<EventKind>(ev.rank)) {
      case EventKind::RetargetBoundary:
        record_event(ev);
        on_retarget();
        break;
      case EventKind::BlockPublished: {
        MinerState& m = miner_by_id(ev.miner_id);
        if (m.generation != ev.generation) return;
        record_event(ev);
        on_block(m);
        break;
      }
      case EventKind::ProofCompleted: {
        MinerState& m = miner_by_id(ev.miner_id);
        if (m.generation != ev.generation) return;
        record_event(ev);
        on_proof(m);
        break;
      }
      case EventKind::TxArrival:
        record_event(ev);
        on_arrival();
        break;
    }
  }

  std::uint64_t bucket_count() const { return std::uint64_t{1} << k_; }

  std::uint32_t bucket_of_prefix(std::uint32_t prefix) const {
    return k_ == 0 ? 0 : static_cast<std::uint32_t>(prefix >> (32 - k_));
  }

  // ---- mempool -------------------------------------------------------

  std::uint64_t draw_complexity() {
    return std::uniform_int_distribution<std::uint64_t>(cfg_.mempool.c_min, cfg_.mempool.c_max)(rng_);
  }

  std::uint32_t add_pool_tx() {
    PoolTx tx{next_tx_++, draw_complexity(), static_cast<std::uint32_t>(rng_() >> 32)};
    const std::uint32_t b = bucket_of_prefix(tx.prefix);
    pools_[b].push_back(tx);
    ++pending_;
    return b;
  }

  void schedule_arrival() {
    const double dt = std::exponential_distribution<double>(cfg_.mempool.arrival_rate)(rng_);
    push(now_ + dt, EventKind::TxArrival, 0, 0, 0);
  }

  void rebucket_pool() {
    std::map<std::uint32_t, std::vector<PoolTx>> next;
    for (auto& [b, txs] : pools_) {
      for (const auto& tx : txs) next[bucket_of_prefix(tx.prefix)].push_back(tx);
    }
    for (auto& [b, txs] : next) {
      std::sort(txs.begin(), txs.end(), [](const PoolTx& a, const PoolTx& c) { return a.seq < c.seq; });
    }
    pools_ = std::move(next);
  }

  /// Index into the bucket pool per the miner's preference, or nullopt.
  std::optional<std::size_t> pick_from_pool(const MinerState& m) {
    auto it = pools_.find(m.bucket);
    if (it == pools_.end()) return std::nullopt;
    const auto& pool = it->second;
    std::optional<std::size_t> best;
    std::size_t available = 0;
    auto better = [&](const PoolTx& a, const PoolTx& b) {
      switch (m.spec.preference.kind) {
        case PreferenceKind::prefer_small: return a.complexity < b.complexity;
        case PreferenceKind::prefer_large: return a.complexity > b.complexity;
        case PreferenceKind::fixed: {
          const auto n = m.spec.preference.n;
          auto dist = [n](std::uint64_t c) { return c > n ? c - n : n - c; };
          return dist(a.complexity) < dist(b.complexity);
        }
        case PreferenceKind::uniform_random: return false;
      }
      return false;
    };
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (m.reserved.contains(pool[i].seq)) continue;
      ++available;
      if (!best || better(pool[i], pool[*best])) best = i;
    }
    if (!best || m.spec.preference.kind != PreferenceKind::uniform_random) return best;
    std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, available - 1)(rng_);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (m.reserved.contains(pool[i].seq)) continue;
      if (r-- == 0) return i;
    }
    return std::nullopt;
  }

  // ---- miners --------------------------------------------------------

  std::uint32_t choose_bucket(const MinerState& m) {
    const std::uint64_t n = bucket_count();
    switch (m.spec.bucket_strategy.kind) {
      case BucketStrategyKind::fixed:
        return static_cast<std::uint32_t>(m.spec.bucket_strategy.index % n);
      case BucketStrategyKind::random:
        return static_cast<std::uint32_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_));
      case BucketStrategyKind::least_loaded: {
        std::map<std::uint32_t, std::size_t> load;
        for (const auto& o : miners_) {
          if (o.bucket != kNoBucket) ++load[o.bucket];
        }
        if (load.size() < n) {
          std::uint32_t b = 0;
          for (const auto& [bucket, count] : load) {
            if (bucket != b) break;
            ++b;
          }
          return b;
        }
        auto it = std::min_element(load.begin(), load.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
        return it->first;
      }
    }
    return 0;
  }

  Address miner_address(const MinerState& m) const {
    Address a;
    const Hash256 h = Sha256().update("pouw-miner").update(std::to_string(m.spec.miner_id)).finish();
    std::copy_n(h.bytes.begin(), a.bytes.size(), a.bytes.begin());
    return a;
  }

  Hash256 tip(std::uint32_t bucket) const {
    auto it = tips_.find(bucket);
    return it == tips_.end() ? sha256("pouw-genesis") : it->second;
  }

  void begin_chain(MinerState& m) {
    if (!cfg_.real_work) return;
    BlockHeader h;
    h.prev_hash = tip(m.bucket);
    h.miner_addr = miner_address(m);
    h.bucket_index = m.bucket;
    h.timestamp = static_cast<std::uint64_t>(std::llround(now_));
    m.builder.emplace(h, std::vector<CoinTransaction>{});
  }

  /// Discards the chain (counted as wasted unless it was just published) and
  /// aborts any proof in progress.
  void reset(MinerState& m, bool published) {
    if (!published) m.metrics.wasted_work += m.chain_work;
    m.chain.clear();
    m.chain_txs.clear();
    m.chain_work = 0;
    m.reserved.clear();
    m.idle = false;
    m.current_real.reset();
    m.builder.reset();
    ++m.generation;
    m.bucket = kNoBucket;
  }

  void restart(const std::vector<std::size_t>& indices) {
    for (auto i : indices) {
      miners_[i].bucket = choose_bucket(miners_[i]);
      begin_chain(miners_[i]);
    }
    for (auto i : indices) start_proof(miners_[i]);
  }

  const RealCircuit& real_circuit(std::uint64_t c) {
    auto it = circuits_.find(c);
    if (it != circuits_.end()) return it->second;
    const std::string src = synthetic_chain_source(c, 2, true);
    RealCircuit rc;
    rc.circuit = parse_circuit(src);
    rc.record = &registry_->register_circuit(src, registry_->config().min_registration_fee, field_, blocks_);
    return circuits_.emplace(c, std::move(rc)).first->second;
  }

  ProofTransaction make_real_tx(const MinerState& m, std::uint64_t c) {
    const RealCircuit& rc = real_circuit(c);
    while (true) {
      std::uint64_t x0 = field_.reduce(rng_()), x1 = field_.reduce(rng_());
      const std::uint64_t priv[] = {x0, x1};
      const std::uint64_t result = synthetic_chain_result(field_, priv, c, true);
      ProofTransaction tx = make_proof_tx(rc.record->circuit_id, {result}, {x0, x1}, c, cfg_.proof_fee_rate);
      if (bucket_of(tx.txid, k_) == m.bucket) return tx;
    }
  }

  void start_proof(MinerState& m) {
    std::uint64_t c = 0;
    if (cfg_.mempool.kind == MempoolKind::infinite) {
      switch (m.spec.preference.kind) {
        case PreferenceKind::uniform_random: c = draw_complexity(); break;
        case PreferenceKind::prefer_small: c = cfg_.mempool.c_min; break;
        case PreferenceKind::prefer_large: c = cfg_.mempool.c_max; break;
        case PreferenceKind::fixed: c = m.spec.preference.n; break;
      }
    } else {
      auto idx = pick_from_pool(m);
      if (!idx) {
        m.idle = true;
        return;
      }
      const PoolTx& tx = pools_[m.bucket][*idx];
      c = tx.complexity;
      m.current_tx = tx.seq;
      m.reserved.insert(tx.seq);
    }
    m.current_c = c;
    if (cfg_.real_work) m.current_real = make_real_tx(m, c);
    const double duration = (cfg_.proof_time_a * static_cast<double>(c) + cfg_.proof_time_b) / m.power;
    push(now_ + duration, EventKind::ProofCompleted, m.spec.miner_id, m.generation, m.bucket);
  }

  /// Sampled lottery: a uniform u64 below floor(p * 2^64) wins.
  bool draw_fast(const MinerState& m) {
    using u128 = unsigned __int128;
    const std::uint64_t current = m.chain.back();
    const u128 x = u128{current} * psi_den_ + u128{psi_num_} * (m.chain_work - current);
    const u128 d = u128{kappa_.kappa} * psi_den_;
    if (x >= d) return true;
    std::uint64_t threshold;
    if (d >> 64 == 0) {
      threshold = static_cast<std::uint64_t>((x << 64) / d);
    } else {
      BigInt t = lottery_target(p_win_psi(m.chain, kappa_, LotteryParams{cfg_.psi})) >> 192;
      threshold = static_cast<std::uint64_t>(t);
    }
    return rng_() < threshold;
  }

  bool draw_real(MinerState& m) {
    const RealCircuit& rc = real_circuit(m.current_c);
    const MockProof proof = prove_transaction(rc.circuit, *rc.record, *m.current_real, m.builder->eta());
    m.builder->append(*m.current_real, proof);
    m.current_real.reset();
    const Block candidate = m.builder->candidate();
    const LotteryParams params{cfg_.psi};
    if (!lottery_draw(candidate, p_win_psi(m.builder->complexities(), kappa_, params))) return false;
    const ChainContext ctx{tip(m.bucket), kappa_, params, k_};
    const Verdict v = verify_block(candidate, ctx, [this](const CircuitId& id) { return registry_->find(id); });
    if (!v.accepted()) {
      throw Error(Errc::Mismatch, "honest block rejected: " + std::string(pouw::to_string(v.reason)));
    }
    tips_[m.bucket] = candidate.block_hash;
    return true;
  }

  void on_proof(MinerState& m) {
    m.chain.push_back(m.current_c);
    m.chain_work += m.current_c;
    if (cfg_.mempool.kind == MempoolKind::poisson) m.chain_txs.push_back(m.current_tx);
    ++m.metrics.proofs_completed;
    const bool win = cfg_.real_work ? draw_real(m) : draw_fast(m);
    if (win) {
      push(now_, EventKind::BlockPublished, m.spec.miner_id, m.generation, m.bucket);
    } else {
      start_proof(m);
    }
  }

  void on_block(MinerState& winner) {
    const std::uint32_t bucket = winner.bucket;
    ++blocks_;
    ++winner.metrics.blocks_won;
    winner.metrics.block_rewards += cfg_.block_reward;
    winner.metrics.proof_rewards += cfg_.proof_fee_rate * winner.chain_work;
    winner.metrics.useful_work += winner.chain_work;
    proofs_in_blocks_ += winner.chain.size();
    block_times_.push_back(now_);
    if (trace_) {
      trace_->blocks.push_back(
          BlockRecord{now_, winner.spec.miner_id, bucket, winner.chain.size(), winner.chain_work, kappa_.kappa});
    }

    if (cfg_.mempool.kind == MempoolKind::poisson) {
      auto& pool = pools_[bucket];
      const std::unordered_set<std::uint64_t> included(winner.chain_txs.begin(), winner.chain_txs.end());
      const auto before = pool.size();
      std::erase_if(pool, [&](const PoolTx& tx) { return included.contains(tx.seq); });
      pending_ -= before - pool.size();
    }

    std::vector<std::size_t> affected;
    for (std::size_t i = 0; i < miners_.size(); ++i) {
      if (miners_[i].bucket == bucket) {
        reset(miners_[i], &miners_[i] == &winner);
        affected.push_back(i);
      }
    }

    if (cfg_.max_blocks > 0 && blocks_ >= cfg_.max_blocks) {
      done_ = true;
      return;
    }
    if ((cfg_.target_block_time > 0 || cfg_.k_auto) && blocks_ % cfg_.retarget_window == 0) {
      push(now_, EventKind::RetargetBoundary, 0, 0, 0);
    }
    restart(affected);
  }

  void on_retarget() {
    if (cfg_.target_block_time > 0) {
      const double actual = now_ - window_start_;
      const double target = cfg_.target_block_time * static_cast<double>(cfg_.retarget_window);
      if (actual > 0) kappa_ = adjust_difficulty(kappa_, actual, target);
    }
    window_start_ = now_;
    if (cfg_.k_auto) {
      const unsigned k = bucket_count_policy(pending_, cfg_.target_per_bucket);
      if (k != k_) {
        k_ = k;
        rebucket_pool();
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < miners_.size(); ++i) {
          reset(miners_[i], false);
          all.push_back(i);
        }
        restart(all);
      }
    }
  }

  void on_arrival() {
    const std::uint32_t b = add_pool_tx();
    schedule_arrival();
    for (auto& m : miners_) {
      if (m.idle && m.bucket == b) {
        m.idle = false;
        start_proof(m);
      }
    }
  }

  Metrics finish() {
    Metrics out;
    for (auto& m : miners_) {
      m.metrics.wasted_work += m.chain_work;
      m.chain_work = 0;
      out.miners.push_back(m.metrics);
    }
    out.blocks = blocks_;
    out.proofs_in_blocks = proofs_in_blocks_;
    out.end_time = now_;
    out.final_kappa = kappa_.kappa;
    out.final_k_bits = k_;

    std::uint64_t useful = 0, wasted = 0;
    std::vector<double> rewards;
    for (const auto& m : out.miners) {
      useful += m.useful_work;
      wasted += m.wasted_work;
      rewards.push_back(static_cast<double>(m.block_rewards + m.proof_rewards));
    }
    if (useful + wasted > 0) out.wasted_fraction = static_cast<double>(wasted) / static_cast<double>(useful + wasted);
    if (std::any_of(rewards.begin(), rewards.end(), [](double r) { return r > 0; })) out.gini = gini(rewards);

    if (!block_times_.empty()) {
      std::vector<double> gaps;
      double prev = 0;
      for (double t : block_times_) {
        gaps.push_back(t - prev);
        prev = t;
      }
      double mean = 0;
      for (double g : gaps) mean += g;
      mean /= static_cast<double>(gaps.size());
      double var = 0;
      for (double g : gaps) var += (g - mean) * (g - mean);
      var = gaps.size() > 1 ? var / static_cast<double>(gaps.size() - 1) : 0;
      out.mean_block_time = mean;
      out.var_block_time = var;
      out.cv_block_time = mean > 0 ? std::sqrt(var) / mean : 0;
      out.mean_proofs_per_block = static_cast<double>(proofs_in_blocks_) / static_cast<double>(blocks_);
    }
    return out;
  }

  const SimConfig& cfg_;
  SimTrace* trace_;
  std::mt19937_64 rng_;
  Difficulty kappa_;
  unsigned k_;
  PrimeField field_;
  std::uint64_t psi_num_ = 0;
  std::uint64_t psi_den_ = 1;

  std::vector<MinerState> miners_;  // sorted by miner_id
  std::vector<PowerChange> schedule_;
  std::size_t next_change_ = 0;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0;
  double window_start_ = 0;
  bool done_ = false;

  std::map<std::uint32_t, std::vector<PoolTx>> pools_;
  std::uint64_t pending_ = 0;
  std::uint64_t next_tx_ = 0;

  std::uint64_t blocks_ = 0;
  std::uint64_t proofs_in_blocks_ = 0;
  std::vector<double> block_times_;

  std::optional<registry::RegistryState> registry_;
  std::map<std::uint64_t, RealCircuit> circuits_;
  std::map<std::uint32_t, Hash256> tips_;
};

}  // namespace

Metrics run_sim(const SimConfig& config, SimTrace* trace) {
  validate(config);
  if (trace) *trace = SimTrace{};
  return Simulation(config, trace).run();
}

Metrics run_sim(const SimConfig& config) { return run_sim(config, nullptr); }

}  // namespace pouw::sim
