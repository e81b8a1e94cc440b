#include "pouw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pouw/error.hpp"
#include "pouw/stats.hpp"

namespace pouw::sim {

std::vector<Metrics> run_many(const std::vector<SimConfig>& configs) {
  for (const auto& c : configs) validate(c);
  std::vector<Metrics> out(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_sim(configs[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<Metrics> run_many_serial(const std::vector<SimConfig>& configs) {
  std::vector<Metrics> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(run_sim(c));
  return out;
}

SimConfig ExperimentSettings::default_experiment_config() {
  SimConfig c;
  c.kappa0 = 100000;
  c.mempool.c_min = c.mempool.c_max = 1000;
  c.proof_time_a = 1.0;
  c.proof_time_b = 0.0;
  c.block_reward = 1000;
  c.proof_fee_rate = 1;
  c.max_blocks = 5000;
  c.target_block_time = 0;
  return c;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(first + i);
  return out;
}

namespace {

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

H1Result experiment_h1(const ExperimentSettings& s, const std::vector<double>& ratios) {
  std::vector<SimConfig> configs;
  std::vector<H1Row> runs;
  for (double f : ratios) {
    for (auto seed : s.seeds) {
      SimConfig c = s.base;
      c.miners = make_miners({1.0, f});
      c.psi = 0;
      c.k_bits = 0;
      c.k_auto = false;
      c.seed = seed;
      configs.push_back(c);
      runs.push_back(H1Row{f, seed, 0, 0});
    }
  }
  const auto metrics = run_many(configs);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& weak = metrics[i].miners[0];
    const auto& strong = metrics[i].miners[1];
    runs[i].block_reward_ratio = ratio(static_cast<double>(strong.block_rewards), static_cast<double>(weak.block_rewards));
    runs[i].proof_reward_ratio = ratio(static_cast<double>(strong.proof_rewards), static_cast<double>(weak.proof_rewards));
  }
  H1Result r;
  r.runs = runs;
  std::map<double, std::pair<H1Row, std::size_t>> acc;
  for (const auto& row : runs) {
    auto& [sum, n] = acc[row.power_ratio];
    sum.power_ratio = row.power_ratio;
    sum.block_reward_ratio += row.block_reward_ratio;
    sum.proof_reward_ratio += row.proof_reward_ratio;
    ++n;
  }
  for (double f : ratios) {
    auto [sum, n] = acc.at(f);
    sum.block_reward_ratio /= static_cast<double>(n);
    sum.proof_reward_ratio /= static_cast<double>(n);
    r.means.push_back(sum);
  }
  return r;
}

H2Result experiment_h2(const ExperimentSettings& s) {
  const std::uint64_t kappa = s.base.kappa0;
  const std::uint64_t c_min = std::max<std::uint64_t>(1, kappa / 1000);
  const std::uint64_t c_max = std::max<std::uint64_t>(c_min, kappa / 100);
  struct Pair {
    std::string label;
    ProofSizePreference a, b;
  };
  const std::vector<Pair> pairs = {
      {"uniform_random/uniform_random", {PreferenceKind::uniform_random, 0}, {PreferenceKind::uniform_random, 0}},
      {"prefer_small/prefer_large", {PreferenceKind::prefer_small, 0}, {PreferenceKind::prefer_large, 0}},
      {"fixed(" + std::to_string(c_min) + ")/fixed(" + std::to_string(2 * c_min) + ")",
       {PreferenceKind::fixed, c_min},
       {PreferenceKind::fixed, 2 * c_min}},
  };
  std::vector<SimConfig> configs;
  H2Result r;
  for (const auto& p : pairs) {
    for (auto seed : s.seeds) {
      SimConfig c = s.base;
      c.miners = make_miners({1.0, 1.0});
      c.miners[0].preference = p.a;
      c.miners[1].preference = p.b;
      c.mempool.kind = MempoolKind::infinite;
      c.mempool.c_min = c_min;
      c.mempool.c_max = c_max;
      c.psi = 0;
      c.k_bits = 0;
      c.k_auto = false;
      c.seed = seed;
      configs.push_back(c);
      r.runs.push_back(H2Row{p.label, seed, 0, 0});
    }
  }
  const auto metrics = run_many(configs);
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const double a = static_cast<double>(metrics[i].miners[0].block_rewards);
    const double b = static_cast<double>(metrics[i].miners[1].block_rewards);
    r.runs[i].share_a = ratio(a, a + b);
    r.runs[i].share_b = ratio(b, a + b);
  }
  for (const auto& p : pairs) {
    H2Row m{p.label, 0, 0, 0};
    std::size_t n = 0;
    for (const auto& row : r.runs) {
      if (row.preference != p.label) continue;
      m.share_a += row.share_a;
      m.share_b += row.share_b;
      ++n;
    }
    m.share_a /= static_cast<double>(n);
    m.share_b /= static_cast<double>(n);
    r.means.push_back(m);
  }
  return r;
}

H3Result experiment_h3(const ExperimentSettings& s, const std::vector<std::string>& psis) {
  std::vector<SimConfig> configs;
  H3Result r;
  for (const auto& psi : psis) {
    for (auto seed : s.seeds) {
      SimConfig c = s.base;
      c.miners = make_miners({1, 2, 3, 4, 5});
      c.psi = parse_rational(psi);
      c.k_bits = 0;
      c.k_auto = false;
      c.seed = seed;
      configs.push_back(c);
      r.runs.push_back(H3Row{psi, seed, 0, 0});
    }
  }
  const auto metrics = run_many(configs);
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    r.runs[i].wasted_fraction = metrics[i].wasted_fraction;
    r.runs[i].gini = metrics[i].gini;
  }
  for (const auto& psi : psis) {
    H3Row m{psi, 0, 0, 0};
    std::size_t n = 0;
    for (const auto& row : r.runs) {
      if (row.psi != psi) continue;
      m.wasted_fraction += row.wasted_fraction;
      m.gini += row.gini;
      ++n;
    }
    m.wasted_fraction /= static_cast<double>(n);
    m.gini /= static_cast<double>(n);
    r.means.push_back(m);
  }
  return r;
}

H4Result experiment_h4(const ExperimentSettings& s, const std::vector<unsigned>& k_values, bool include_small_pool) {
  constexpr std::size_t kMiners = 8;
  std::vector<SimConfig> configs;
  H4Result r;
  std::vector<std::string> pools = {"infinite"};
  if (include_small_pool) pools.push_back("small_pool");
  for (const auto& pool : pools) {
    for (unsigned k : k_values) {
      for (auto seed : s.seeds) {
        SimConfig c = s.base;
        c.miners = make_miners(std::vector<double>(kMiners, 1.0));
        for (auto& m : c.miners) m.bucket_strategy.kind = BucketStrategyKind::random;
        c.psi = 0;
        c.k_bits = k;
        c.k_auto = false;
        c.seed = seed;
        if (pool == "small_pool") {
          // Fewer pending transactions than two per miner; short chains
          // (p = 0.1 per proof) so blocks stay reachable.
          c.mempool.kind = MempoolKind::poisson;
          c.mempool.initial_pending = kMiners;
          c.mempool.arrival_rate = 1.0 / (c.proof_time_a * static_cast<double>(c.mempool.c_max) + c.proof_time_b);
          c.kappa0 = 10 * c.mempool.c_max;
          c.max_blocks = std::min<std::uint64_t>(c.max_blocks == 0 ? 1000 : c.max_blocks, 1000);
        } else {
          c.mempool.kind = MempoolKind::infinite;
        }
        configs.push_back(c);
        r.runs.push_back(H4Row{pool, std::uint64_t{1} << k, seed, 0});
      }
    }
  }
  const auto metrics = run_many(configs);
  for (std::size_t i = 0; i < r.runs.size(); ++i) r.runs[i].wasted_fraction = metrics[i].wasted_fraction;
  for (const auto& pool : pools) {
    for (unsigned k : k_values) {
      H4Row m{pool, std::uint64_t{1} << k, 0, 0};
      std::size_t n = 0;
      for (const auto& row : r.runs) {
        if (row.mempool != pool || row.buckets != m.buckets) continue;
        m.wasted_fraction += row.wasted_fraction;
        ++n;
      }
      m.wasted_fraction /= static_cast<double>(n);
      r.means.push_back(m);
    }
  }
  return r;
}

std::vector<OverlapRow> experiment_overlap(const std::vector<std::uint64_t>& ms, const std::vector<std::uint64_t>& ts,
                                           std::uint64_t trials, std::uint64_t seed) {
  std::vector<OverlapRow> rows;
  std::uint64_t index = 0;
  for (auto m : ms) {
    for (auto t : ts) {
      if (t < 1 || m < 2 * t) continue;
      const auto p = p_overlap(m, t);
      OverlapRow row;
      row.m = m;
      row.t = t;
      row.exact = boost::multiprecision::numerator(p.exact).str() + "/" +
                  boost::multiprecision::denominator(p.exact).str();
      row.analytic = p.value;
      row.montecarlo = overlap_montecarlo(m, t, trials, derive_seed(seed, index++));
      row.abs_diff = std::abs(row.analytic - row.montecarlo);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string seed_cell(std::uint64_t seed) { return seed == 0 ? "mean" : csv_number(seed); }

}  // namespace

CsvTable to_table(const H1Result& r) {
  CsvTable t{{"power_ratio", "seed", "block_reward_ratio", "proof_reward_ratio"}, {}};
  for (const auto* rows : {&r.runs, &r.means}) {
    for (const auto& row : *rows) {
      t.add({csv_number(row.power_ratio), seed_cell(row.seed), csv_number(row.block_reward_ratio),
             csv_number(row.proof_reward_ratio)});
    }
  }
  return t;
}

CsvTable to_table(const H2Result& r) {
  CsvTable t{{"preference", "seed", "block_reward_share_a", "block_reward_share_b"}, {}};
  for (const auto* rows : {&r.runs, &r.means}) {
    for (const auto& row : *rows) {
      t.add({row.preference, seed_cell(row.seed), csv_number(row.share_a), csv_number(row.share_b)});
    }
  }
  return t;
}

CsvTable to_table(const H3Result& r) {
  CsvTable t{{"psi", "seed", "wasted_fraction", "gini"}, {}};
  for (const auto* rows : {&r.runs, &r.means}) {
    for (const auto& row : *rows) {
      t.add({row.psi, seed_cell(row.seed), csv_number(row.wasted_fraction), csv_number(row.gini)});
    }
  }
  return t;
}

CsvTable to_table(const H4Result& r) {
  CsvTable t{{"mempool", "buckets", "seed", "wasted_fraction"}, {}};
  for (const auto* rows : {&r.runs, &r.means}) {
    for (const auto& row : *rows) {
      t.add({row.mempool, csv_number(row.buckets), seed_cell(row.seed), csv_number(row.wasted_fraction)});
    }
  }
  return t;
}

CsvTable to_table(const std::vector<OverlapRow>& rows) {
  CsvTable t{{"m", "t", "exact", "analytic", "montecarlo", "abs_diff"}, {}};
  for (const auto& row : rows) {
    t.add({csv_number(row.m), csv_number(row.t), row.exact, csv_number(row.analytic), csv_number(row.montecarlo),
           csv_number(row.abs_diff)});
  }
  return t;
}

CsvTable metrics_table(const Metrics& m) {
  CsvTable t{{"miner_id", "blocks_won", "block_rewards", "proof_rewards", "useful_work", "wasted_work",
              "proofs_completed"},
             {}};
  MinerMetrics total;
  for (const auto& mm : m.miners) {
    t.add({csv_number(std::uint64_t{mm.miner_id}), csv_number(mm.blocks_won), csv_number(mm.block_rewards),
           csv_number(mm.proof_rewards), csv_number(mm.useful_work), csv_number(mm.wasted_work),
           csv_number(mm.proofs_completed)});
    total.blocks_won += mm.blocks_won;
    total.block_rewards += mm.block_rewards;
    total.proof_rewards += mm.proof_rewards;
    total.useful_work += mm.useful_work;
    total.wasted_work += mm.wasted_work;
    total.proofs_completed += mm.proofs_completed;
  }
  t.add({"TOTAL", csv_number(total.blocks_won), csv_number(total.block_rewards), csv_number(total.proof_rewards),
         csv_number(total.useful_work), csv_number(total.wasted_work), csv_number(total.proofs_completed)});
  return t;
}

}  // namespace pouw::sim
