#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pouw/csv.hpp"
#include "pouw/sim.hpp"

namespace pouw::sim {

/// Runs independent configurations concurrently (OpenMP, dynamic schedule).
/// Results are stored by input position, so the output does not depend on
/// thread count or completion order.
std::vector<Metrics> run_many(const std::vector<SimConfig>& configs);
/// Serial reference for run_many.
std::vector<Metrics> run_many_serial(const std::vector<SimConfig>& configs);

/// Shared knobs of the hypothesis experiments. `base` supplies everything
/// an experiment does not set itself (cost model, rewards, kappa, ...).
struct ExperimentSettings {
  SimConfig base = default_experiment_config();
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  static SimConfig default_experiment_config();
};

/// Consecutive seeds first, first + 1, ...
std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

struct H1Row {
  double power_ratio = 0;
  std::uint64_t seed = 0;  // 0 on mean rows
  double block_reward_ratio = 0;
  double proof_reward_ratio = 0;
};
struct H1Result {
  std::vector<H1Row> runs;
  std::vector<H1Row> means;  // one per ratio, averaged over seeds
};
/// Two miners with powers {1, f}, one bucket, psi = 0.
H1Result experiment_h1(const ExperimentSettings& settings, const std::vector<double>& ratios = {1, 2, 3, 4});

struct H2Row {
  std::string preference;  // "<miner a>/<miner b>"
  std::uint64_t seed = 0;
  double share_a = 0;  // block-reward shares
  double share_b = 0;
};
struct H2Result {
  std::vector<H2Row> runs;
  std::vector<H2Row> means;
};
/// Two equal miners; pairs: uniform/uniform, prefer_small/prefer_large,
/// fixed(c_min)/fixed(2 c_min). Complexities span [kappa/1000, kappa/100].
H2Result experiment_h2(const ExperimentSettings& settings);

struct H3Row {
  std::string psi;
  std::uint64_t seed = 0;
  double wasted_fraction = 0;
  double gini = 0;
};
struct H3Result {
  std::vector<H3Row> runs;
  std::vector<H3Row> means;
};
/// Five miners with powers 1..5, one bucket.
H3Result experiment_h3(const ExperimentSettings& settings,
                       const std::vector<std::string>& psis = {"0", "0.25", "0.5", "0.75", "1"});

struct H4Row {
  std::string mempool;  // "infinite" or "small_pool"
  std::uint64_t buckets = 1;
  std::uint64_t seed = 0;
  double wasted_fraction = 0;
};
struct H4Result {
  std::vector<H4Row> runs;
  std::vector<H4Row> means;
};
/// Eight equal miners choosing buckets at random. The small_pool rows
/// repeat the sweep with a Poisson mempool holding fewer than two
/// transactions per miner; they are exploratory.
H4Result experiment_h4(const ExperimentSettings& settings, const std::vector<unsigned>& k_values = {0, 1, 2, 3},
                       bool include_small_pool = true);

struct OverlapRow {
  std::uint64_t m = 0;
  std::uint64_t t = 0;
  std::string exact;  // "num/den"
  double analytic = 0;
  double montecarlo = 0;
  double abs_diff = 0;
};
/// Analytic vs sampled overlap over the (m, t) grid; pairs with m < 2t
/// are skipped.
std::vector<OverlapRow> experiment_overlap(const std::vector<std::uint64_t>& ms,
                                           const std::vector<std::uint64_t>& ts, std::uint64_t trials,
                                           std::uint64_t seed);

CsvTable to_table(const H1Result& r);
CsvTable to_table(const H2Result& r);
CsvTable to_table(const H3Result& r);
CsvTable to_table(const H4Result& r);
CsvTable to_table(const std::vector<OverlapRow>& rows);
/// Per-miner metrics plus a TOTAL row.
CsvTable metrics_table(const Metrics& m);

}  // namespace pouw::sim
