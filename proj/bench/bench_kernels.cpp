// Serial references against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "pouw/circuit.hpp"
#include "pouw/experiments.hpp"
#include "pouw/r1cs.hpp"
#include "pouw/stats.hpp"

using namespace pouw;

namespace {

struct Instance {
  R1CS r1cs;
  Witness witness;
};

Instance chain_instance(std::size_t n) {
  const PrimeField f;
  const Circuit c = parse_circuit(synthetic_chain_source(n));
  R1CS r = compile(c, f);
  const std::vector<std::uint64_t> priv{2, 3};
  const std::vector<std::uint64_t> pub{synthetic_chain_result(f, priv, n)};
  Witness w = generate_witness(c, r, pub, priv);
  return {std::move(r), std::move(w)};
}

template <bool (*Check)(const R1CS&, const Witness&)>
void BM_check(benchmark::State& state) {
  const Instance inst = chain_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Check(inst.r1cs, inst.witness));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <double (*Overlap)(std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)>
void BM_overlap(benchmark::State& state) {
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Overlap(1000, 50, trials, 2024));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<sim::SimConfig> sim_batch(std::size_t n) {
  std::vector<sim::SimConfig> configs;
  for (std::size_t i = 0; i < n; ++i) {
    sim::SimConfig c = sim::ExperimentSettings::default_experiment_config();
    c.miners = sim::make_miners({1, 2, 3});
    c.max_blocks = 1000;
    c.seed = i + 1;
    configs.push_back(c);
  }
  return configs;
}

template <std::vector<sim::Metrics> (*Run)(const std::vector<sim::SimConfig>&)>
void BM_run_many(benchmark::State& state) {
  const auto configs = sim_batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Run(configs));
}

}  // namespace

BENCHMARK(BM_check<check_satisfaction_serial>)->Name("check_satisfaction/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_check<check_satisfaction>)->Name("check_satisfaction/parallel")->Arg(10000)->Arg(100000);
BENCHMARK(BM_overlap<overlap_montecarlo_serial>)->Name("overlap_montecarlo/serial")->Arg(100000);
BENCHMARK(BM_overlap<overlap_montecarlo>)->Name("overlap_montecarlo/parallel")->Arg(100000);
BENCHMARK(BM_run_many<sim::run_many_serial>)->Name("run_many/serial")->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_run_many<sim::run_many>)->Name("run_many/parallel")->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
