#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "lbsim/bench.hpp"
#include "lbsim/netlist.hpp"
#include "lbsim/oracle.hpp"

namespace {

using namespace lbsim;

std::shared_ptr<const Geometry> load(const std::string& name) {
  std::ifstream in(std::string(LBSIM_FIXTURE_DIR) + "/" + name + ".lay");
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<const Geometry>(parse_layout(ss.str()));
}

void BM_AgentRun(benchmark::State& state, const char* fixture) {
  const auto geo = load(fixture);
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  std::uint64_t steps = 0;
  for (auto _ : state) {
    const RunRecord r = run_once(geo, fixture, n, seed++);
    steps += r.completion_step.value_or(r.max_steps);
    benchmark::DoNotOptimize(steps);
  }
  state.counters["steps/run"] =
      benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kAvgIterations);
}
BENCHMARK_CAPTURE(BM_AgentRun, cross, "cross")->Arg(25)->Arg(175)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AgentRun, nand4, "nand4")->Arg(50)->Arg(175)->Unit(benchmark::kMillisecond);

void BM_OracleExtract(benchmark::State& state) {
  const auto geo = load("nand4");
  for (auto _ : state) benchmark::DoNotOptimize(oracle_extract(geo->grid()));
}
BENCHMARK(BM_OracleExtract);

void BM_Geometry(benchmark::State& state) {
  const auto geo = load("nand4");
  for (auto _ : state) benchmark::DoNotOptimize(Geometry(geo->grid()));
}
BENCHMARK(BM_Geometry);

std::vector<NetlistStatement> statements(int count) {
  std::mt19937_64 rng(5);
  std::vector<NetlistStatement> out;
  for (int i = 0; i < count; ++i) {
    if (i % 4 == 0)
      out.push_back(ContactStatement{rng() % 1000, rng() % 100000, rng() % 100000, rng() % 5000});
    else
      out.push_back(FetStatement{i % 2 ? Polarity::NFET : Polarity::PFET, rng() % 100000,
                                 rng() % 100000, rng() % 100000, rng() % 100000, 1 + rng() % 9,
                                 1 + rng() % 9, rng() % 5000});
  }
  return out;
}

void BM_FormatNetlist(benchmark::State& state) {
  const auto s = statements(1000);
  for (auto _ : state) benchmark::DoNotOptimize(format_netlist_file(s));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_FormatNetlist);

void BM_ParseNetlist(benchmark::State& state) {
  const std::string text = format_netlist_file(statements(1000));
  for (auto _ : state) benchmark::DoNotOptimize(parse_netlist_file(text));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ParseNetlist);

}  // namespace

BENCHMARK_MAIN();
