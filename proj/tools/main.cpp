#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbsim/bench.hpp"
#include "lbsim/layout.hpp"
#include "lbsim/netlist.hpp"
#include "lbsim/oracle.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kCapExceeded = 2;

struct Config {
  std::string layout;
  int agents = 175;
  std::uint64_t seed = 1;
  std::uint64_t max_steps = lbsim::kDefaultMaxSteps;
  std::vector<int> agent_counts{10, 25, 50, 100, 175, 250};
  int repeats = 20;
  std::string out;
  unsigned threads = 0;
  bool inject_fault = false;
};

struct Loaded {
  std::string name;
  std::shared_ptr<const lbsim::Geometry> geometry;
};

Loaded load(const std::string& path) {
  lbsim::LayoutGrid grid = lbsim::load_layout_file(path);
  lbsim::check_layout_rules(grid);
  return {std::filesystem::path(path).stem().string(),
          std::make_shared<const lbsim::Geometry>(grid)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

lbsim::RunOptions run_options(const Config& c) {
  lbsim::RunOptions o;
  o.max_steps = c.max_steps;
  if (c.inject_fault) o.sim.fault = lbsim::Fault::ContactSelfLoop;
  return o;
}

int cmd_extract(const Config& c) {
  const Loaded in = load(c.layout);
  lbsim::Run run = lbsim::simulate(in.geometry, in.name, c.agents, c.seed, run_options(c));
  const std::string net = lbsim::format_netlist_file(run.sim.env().emitted());
  if (c.out.empty()) {
    std::cout << net;
  } else {
    write_file(c.out + ".net", net);
    write_file(c.out + ".trace.csv", lbsim::emit_trace_csv(run.record));
  }
  for (const auto& d : run.sim.env().diagnostics()) std::cerr << "diagnostic: " << d << '\n';
  if (run.record.capped()) {
    std::cerr << "error: not complete after " << c.max_steps << " steps\n";
    return kCapExceeded;
  }
  std::cerr << in.name << ": complete at step " << *run.record.completion_step << '\n';
  return kOk;
}

int cmd_oracle(const Config& c) {
  const Loaded in = load(c.layout);
  const std::string text = lbsim::format_canonical(lbsim::oracle_extract(in.geometry->grid()));
  if (c.out.empty()) std::cout << text;
  else write_file(c.out, text);
  return kOk;
}

int cmd_compare(const Config& c) {
  const Loaded in = load(c.layout);
  lbsim::Run run = lbsim::simulate(in.geometry, in.name, c.agents, c.seed, run_options(c));
  for (const auto& d : run.sim.env().diagnostics()) std::cerr << "diagnostic: " << d << '\n';
  if (run.record.capped()) {
    std::cerr << "error: not complete after " << c.max_steps << " steps\n";
    return kCapExceeded;
  }
  const auto cmp = lbsim::netlists_equal(lbsim::canonicalize_run(run.sim.env()),
                                         lbsim::oracle_extract(in.geometry->grid()));
  if (!cmp.equal) {
    std::cout << "netlists differ (agents vs oracle):\n" << cmp.report;
    return kInputError;
  }
  std::cout << "netlists equal, complete at step " << *run.record.completion_step << '\n';
  return kOk;
}

int cmd_bench(const Config& c) {
  const Loaded in = load(c.layout);
  const lbsim::SpeedupTable table = lbsim::speedup_experiment(
      in.geometry, in.name, c.agent_counts, c.repeats, c.seed, run_options(c), c.threads);
  const std::string csv = lbsim::emit_speedup_csv(table);
  if (c.out.empty()) std::cout << csv;
  else write_file(c.out, csv);
  for (const auto& d : table.diagnostics) std::cerr << "diagnostic: " << d << '\n';
  if (!table.fit) return kCapExceeded;
  std::printf("slope %.6f intercept %.6f\n", table.fit->slope, table.fit->intercept);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based layout extraction simulator"};
  app.require_subcommand(1);
  Config c;

  auto add_layout = [&](CLI::App* sub) {
    sub->add_option("--layout", c.layout, "Layout file (.lay)")->required();
  };
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--agents", c.agents, "Number of agents")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    sub->add_option("--max-steps", c.max_steps, "Step cap")->capture_default_str();
    sub->add_flag("--inject-fault", c.inject_fault,
                  "Test hook: contact finders report a wire joined to itself");
  };

  auto* extract = app.add_subcommand("extract", "Run the agents and write the netlist");
  add_layout(extract);
  add_run(extract);
  extract->add_option("--out", c.out,
                      "Output prefix: writes <out>.net and <out>.trace.csv (stdout if absent)");

  auto* oracle = app.add_subcommand("oracle", "Write the reference canonical netlist");
  add_layout(oracle);
  oracle->add_option("--out", c.out, "Output file (stdout if absent)");

  auto* compare = app.add_subcommand("compare", "Run the agents and check against the oracle");
  add_layout(compare);
  add_run(compare);

  auto* bench = app.add_subcommand("bench", "Completion time over agent counts and seeds");
  add_layout(bench);
  add_run(bench);
  bench->add_option("--agent-counts", c.agent_counts, "Agent counts")
      ->delimiter(',')->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--repeats", c.repeats, "Seeds per agent count")
      ->capture_default_str()->check(CLI::Range(2, 1000000));
  bench->add_option("--threads", c.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  bench->add_option("--out", c.out, "Speedup CSV file (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*extract) return cmd_extract(c);
    if (*oracle) return cmd_oracle(c);
    if (*compare) return cmd_compare(c);
    return cmd_bench(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
