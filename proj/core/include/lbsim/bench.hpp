#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbsim/agents.hpp"

namespace lbsim {

inline constexpr std::uint64_t kDefaultMaxSteps = 50000;

struct RunOptions {
  std::uint64_t max_steps = kDefaultMaxSteps;
  SimOptions sim;
};

struct RunRecord {
  std::string layout;
  int n_agents = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = kDefaultMaxSteps;
  /// First step at which the environment is complete; empty when capped.
  std::optional<std::uint64_t> completion_step;
  /// Row t holds the population after t steps; row 0 is the initial one.
  std::vector<Population> trace;

  bool capped() const { return !completion_step.has_value(); }
};

struct Run {
  RunRecord record;
  Simulation sim;
};

/// Steps until complete or `max_steps`, keeping the simulation for inspection.
Run simulate(std::shared_ptr<const Geometry> geometry, std::string layout_name, int n_agents,
             std::uint64_t seed, const RunOptions& options = {});

RunRecord run_once(std::shared_ptr<const Geometry> geometry, std::string layout_name,
                   int n_agents, std::uint64_t seed, const RunOptions& options = {});

struct SpeedupRow {
  int n_agents = 0;
  double mean = 0.0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  std::vector<std::uint64_t> steps;  // one per seed, seed order
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares on (ln x, ln y).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SpeedupTable {
  std::string layout;
  std::uint64_t seed0 = 0;
  int repeats = 0;
  std::vector<SpeedupRow> rows;
  std::optional<LineFit> fit;  // empty when any run hit the cap
  std::vector<std::string> diagnostics;
};

/// Seeds seed0 .. seed0 + repeats - 1 for every N. `threads` = 0 picks the
/// hardware concurrency; results do not depend on it.
SpeedupTable speedup_experiment(std::shared_ptr<const Geometry> geometry,
                                std::string layout_name, const std::vector<int>& ns,
                                int repeats, std::uint64_t seed0,
                                const RunOptions& options = {}, unsigned threads = 0);

std::string emit_trace_csv(const RunRecord& record);
std::string emit_speedup_csv(const SpeedupTable& table);

/// Parses the speedup CSV back into rows (steps are not stored in CSV).
std::vector<SpeedupRow> parse_speedup_csv(std::string_view text);

}  // namespace lbsim
