#include "lbsim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace lbsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
T parse_field(std::string_view s, int line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("speedup csv line " + std::to_string(line) + ": bad field '" +
                             std::string(s) + "'");
  return v;
}

}  // namespace

Run simulate(std::shared_ptr<const Geometry> geometry, std::string layout_name, int n_agents,
             std::uint64_t seed, const RunOptions& options) {
  Run run{RunRecord{}, Simulation(geometry, n_agents, seed, options.sim)};
  RunRecord& r = run.record;
  r.layout = std::move(layout_name);
  r.n_agents = n_agents;
  r.seed = seed;
  r.max_steps = options.max_steps;
  r.trace.push_back(run.sim.population());
  while (!run.sim.env().is_complete()) {
    if (run.sim.env().step() >= options.max_steps) return run;
    run.sim.step();
    r.trace.push_back(run.sim.population());
  }
  r.completion_step = run.sim.env().step();
  return run;
}

RunRecord run_once(std::shared_ptr<const Geometry> geometry, std::string layout_name,
                   int n_agents, std::uint64_t seed, const RunOptions& options) {
  return simulate(std::move(geometry), std::move(layout_name), n_agents, seed, options).record;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("log-log fit needs at least two paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw std::invalid_argument("log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("log-log fit needs two distinct x values");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

SpeedupTable speedup_experiment(std::shared_ptr<const Geometry> geometry,
                                std::string layout_name, const std::vector<int>& ns,
                                int repeats, std::uint64_t seed0, const RunOptions& options,
                                unsigned threads) {
  if (repeats < 2) throw std::invalid_argument("speedup experiment needs at least 2 repeats");
  if (ns.empty()) throw std::invalid_argument("speedup experiment needs agent counts");
  for (int n : ns)
    if (n < 1) throw std::invalid_argument("agent counts must be positive");

  const std::size_t jobs = ns.size() * static_cast<std::size_t>(repeats);
  std::vector<std::optional<std::uint64_t>> results(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const int n = ns[j / repeats];
      const std::uint64_t seed = seed0 + j % repeats;
      results[j] = run_once(geometry, layout_name, n, seed, options).completion_step;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SpeedupTable table;
  table.layout = std::move(layout_name);
  table.seed0 = seed0;
  table.repeats = repeats;
  bool all_done = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    SpeedupRow row;
    row.n_agents = ns[i];
    for (int r = 0; r < repeats; ++r) {
      const auto& res = results[i * repeats + r];
      if (!res) {
        all_done = false;
        table.diagnostics.push_back("N=" + std::to_string(ns[i]) + " seed=" +
                                    std::to_string(seed0 + r) + " exceeded " +
                                    std::to_string(options.max_steps) + " steps");
        continue;
      }
      row.steps.push_back(*res);
    }
    if (!row.steps.empty()) {
      const auto [lo, hi] = std::minmax_element(row.steps.begin(), row.steps.end());
      row.min = *lo;
      row.max = *hi;
      row.mean = std::accumulate(row.steps.begin(), row.steps.end(), 0.0) /
                 static_cast<double>(row.steps.size());
    }
    table.rows.push_back(std::move(row));
  }
  if (all_done) {
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
      x.push_back(row.n_agents);
      y.push_back(row.mean);
    }
    try {
      table.fit = fit_loglog(x, y);
    } catch (const std::invalid_argument& e) {
      table.diagnostics.push_back(std::string("no fit: ") + e.what());
    }
  } else {
    table.diagnostics.push_back("no fit: some runs exceeded the step cap");
  }
  return table;
}

std::string emit_trace_csv(const RunRecord& record) {
  std::string out =
      "step,layer_finder,node_labeller,fet_labeller,fet_output,contact_finder,"
      "node_director,node_propagator\n";
  for (std::size_t t = 0; t < record.trace.size(); ++t) {
    out += std::to_string(t);
    for (int count : record.trace[t]) {
      out += ',';
      out += std::to_string(count);
    }
    out += '\n';
  }
  return out;
}

std::string emit_speedup_csv(const SpeedupTable& table) {
  std::string out = "n_agents,mean,min,max\n";
  for (const auto& row : table.rows)
    out += std::to_string(row.n_agents) + "," + format_double(row.mean) + "," +
           std::to_string(row.min) + "," + std::to_string(row.max) + "\n";
  return out;
}

std::vector<SpeedupRow> parse_speedup_csv(std::string_view text) {
  std::vector<SpeedupRow> rows;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "n_agents,mean,min,max") throw std::runtime_error("speedup csv: bad header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    for (std::size_t s = 0;;) {
      const std::size_t c = line.find(',', s);
      f.push_back(line.substr(s, c == std::string_view::npos ? line.npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    if (f.size() != 4)
      throw std::runtime_error("speedup csv line " + std::to_string(line_no) +
                               ": expected 4 fields");
    SpeedupRow row;
    row.n_agents = parse_field<int>(f[0], line_no);
    row.mean = parse_field<double>(f[1], line_no);
    row.min = parse_field<std::uint64_t>(f[2], line_no);
    row.max = parse_field<std::uint64_t>(f[3], line_no);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lbsim
