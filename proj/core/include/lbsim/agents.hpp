#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "lbsim/contour.hpp"
#include "lbsim/env.hpp"

namespace lbsim {

enum class AgentType : std::uint8_t {
  LayerFinder = 0,
  NodeLabeller,
  FetLabeller,
  FetOutput,
  ContactFinder,
  NodeDirector,
  NodePropagator,
};

inline constexpr int kAgentTypeCount = 7;
inline constexpr std::array<AgentType, kAgentTypeCount> kAgentTypes = {
    AgentType::LayerFinder,   AgentType::NodeLabeller,  AgentType::FetLabeller,
    AgentType::FetOutput,     AgentType::ContactFinder, AgentType::NodeDirector,
    AgentType::NodePropagator};

std::string_view agent_type_name(AgentType t);

/// Allowed type changes. Any other change is a programming error.
class TransitionGraph {
 public:
  static bool allowed(AgentType from, AgentType to);
  static std::vector<std::pair<AgentType, AgentType>> edges();
};

/// Fet marks pack the labeller id with a per-labeller channel sequence number
/// so that one labeller touching several channels still marks each uniquely.
inline constexpr FetLabel kFetSeqBase = 1000;

using Population = std::array<int, kAgentTypeCount>;

struct AgentState {
  std::uint32_t id = 0;
  AgentType type = AgentType::LayerFinder;
  std::optional<AgentType> prev_type;
  Point pos;
  Dir heading = Dir::North;  // wall side while tracing
  Layer layer = Layer::Metal1;
  std::optional<Label> current_label;
  std::optional<Crack> trace_start;
  std::uint32_t wait_counter = 0;
  std::uint32_t traced = 0;
  bool completed_labelling = false;
  bool fresh = false;  // set on a type change: the first Pm holds position
  std::mt19937_64 rng;

  // Fet labeller: channel -> sequence number assigned on first contact.
  std::vector<std::pair<int, std::uint32_t>> channel_seq;
  // Fet output / contact finder.
  int region = -1;
  bool claimed = false;
  bool loop_done = false;
  bool finished = false;
  bool yield = false;
  Label gate = 0;
  std::array<Label, 4> side{};  // DIFF label seen across each wall side
  int box_x0 = 0, box_y0 = 0, box_x1 = -1, box_y1 = -1;
  FetLabel fet_id = 0;
  // Node labeller.
  bool dominated = false;

  Crack crack() const { return {pos, heading}; }
};

class TransitionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Deliberately wrong behaviours for negative-control tests.
enum class Fault : std::uint8_t { None, ContactSelfLoop };

struct SimOptions {
  Fault fault = Fault::None;
};

std::uint64_t agent_seed(std::uint64_t seed, std::uint32_t id);

/// N layer finders with ids 1..N, positions uniform over the grid.
std::vector<AgentState> init_population(const LayoutGrid& grid, int n, std::uint64_t seed);

struct CycleContext;

/// The five-subprogram agent characteristic. One shared instance per type.
class Characteristic {
 public:
  virtual ~Characteristic() = default;
  virtual AgentType type() const = 0;
  /// Pr: sense the receptive field.
  virtual void read(CycleContext& ctx) const;
  /// Pu: internal state update.
  virtual void update(CycleContext&) const {}
  /// Pw: write into the receptive field.
  virtual void write(CycleContext&) const {}
  /// Pa: choose the next characteristic, if any.
  virtual std::optional<AgentType> alter(CycleContext&) const { return std::nullopt; }
  /// Pm: produce the next receptive field.
  virtual void move(CycleContext&) const {}
};

const Characteristic& characteristic(AgentType t);

/// Deterministic serial scheduler: each step serves every agent in ascending
/// id order through one full Pr, Pu, Pw, Pa, Pm cycle.
class Simulation {
 public:
  Simulation(std::shared_ptr<const Geometry> geometry, std::vector<AgentState> agents,
             SimOptions options = {});
  Simulation(std::shared_ptr<const Geometry> geometry, int n_agents, std::uint64_t seed,
             SimOptions options = {});

  void step();

  const Environment& env() const { return env_; }
  Environment& env() { return env_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  const SimOptions& options() const { return options_; }

  Population population() const;
  /// transitions()[from][to] counts observed type changes.
  const std::array<std::array<std::uint64_t, kAgentTypeCount>, kAgentTypeCount>&
  transitions() const {
    return transitions_;
  }
  /// Number of node directors ever created on each wire component.
  const std::vector<int>& directors_per_wire() const { return directors_per_wire_; }

  int np_count(Point p) const { return np_occupancy_[env_.grid().index(p)]; }
  void change_type(AgentState& agent, AgentType next);

 private:
  void run_cycle(AgentState& agent);
  void set_position(AgentState& agent, Point p);

  Environment env_;
  std::vector<AgentState> agents_;
  SimOptions options_;
  std::vector<int> np_occupancy_;
  std::array<std::array<std::uint64_t, kAgentTypeCount>, kAgentTypeCount> transitions_{};
  std::vector<int> directors_per_wire_;

  friend struct CycleContext;
};

struct CycleContext {
  Simulation& sim;
  Environment& env;
  AgentState& self;
  ReceptiveField field;

  const Geometry& geo() const { return env.geometry(); }
  const LayoutGrid& grid() const { return env.grid(); }
  void move_to(Point p) { sim.set_position(self, p); }
};

}  // namespace lbsim
