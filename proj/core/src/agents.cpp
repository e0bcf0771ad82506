#include "lbsim/agents.hpp"

#include <algorithm>
#include <string>

namespace lbsim {

namespace {

using AT = AgentType;

constexpr std::pair<AT, AT> kEdges[] = {
    {AT::LayerFinder, AT::NodeLabeller},   {AT::LayerFinder, AT::NodePropagator},
    {AT::NodeLabeller, AT::LayerFinder},   {AT::NodeLabeller, AT::NodeDirector},
    {AT::NodeLabeller, AT::FetLabeller},   {AT::FetLabeller, AT::LayerFinder},
    {AT::FetLabeller, AT::NodePropagator}, {AT::FetOutput, AT::NodePropagator},
    {AT::ContactFinder, AT::NodePropagator}, {AT::NodeDirector, AT::NodePropagator},
    {AT::NodePropagator, AT::ContactFinder}, {AT::NodePropagator, AT::FetOutput},
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool in_window(Point p, Point center) {
  return std::abs(p.x - center.x) <= 1 && std::abs(p.y - center.y) <= 1;
}

auto wire_member(const LayoutGrid& g, Layer l) {
  return [&g, l](Point p) { return g.member(p, l); };
}

auto channel_member(const Geometry& geo, int region) {
  return [&geo, region](Point p) {
    return geo.grid().in_bounds(p) && geo.channel_at(p) == region;
  };
}

// Conducting layer paired with METAL1 under a contact cell.
std::optional<Layer> contact_partner(const LayoutGrid& g, Point p) {
  if (!g.has(p, Layer::Metal1) || g.channel(p)) return std::nullopt;
  std::optional<Layer> other;
  for (Layer l : {Layer::Metal2, Layer::Poly, Layer::Diff}) {
    if (!g.member(p, l)) continue;
    if (other) return std::nullopt;
    other = l;
  }
  return other;
}

class LayerFinderCh final : public Characteristic {
 public:
  AgentType type() const override { return AT::LayerFinder; }

  std::optional<AgentType> alter(CycleContext& ctx) const override {
    const Point c = ctx.self.pos;
    bool np_near = false;
    bool director_near = false;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const CellState* s = ctx.field.at(dx, dy);
        if (s == nullptr) continue;
        director_near = director_near || s->director_mark != 0;
        np_near = np_near || ctx.sim.np_count({c.x + dx, c.y + dy}) > 0;
      }
    if (np_near && director_near) return AT::NodePropagator;

    const LayoutGrid& g = ctx.grid();
    const CellState& here = *ctx.field.at(0, 0);
    std::optional<Layer> unlabelled;
    std::optional<Layer> unsealed;
    for (Layer l : kConductingLayers) {
      if (!g.member(c, l) || !ctx.geo().boundary(c, l)) continue;
      const Label v = here.label_on(l);
      if (v == 0 && !unlabelled) unlabelled = l;
      if (v != 0 && !ctx.env.sealed(v) && !unsealed) unsealed = l;
    }
    const std::optional<Layer> pick = unlabelled ? unlabelled : unsealed;
    if (!pick) return std::nullopt;
    AgentState& a = ctx.self;
    a.layer = *pick;
    const Crack start = *first_crack(c, wire_member(g, *pick));
    a.heading = start.wall;
    a.trace_start = start;
    a.current_label.reset();
    a.dominated = false;
    return AT::NodeLabeller;
  }

  void move(CycleContext& ctx) const override {
    const LayoutGrid& g = ctx.grid();
    ctx.self.fresh = false;
    ctx.move_to(g.point((g.index(ctx.self.pos) + 1) % g.cell_count()));
  }
};

// Shared loop walking for the three wire tracers.
class TracerCh : public Characteristic {
 public:
  void move(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    if (a.fresh) {
      a.fresh = false;
      return;
    }
    const Crack n = next_crack(a.crack(), wire_member(ctx.grid(), a.layer));
    a.heading = n.wall;
    ++a.traced;
    ctx.move_to(n.cell);
  }

 protected:
  static bool at_loop_end(const CycleContext& ctx) {
    const AgentState& a = ctx.self;
    return next_crack(a.crack(), wire_member(ctx.grid(), a.layer)) == *a.trace_start;
  }
};

class NodeLabellerCh final : public TracerCh {
 public:
  AgentType type() const override { return AT::NodeLabeller; }

  void write(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    const Label existing = ctx.field.at(0, 0)->label_on(a.layer);
    // A labeller owns its id only if its first cell was still unlabelled.
    if (!a.current_label) a.current_label = existing != 0 ? existing : a.id;
    const Label w = std::max(existing, *a.current_label);
    ctx.env.write_label(a.pos, a.layer, w);
    ctx.env.set_boundary_mark(a.pos, a.layer);
    a.current_label = w;
    a.dominated = existing == w && w != a.id;
  }

  std::optional<AgentType> alter(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    if (a.dominated) return a.completed_labelling ? AT::NodePropagator : AT::LayerFinder;
    if (!at_loop_end(ctx)) return std::nullopt;
    if (ctx.env.cell(a.trace_start->cell).label_on(a.layer) != a.id) return std::nullopt;
    a.completed_labelling = true;
    a.trace_start = a.crack();
    return a.layer == Layer::Diff ? AT::FetLabeller : AT::NodeDirector;
  }
};

class NodeDirectorCh final : public TracerCh {
 public:
  AgentType type() const override { return AT::NodeDirector; }

  void write(CycleContext& ctx) const override {
    ctx.env.set_director_mark(ctx.self.pos, ctx.self.layer);
  }

  std::optional<AgentType> alter(CycleContext& ctx) const override {
    if (!at_loop_end(ctx)) return std::nullopt;
    ctx.env.seal_label(*ctx.self.current_label);
    return AT::NodePropagator;
  }
};

class FetLabellerCh final : public TracerCh {
 public:
  AgentType type() const override { return AT::FetLabeller; }

  void write(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    ctx.env.set_director_mark(a.pos, Layer::Diff);
    const Point o = step(a.pos, a.heading);
    if (!ctx.grid().in_bounds(o) || !ctx.grid().channel(o)) return;
    const int ch = ctx.geo().channel_at(o);
    auto it = std::find_if(a.channel_seq.begin(), a.channel_seq.end(),
                           [ch](const auto& e) { return e.first == ch; });
    if (it == a.channel_seq.end()) {
      const auto seq = static_cast<std::uint32_t>(a.channel_seq.size() + 1);
      if (seq >= kFetSeqBase) throw EnvironmentError("too many channels on one diffusion");
      it = a.channel_seq.insert(a.channel_seq.end(), {ch, seq});
    }
    ctx.env.write_fet_label(o, FetLabel{a.id} * kFetSeqBase + it->second);
  }

  // A dominated fet labeller keeps tracing: it is the only director of its wire.
  std::optional<AgentType> alter(CycleContext& ctx) const override {
    if (!at_loop_end(ctx)) return std::nullopt;
    ctx.env.seal_label(*ctx.self.current_label);
    return ctx.self.completed_labelling ? AT::NodePropagator : AT::LayerFinder;
  }
};

class FetOutputCh final : public Characteristic {
 public:
  AgentType type() const override { return AT::FetOutput; }

  void update(CycleContext& ctx) const override {
    if (ctx.self.claimed && !ctx.self.fresh) ++ctx.self.wait_counter;
  }

  void write(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    if (a.fresh) return;
    const Geometry& geo = ctx.geo();
    const ChannelRegion& region = geo.channels()[a.region];
    if (!a.claimed) {
      const CellState& here = ctx.env.cell(a.pos);
      if (here.fet_claimed || here.fet_output_done) {
        a.yield = true;
        return;
      }
      for (Point p : region.cells) ctx.env.set_fet_claimed(p);
      a.claimed = true;
    }
    gather(ctx);
    if (!ready(a)) return;

    FetStatement s;
    s.polarity = region.polarity;
    s.id = a.fet_id;
    const bool horizontal = a.side[int(Dir::East)] != 0;
    const Label s0 = horizontal ? a.side[int(Dir::West)] : a.side[int(Dir::North)];
    const Label s1 = horizontal ? a.side[int(Dir::East)] : a.side[int(Dir::South)];
    s.source = std::min(s0, s1);
    s.drain = std::max(s0, s1);
    s.gate = a.gate;
    const int dx = a.box_x1 - a.box_x0 + 1;
    const int dy = a.box_y1 - a.box_y0 + 1;
    s.length = static_cast<std::uint64_t>(horizontal ? dx : dy);
    s.width = static_cast<std::uint64_t>(horizontal ? dy : dx);
    ctx.env.emit_fet(s, a.region);
    for (Point p : region.cells) ctx.env.set_fet_output_done(p);
    a.finished = true;
  }

  std::optional<AgentType> alter(CycleContext& ctx) const override {
    if (ctx.self.yield || ctx.self.finished) return AT::NodePropagator;
    return std::nullopt;
  }

  void move(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    if (a.fresh) {
      a.fresh = false;
      a.heading = a.trace_start->wall;
      ctx.move_to(a.trace_start->cell);
      return;
    }
    const Crack n = next_crack(a.crack(), channel_member(ctx.geo(), a.region));
    a.heading = n.wall;
    ++a.traced;
    if (n == *a.trace_start) a.loop_done = true;
    ctx.move_to(n.cell);
  }

 private:
  static void gather(CycleContext& ctx) {
    AgentState& a = ctx.self;
    const Point c = a.pos;
    if (a.box_x1 < a.box_x0) {
      a.box_x0 = a.box_x1 = c.x;
      a.box_y0 = a.box_y1 = c.y;
    }
    a.box_x0 = std::min(a.box_x0, c.x);
    a.box_x1 = std::max(a.box_x1, c.x);
    a.box_y0 = std::min(a.box_y0, c.y);
    a.box_y1 = std::max(a.box_y1, c.y);
    const CellState& here = ctx.env.cell(c);
    a.fet_id = std::max(a.fet_id, here.fet_label);
    if (ctx.env.stable(c, Layer::Poly)) a.gate = here.label_on(Layer::Poly);
    const Point o = step(c, a.heading);
    if (ctx.grid().member(o, Layer::Diff) && ctx.env.stable(o, Layer::Diff))
      a.side[int(a.heading)] = ctx.env.cell(o).label_on(Layer::Diff);
  }

  static bool ready(const AgentState& a) {
    if (!a.loop_done || a.gate == 0 || a.fet_id == 0) return false;
    const bool ew = a.side[int(Dir::East)] != 0 && a.side[int(Dir::West)] != 0;
    const bool ns = a.side[int(Dir::North)] != 0 && a.side[int(Dir::South)] != 0;
    return ew != ns;
  }
};

class ContactFinderCh final : public Characteristic {
 public:
  AgentType type() const override { return AT::ContactFinder; }

  void update(CycleContext& ctx) const override {
    if (ctx.self.claimed) ++ctx.self.wait_counter;
  }

  void write(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    const Geometry& geo = ctx.geo();
    if (!a.claimed) {
      if (ctx.field.at(0, 0)->contact_captured) {
        a.yield = true;
        return;
      }
      a.region = geo.contact_at(a.pos);
      for (Point p : geo.contacts()[a.region].cells) ctx.env.set_contact_captured(p);
      a.claimed = true;
      a.wait_counter = 0;
    }
    const std::optional<Layer> other = contact_partner(ctx.grid(), a.pos);
    if (!other) {
      ctx.env.add_diagnostic("contact " + std::to_string(a.region) + " at (" +
                             std::to_string(a.pos.x) + "," + std::to_string(a.pos.y) +
                             ") does not join METAL1 to exactly one other wire");
      a.yield = true;
      return;
    }
    if (!ctx.env.stable(a.pos, Layer::Metal1) || !ctx.env.stable(a.pos, *other)) return;
    ContactStatement s;
    s.id = static_cast<std::uint64_t>(a.region);
    s.node_a = ctx.field.at(0, 0)->label_on(Layer::Metal1);
    s.node_b = ctx.sim.options().fault == Fault::ContactSelfLoop
                   ? s.node_a
                   : ctx.field.at(0, 0)->label_on(*other);
    ctx.env.emit_contact(s);
    a.finished = true;
  }

  std::optional<AgentType> alter(CycleContext& ctx) const override {
    if (ctx.self.yield || ctx.self.finished) return AT::NodePropagator;
    return std::nullopt;
  }

  void move(CycleContext& ctx) const override { ctx.self.fresh = false; }
};

class NodePropagatorCh final : public Characteristic {
 public:
  AgentType type() const override { return AT::NodePropagator; }

  // Fills unlabelled interior cells from stable 4-neighbours, to a fixed point
  // within the window.
  void write(CycleContext& ctx) const override {
    const Point c = ctx.self.pos;
    const LayoutGrid& g = ctx.grid();
    for (bool changed = true; changed;) {
      changed = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Point q{c.x + dx, c.y + dy};
          if (!g.in_bounds(q)) continue;
          for (Layer l : kConductingLayers) {
            if (!g.member(q, l) || ctx.env.cell(q).label_on(l) != 0 ||
                ctx.geo().boundary(q, l))
              continue;
            for (Dir d : kDirs) {
              const Point r = step(q, d);
              if (!in_window(r, c) || !g.member(r, l) || !ctx.env.stable(r, l)) continue;
              ctx.env.write_label(q, l, ctx.env.cell(r).label_on(l));
              changed = true;
              break;
            }
          }
        }
    }
  }

  std::optional<AgentType> alter(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    const Geometry& geo = ctx.geo();
    const Point c = a.pos;
    const CellState& here = *ctx.field.at(0, 0);
    if (geo.contact_at(c) >= 0 && !here.contact_captured) {
      a.claimed = a.yield = a.finished = false;
      a.region = -1;
      return AT::ContactFinder;
    }
    // A channel boundary crack at or beside the agent.
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx != 0 && dy != 0) continue;
        const Point q{c.x + dx, c.y + dy};
        if (!ctx.grid().in_bounds(q)) continue;
        const int ch = geo.channel_at(q);
        if (ch < 0) continue;
        const CellState& s = ctx.env.cell(q);
        if (s.fet_label == 0 || s.fet_claimed || s.fet_output_done) continue;
        const auto member = channel_member(geo, ch);
        const auto start = first_crack(q, member);
        if (!start) continue;
        a.region = ch;
        a.trace_start = *start;
        a.claimed = a.yield = a.finished = a.loop_done = false;
        a.gate = 0;
        a.side = {};
        a.box_x0 = 0;
        a.box_x1 = -1;
        a.fet_id = 0;
        a.wait_counter = 0;
        return AT::FetOutput;
      }
    return std::nullopt;
  }

  void move(CycleContext& ctx) const override {
    AgentState& a = ctx.self;
    a.fresh = false;
    const Point c = a.pos;
    const LayoutGrid& g = ctx.grid();
    const Geometry& geo = ctx.geo();
    std::vector<Point> targets;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Point q{c.x + dx, c.y + dy};
        if (!g.in_bounds(q)) continue;
        for (Layer l : kConductingLayers) {
          if (!g.member(q, l) || ctx.env.cell(q).label_on(l) != 0 || geo.boundary(q, l))
            continue;
          if (has_stable_in_window(ctx, geo.component_at(q, l), l)) {
            targets.push_back(q);
            break;
          }
        }
      }
    if (!targets.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, targets.size() - 1);
      const Point t = targets[pick(a.rng)];
      int sx = (t.x > c.x) - (t.x < c.x);
      int sy = (t.y > c.y) - (t.y < c.y);
      if (sx != 0 && sy != 0) {
        if (a.rng() & 1u) sx = 0;
        else sy = 0;
      }
      if (sx != 0 || sy != 0) {
        ctx.move_to({c.x + sx, c.y + sy});
        return;
      }
    }
    std::array<Point, 4> options;
    std::size_t n = 0;
    for (Dir d : kDirs) {
      const Point q = step(c, d);
      if (g.in_bounds(q)) options[n++] = q;
    }
    if (n == 0) return;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    ctx.move_to(options[pick(a.rng)]);
  }

 private:
  static bool has_stable_in_window(const CycleContext& ctx, int component, Layer l) {
    const Point c = ctx.self.pos;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Point r{c.x + dx, c.y + dy};
        if (!ctx.grid().in_bounds(r) || ctx.geo().component_at(r, l) != component) continue;
        if (ctx.env.stable(r, l)) return true;
      }
    return false;
  }
};

}  // namespace

std::string_view agent_type_name(AgentType t) {
  switch (t) {
    case AT::LayerFinder: return "LF";
    case AT::NodeLabeller: return "NL";
    case AT::FetLabeller: return "FL";
    case AT::FetOutput: return "FO";
    case AT::ContactFinder: return "CF";
    case AT::NodeDirector: return "ND";
    case AT::NodePropagator: return "NP";
  }
  return "?";
}

bool TransitionGraph::allowed(AgentType from, AgentType to) {
  return std::any_of(std::begin(kEdges), std::end(kEdges),
                     [&](const auto& e) { return e.first == from && e.second == to; });
}

std::vector<std::pair<AgentType, AgentType>> TransitionGraph::edges() {
  return {std::begin(kEdges), std::end(kEdges)};
}

std::uint64_t agent_seed(std::uint64_t seed, std::uint32_t id) {
  return splitmix64(splitmix64(seed) ^ id);
}

std::vector<AgentState> init_population(const LayoutGrid& grid, int n, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("agent count must be positive");
  std::vector<AgentState> agents(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    AgentState& a = agents[i];
    a.id = static_cast<std::uint32_t>(i + 1);
    a.rng.seed(agent_seed(seed, a.id));
    std::uniform_int_distribution<int> cell(0, grid.cell_count() - 1);
    a.pos = grid.point(cell(a.rng));
  }
  return agents;
}

void Characteristic::read(CycleContext& ctx) const {
  ctx.field = ctx.env.read_receptive_field(ctx.self.pos);
}

const Characteristic& characteristic(AgentType t) {
  static const LayerFinderCh lf;
  static const NodeLabellerCh nl;
  static const FetLabellerCh fl;
  static const FetOutputCh fo;
  static const ContactFinderCh cf;
  static const NodeDirectorCh nd;
  static const NodePropagatorCh np;
  static const std::array<const Characteristic*, kAgentTypeCount> table = {
      &lf, &nl, &fl, &fo, &cf, &nd, &np};
  return *table[static_cast<int>(t)];
}

Simulation::Simulation(std::shared_ptr<const Geometry> geometry, std::vector<AgentState> agents,
                       SimOptions options)
    : env_(std::move(geometry)), agents_(std::move(agents)), options_(options) {
  std::sort(agents_.begin(), agents_.end(),
            [](const AgentState& a, const AgentState& b) { return a.id < b.id; });
  np_occupancy_.assign(env_.grid().cell_count(), 0);
  directors_per_wire_.assign(env_.geometry().components().size(), 0);
  for (const AgentState& a : agents_) {
    if (!env_.grid().in_bounds(a.pos)) throw std::invalid_argument("agent placed off the grid");
    if (a.type == AT::NodePropagator) ++np_occupancy_[env_.grid().index(a.pos)];
  }
}

Simulation::Simulation(std::shared_ptr<const Geometry> geometry, int n_agents,
                       std::uint64_t seed, SimOptions options)
    : Simulation(geometry, init_population(geometry->grid(), n_agents, seed), options) {}

void Simulation::step() {
  for (AgentState& a : agents_) run_cycle(a);
  env_.advance_step();
}

void Simulation::run_cycle(AgentState& agent) {
  CycleContext ctx{*this, env_, agent, {}};
  const Characteristic* ch = &characteristic(agent.type);
  ch->read(ctx);
  ch->update(ctx);
  ch->write(ctx);
  if (const auto next = ch->alter(ctx)) {
    change_type(agent, *next);
    ch = &characteristic(agent.type);
  }
  ch->move(ctx);
}

void Simulation::change_type(AgentState& agent, AgentType next) {
  const AgentType from = agent.type;
  if (!TransitionGraph::allowed(from, next))
    throw TransitionError("illegal transition " + std::string(agent_type_name(from)) + " -> " +
                          std::string(agent_type_name(next)));
  if (agent.completed_labelling && next == AT::LayerFinder)
    throw TransitionError("agent " + std::to_string(agent.id) +
                          " returned to LF after completing a wire");
  const int cell = env_.grid().index(agent.pos);
  if (from == AT::NodePropagator) --np_occupancy_[cell];
  if (next == AT::NodePropagator) ++np_occupancy_[cell];
  if (next == AT::NodeDirector || next == AT::FetLabeller) {
    const int wire = env_.geometry().component_at(agent.pos, agent.layer);
    if (wire >= 0) ++directors_per_wire_[wire];
  }
  ++transitions_[static_cast<int>(from)][static_cast<int>(next)];
  agent.prev_type = from;
  agent.type = next;
  agent.fresh = true;
  agent.traced = 0;
}

void Simulation::set_position(AgentState& agent, Point p) {
  if (agent.type == AT::NodePropagator) {
    --np_occupancy_[env_.grid().index(agent.pos)];
    ++np_occupancy_[env_.grid().index(p)];
  }
  agent.pos = p;
}

Population Simulation::population() const {
  Population counts{};
  for (const AgentState& a : agents_) ++counts[static_cast<int>(a.type)];
  return counts;
}

}  // namespace lbsim
