#include "lbsim/env.hpp"

#include <algorithm>

namespace lbsim {

Environment::Environment(std::shared_ptr<const Geometry> geometry)
    : geometry_(std::move(geometry)) {
  const LayoutGrid& g = grid();
  cells_.resize(g.cell_count());
  for (int i = 0; i < g.cell_count(); ++i) cells_[i].layer_bits = g.bits(g.point(i));
  contact_reported_.assign(geometry_->contacts().size(), 0);
  channel_reported_.assign(geometry_->channels().size(), 0);
}

ReceptiveField Environment::read_receptive_field(Point center) const {
  if (!grid().in_bounds(center)) throw EnvironmentError("receptive field centre out of bounds");
  ReceptiveField field;
  field.center = center;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const Point p{center.x + dx, center.y + dy};
      field.cells[(dy + 1) * 3 + (dx + 1)] = grid().in_bounds(p) ? &cell(p) : nullptr;
    }
  return field;
}

std::optional<Label> Environment::write_label(Point p, Layer l, Label value) {
  if (!grid().member(p, l)) throw EnvironmentError("label write on a cell without the layer");
  if (value == 0) throw EnvironmentError("labels are positive");
  Label& slot = mutable_cell(p).label[conducting_slot(l)];
  const Label before = slot;
  slot = std::max(slot, value);
  if (before == 0) return std::nullopt;
  return before;
}

std::optional<FetLabel> Environment::write_fet_label(Point p, FetLabel value) {
  if (!grid().channel(p)) throw EnvironmentError("fet label write off a channel");
  FetLabel& slot = mutable_cell(p).fet_label;
  const FetLabel before = slot;
  slot = std::max(slot, value);
  if (before == 0) return std::nullopt;
  return before;
}

void Environment::set_boundary_mark(Point p, Layer l) {
  mutable_cell(p).boundary_mark |= static_cast<std::uint8_t>(1u << conducting_slot(l));
}

void Environment::set_director_mark(Point p, Layer l) {
  CellState& c = mutable_cell(p);
  const auto bit = static_cast<std::uint8_t>(1u << conducting_slot(l));
  c.boundary_mark |= bit;
  c.director_mark |= bit;
}

void Environment::set_fet_output_done(Point p) { mutable_cell(p).fet_output_done = true; }
void Environment::set_fet_claimed(Point p) { mutable_cell(p).fet_claimed = true; }
void Environment::set_contact_captured(Point p) { mutable_cell(p).contact_captured = true; }

void Environment::seal_label(Label value) {
  if (value == 0) return;
  if (value >= sealed_.size()) sealed_.resize(value + 1, 0);
  if (!sealed_[value]) ++sealed_total_;
  sealed_[value] = 1;
}

bool Environment::stable(Point p, Layer l) const {
  const CellState& c = cell(p);
  const Label v = c.label_on(l);
  if (!sealed(v)) return false;
  return c.director_marked(l) || !geometry_->boundary(p, l);
}

void Environment::emit_contact(ContactStatement s) {
  s.time = step_;
  if (s.id < contact_reported_.size() && !contact_reported_[s.id]) {
    contact_reported_[s.id] = 1;
    ++contacts_reported_total_;
  }
  emitted_.emplace_back(s);
}

void Environment::emit_fet(FetStatement s, int channel) {
  s.time = step_;
  if (channel >= 0 && channel < static_cast<int>(channel_reported_.size()) &&
      !channel_reported_[channel]) {
    channel_reported_[channel] = 1;
    ++channels_reported_total_;
  }
  emitted_.emplace_back(s);
}

bool Environment::is_complete() const {
  const Geometry& geo = *geometry_;
  if (contacts_reported_total_ != static_cast<int>(geo.contacts().size())) return false;
  if (channels_reported_total_ != static_cast<int>(geo.channels().size())) return false;
  for (const auto& region : geo.contacts())
    for (Point p : region.cells)
      if (!cell(p).contact_captured) return false;
  for (const auto& ch : geo.channels())
    for (Point p : ch.cells)
      if (!cell(p).fet_output_done) return false;
  const LayoutGrid& g = grid();
  for (int i = 0; i < g.cell_count(); ++i) {
    const Point p = g.point(i);
    for (Layer l : kConductingLayers) {
      if (!g.member(p, l)) continue;
      if (!sealed(cells_[i].label_on(l))) return false;
    }
  }
  return true;
}

}  // namespace lbsim
