#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbsim/layout.hpp"
#include "lbsim/netlist.hpp"

namespace lbsim {

/// Node labels are agent ids; 0 means "no label".
using Label = std::uint32_t;
/// Transistor marks; 0 means "no mark".
using FetLabel = std::uint64_t;

struct CellState {
  std::uint8_t layer_bits = 0;
  std::array<Label, kConductingCount> label{};
  std::uint8_t boundary_mark = 0;  // bit per conducting slot
  std::uint8_t director_mark = 0;  // bit per conducting slot
  FetLabel fet_label = 0;
  bool fet_output_done = false;
  bool fet_claimed = false;
  bool contact_captured = false;

  Label label_on(Layer l) const { return label[conducting_slot(l)]; }
  bool boundary_marked(Layer l) const { return (boundary_mark >> conducting_slot(l)) & 1u; }
  bool director_marked(Layer l) const { return (director_mark >> conducting_slot(l)) & 1u; }
};

/// 3x3 neighbourhood; absent entries are outside the grid.
struct ReceptiveField {
  Point center;
  std::array<const CellState*, 9> cells{};

  /// dx, dy in [-1, 1].
  const CellState* at(int dx, int dy) const { return cells[(dy + 1) * 3 + (dx + 1)]; }
  int present() const {
    int n = 0;
    for (const auto* c : cells) n += c != nullptr;
    return n;
  }
};

class EnvironmentError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The shared blackboard: per-cell label, mark and flag planes plus the sealed
/// label registry and the append-only output stream.
class Environment {
 public:
  explicit Environment(std::shared_ptr<const Geometry> geometry);

  const Geometry& geometry() const { return *geometry_; }
  const LayoutGrid& grid() const { return geometry_->grid(); }
  std::uint64_t step() const { return step_; }
  void advance_step() { ++step_; }

  const CellState& cell(Point p) const { return cells_[grid().index(p)]; }
  ReceptiveField read_receptive_field(Point center) const;

  /// Dominance write: label := max(existing, value). Returns the prior label.
  std::optional<Label> write_label(Point p, Layer l, Label value);
  /// Same dominance rule on the transistor mark.
  std::optional<FetLabel> write_fet_label(Point p, FetLabel value);

  void set_boundary_mark(Point p, Layer l);
  void set_director_mark(Point p, Layer l);
  void set_fet_output_done(Point p);
  void set_fet_claimed(Point p);
  void set_contact_captured(Point p);

  void seal_label(Label value);
  bool sealed(Label value) const {
    return value != 0 && value < sealed_.size() && sealed_[value] != 0;
  }
  std::size_t sealed_count() const { return sealed_total_; }

  /// A label an agent may rely on: sealed, and either director-marked (wire
  /// boundary) or on an interior cell, which only ever receives final labels.
  bool stable(Point p, Layer l) const;

  /// Appends with Time = step(). Contact statement ids are contact region ids.
  void emit_contact(ContactStatement s);
  void emit_fet(FetStatement s, int channel);
  const std::vector<NetlistStatement>& emitted() const { return emitted_; }

  void add_diagnostic(std::string message) { diagnostics_.push_back(std::move(message)); }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  /// Every wire cell carries a sealed label, every contact region is captured
  /// and reported, every channel is output and reported.
  bool is_complete() const;

 private:
  CellState& mutable_cell(Point p) { return cells_[grid().index(p)]; }

  std::shared_ptr<const Geometry> geometry_;
  std::vector<CellState> cells_;
  std::vector<std::uint8_t> sealed_;
  std::size_t sealed_total_ = 0;
  std::vector<NetlistStatement> emitted_;
  std::vector<std::uint8_t> contact_reported_;
  std::vector<std::uint8_t> channel_reported_;
  int contacts_reported_total_ = 0;
  int channels_reported_total_ = 0;
  std::vector<std::string> diagnostics_;
  std::uint64_t step_ = 0;
};

}  // namespace lbsim
