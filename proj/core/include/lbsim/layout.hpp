#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lbsim/types.hpp"

namespace lbsim {

/// Malformed layout text. `line` is 1-based when known.
class LayoutError : public std::runtime_error {
 public:
  LayoutError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Geometrically valid layout that breaks one of the extraction rules.
class LayoutRuleViolation : public LayoutError {
 public:
  LayoutRuleViolation(const std::string& what, Point cell)
      : LayoutError(what + " at (" + std::to_string(cell.x) + "," +
                    std::to_string(cell.y) + ")"),
        cell_(cell) {}
  Point cell() const { return cell_; }

 private:
  Point cell_;
};

/// Axis-aligned rectangle, inclusive cell coordinates.
struct Rect {
  Layer layer = Layer::Metal1;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Rasterized six-plane mask bitmap.
class LayoutGrid {
 public:
  LayoutGrid() = default;
  /// Throws LayoutError on a zero dimension or an out-of-bounds rectangle.
  LayoutGrid(int width, int height, std::vector<Rect> rects);

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }
  const std::vector<Rect>& rects() const { return rects_; }

  bool in_bounds(Point p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  int index(Point p) const { return p.y * width_ + p.x; }
  Point point(int index) const { return {index % width_, index / width_}; }

  std::uint8_t bits(Point p) const { return bits_[index(p)]; }
  bool has(Point p, Layer l) const { return (bits(p) & layer_bit(l)) != 0; }

  /// DIFF and POLY overlap: a transistor channel cell.
  bool channel(Point p) const { return has(p, Layer::Diff) && has(p, Layer::Poly); }
  /// DIFF not covered by POLY; channels split DIFF wires.
  bool effective_diff(Point p) const {
    return has(p, Layer::Diff) && !has(p, Layer::Poly);
  }
  /// Wire membership used for connectivity: DIFF means effective DIFF.
  bool member(Point p, Layer l) const {
    if (!in_bounds(p)) return false;
    return l == Layer::Diff ? effective_diff(p) : has(p, l);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Rect> rects_;
  std::vector<std::uint8_t> bits_;
};

LayoutGrid parse_layout(std::string_view text);
LayoutGrid load_layout_file(const std::string& path);
std::string format_layout(const LayoutGrid& grid);

struct WireComponent {
  Layer layer = Layer::Metal1;
  int id = 0;
  std::vector<Point> cells;  // row-major order
};

struct ContactRegion {
  int id = 0;
  std::vector<Point> cells;
};

enum class Polarity : std::uint8_t { NFET, PFET };

struct ChannelRegion {
  int id = 0;
  std::vector<Point> cells;
  Polarity polarity = Polarity::NFET;
  int length = 0;  // along source->drain
  int width = 0;   // along the DIFF-adjacent sides
  int gate = -1;   // POLY component id
  int source = -1;  // lower DIFF component id
  int drain = -1;
};

/// 4-connected components of every conducting layer, ids in row-major order
/// of each component's minimum cell (ties broken by layer order).
std::vector<WireComponent> conducting_components(const LayoutGrid& grid);

/// 4-connected components of the CONTACT plane.
std::vector<ContactRegion> contact_regions(const LayoutGrid& grid);

/// Transistor channels with measured geometry; throws LayoutRuleViolation on
/// non-rectangular channels, bad DIFF adjacency, or mixed PSEL coverage.
std::vector<ChannelRegion> channel_components(const LayoutGrid& grid);

/// Per-cell lookup tables derived from the grid.
class Geometry {
 public:
  explicit Geometry(const LayoutGrid& grid);

  const LayoutGrid& grid() const { return grid_; }
  const std::vector<WireComponent>& components() const { return components_; }
  const std::vector<ContactRegion>& contacts() const { return contacts_; }
  const std::vector<ChannelRegion>& channels() const { return channels_; }

  /// Component id of (p, l) or -1.
  int component_at(Point p, Layer l) const {
    return component_plane_[grid_.index(p) * kConductingCount + conducting_slot(l)];
  }
  int contact_at(Point p) const { return contact_plane_[grid_.index(p)]; }
  int channel_at(Point p) const { return channel_plane_[grid_.index(p)]; }
  /// Wire cell with at least one 4-neighbour (or the grid edge) outside the wire.
  bool boundary(Point p, Layer l) const {
    return boundary_plane_[grid_.index(p) * kConductingCount + conducting_slot(l)] != 0;
  }

 private:
  LayoutGrid grid_;
  std::vector<WireComponent> components_;
  std::vector<ContactRegion> contacts_;
  std::vector<ChannelRegion> channels_;
  std::vector<int> component_plane_;
  std::vector<int> contact_plane_;
  std::vector<int> channel_plane_;
  std::vector<std::uint8_t> boundary_plane_;
};

/// Contact semantics: every contact cell lies on METAL1 plus exactly one other
/// conducting wire, never on a channel. Throws LayoutRuleViolation.
void check_contact_rules(const LayoutGrid& grid);

/// Wires must be simply connected so a single boundary loop covers them.
void check_no_holes(const LayoutGrid& grid);

/// Every rule the extractor relies on.
void check_layout_rules(const LayoutGrid& grid);

}  // namespace lbsim
