#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lbsim {

/// Mask layers of the simplified CMOS process.
enum class Layer : std::uint8_t { Metal1 = 0, Metal2, Poly, Diff, Psel, Contact };

inline constexpr int kLayerCount = 6;

/// Layers that form wires. Index into per-layer planes with conducting_slot().
inline constexpr std::array<Layer, 4> kConductingLayers = {
    Layer::Metal1, Layer::Metal2, Layer::Poly, Layer::Diff};
inline constexpr int kConductingCount = 4;

constexpr bool is_conducting(Layer l) {
  return l == Layer::Metal1 || l == Layer::Metal2 || l == Layer::Poly ||
         l == Layer::Diff;
}

/// Slot 0..3 for a conducting layer; the four enumerators come first.
constexpr int conducting_slot(Layer l) { return static_cast<int>(l); }

constexpr std::uint8_t layer_bit(Layer l) {
  return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l));
}

std::string_view layer_name(Layer l);
std::optional<Layer> layer_from_name(std::string_view name);

struct Point {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Point, Point) = default;
};

/// Cardinal directions, clockwise in screen coordinates (y grows downward).
enum class Dir : std::uint8_t { East = 0, South, West, North };

inline constexpr std::array<Dir, 4> kDirs = {Dir::East, Dir::South, Dir::West,
                                             Dir::North};

constexpr Point offset(Dir d) {
  switch (d) {
    case Dir::East: return {1, 0};
    case Dir::South: return {0, 1};
    case Dir::West: return {-1, 0};
    case Dir::North: return {0, -1};
  }
  return {0, 0};
}

constexpr Dir turn_right(Dir d) {
  return static_cast<Dir>((static_cast<int>(d) + 1) % 4);
}
constexpr Dir turn_left(Dir d) {
  return static_cast<Dir>((static_cast<int>(d) + 3) % 4);
}
constexpr Dir reverse(Dir d) {
  return static_cast<Dir>((static_cast<int>(d) + 2) % 4);
}

constexpr Point step(Point p, Dir d) {
  const Point o = offset(d);
  return {p.x + o.x, p.y + o.y};
}

}  // namespace lbsim
