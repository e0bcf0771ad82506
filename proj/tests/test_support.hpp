#pragma once

#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "lbsim/layout.hpp"
#include "lbsim/netlist.hpp"
#include "lbsim/oracle.hpp"

namespace lbsim::test {

inline const char* const kFixtures[] = {"empty", "single_wire", "cross", "inverter", "nand4"};

inline std::string fixture_path(const std::string& name) {
  return std::string(LBSIM_FIXTURE_DIR) + "/" + name + ".lay";
}

inline LayoutGrid fixture(const std::string& name) { return load_layout_file(fixture_path(name)); }

inline std::shared_ptr<const Geometry> fixture_geometry(const std::string& name) {
  return std::make_shared<const Geometry>(fixture(name));
}

inline std::shared_ptr<const Geometry> geometry_of(std::string_view text) {
  return std::make_shared<const Geometry>(parse_layout(text));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline NetlistStatement random_statement(std::mt19937_64& rng) {
  // Mix small values with full-range ones so digit counts vary.
  auto value = [&rng]() -> std::uint64_t {
    switch (rng() % 3) {
      case 0: return rng() % 10;
      case 1: return rng() % 100000;
      default: return rng();
    }
  };
  if (rng() % 2) return ContactStatement{value(), value(), value(), value()};
  return FetStatement{rng() % 2 ? Polarity::PFET : Polarity::NFET,
                      value(), value(), value(), value(), value(), value(), value()};
}

// The statement set locked by golden/statements.net.
inline std::vector<NetlistStatement> golden_statements() {
  return {
      FetStatement{Polarity::NFET, 3, 12, 7, 5, 2, 6, 148},
      ContactStatement{9, 12, 4, 201},
      FetStatement{Polarity::PFET, 175000, 0, 18446744073709551615u, 1, 1, 1, 0},
      ContactStatement{0, 0, 0, 0},
      FetStatement{Polarity::PFET, 41001, 88, 90, 41, 3, 12, 902},
  };
}

// `n` re-keyed onto a canvas grown by k with every cell shifted by (+k, +k).
// Node ids are kept, so compare with netlists_equal.
inline CanonicalNetlist translated(const CanonicalNetlist& n, int k) {
  CanonicalNetlist out;
  out.width = n.width + k;
  out.height = n.height + k;
  out.node_partition.assign(static_cast<std::size_t>(out.width) * out.height * kConductingCount,
                            kNoNode);
  for (NodeId key = 0; key < n.node_partition.size(); ++key) {
    if (n.node_partition[key] == kNoNode) continue;
    const int cell = static_cast<int>(key / kConductingCount);
    const int x = cell % n.width + k, y = cell / n.width + k;
    out.node_partition[static_cast<NodeId>(y * out.width + x) * kConductingCount +
                       key % kConductingCount] = n.node_partition[key];
  }
  out.fets = n.fets;
  return out;
}

inline LayoutGrid shifted(const LayoutGrid& g, int k) {
  std::vector<Rect> rects = g.rects();
  for (Rect& r : rects) {
    r.x0 += k;
    r.x1 += k;
    r.y0 += k;
    r.y1 += k;
  }
  return LayoutGrid(g.width() + k, g.height() + k, rects);
}

}  // namespace lbsim::test
