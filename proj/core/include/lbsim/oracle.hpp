#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbsim/env.hpp"
#include "lbsim/layout.hpp"

namespace lbsim {

/// Node ids are the minimum of cell_index * 4 + conducting_slot over the
/// node's (cell, layer) members, so they depend on geometry alone.
using NodeId = std::uint64_t;
inline constexpr NodeId kNoNode = ~NodeId{0};

constexpr NodeId node_key(int cell_index, Layer l) {
  return static_cast<NodeId>(cell_index) * kConductingCount +
         static_cast<NodeId>(conducting_slot(l));
}

struct CanonicalFet {
  Polarity polarity = Polarity::NFET;
  NodeId gate = 0;
  NodeId a = 0;  // a <= b: source and drain are unordered
  NodeId b = 0;
  std::uint64_t length = 0;
  std::uint64_t width = 0;
  friend auto operator<=>(const CanonicalFet&, const CanonicalFet&) = default;
};

struct CanonicalNetlist {
  int width = 0;
  int height = 0;
  /// Indexed by node_key; kNoNode where the layer is absent.
  std::vector<NodeId> node_partition;
  /// Sorted.
  std::vector<CanonicalFet> fets;
  /// Union-find merges performed for contacts (oracle only).
  int contact_merges = 0;
};

class OracleIntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serial reference extraction. Throws LayoutRuleViolation on invalid layouts.
CanonicalNetlist oracle_extract(const LayoutGrid& grid);

/// Canonical netlist from a completed run's label planes and emitted
/// statements. Throws OracleIntegrityError when the run is incomplete or a
/// statement names a label absent from the planes.
CanonicalNetlist canonicalize_run(const Environment& env);

struct NetlistComparison {
  bool equal = true;
  std::string report;  // empty when equal
};

/// Structural comparison: same cell partition and the same fets under the
/// induced node bijection. Node ids need not be canonical.
NetlistComparison netlists_equal(const CanonicalNetlist& a, const CanonicalNetlist& b);

/// Sorted text: one `fet` line per transistor, one `node` line per node.
std::string format_canonical(const CanonicalNetlist& n);

}  // namespace lbsim
