#include "lbsim/oracle.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "lbsim/union_find.hpp"

namespace lbsim {

namespace {

std::optional<Layer> contact_other_layer(const LayoutGrid& g, Point p) {
  for (Layer l : {Layer::Metal2, Layer::Poly, Layer::Diff})
    if (g.member(p, l)) return l;
  return std::nullopt;
}

// Renames every class id in `partition` to the minimum key carrying it.
void canonicalize_ids(std::vector<NodeId>& partition, std::vector<CanonicalFet>& fets) {
  std::unordered_map<NodeId, NodeId> rename;
  for (NodeId k = 0; k < partition.size(); ++k) {
    if (partition[k] == kNoNode) continue;
    rename.try_emplace(partition[k], k);  // keys ascend, so the first is the minimum
  }
  for (NodeId& v : partition)
    if (v != kNoNode) v = rename.at(v);
  for (CanonicalFet& f : fets) {
    f.gate = rename.at(f.gate);
    f.a = rename.at(f.a);
    f.b = rename.at(f.b);
    if (f.a > f.b) std::swap(f.a, f.b);
  }
  std::sort(fets.begin(), fets.end());
}

std::string cell_text(const CanonicalNetlist& n, NodeId key) {
  const auto cell = static_cast<int>(key / kConductingCount);
  const auto layer = static_cast<Layer>(key % kConductingCount);
  return std::string(layer_name(layer)) + "@" + std::to_string(cell % n.width) + "," +
         std::to_string(cell / n.width);
}

std::string fet_text(const CanonicalFet& f) {
  return std::string(f.polarity == Polarity::PFET ? "PFET" : "NFET") + " G " +
         std::to_string(f.gate) + " SD " + std::to_string(f.a) + " " + std::to_string(f.b) +
         " L " + std::to_string(f.length) + " W " + std::to_string(f.width);
}

}  // namespace

CanonicalNetlist oracle_extract(const LayoutGrid& grid) {
  check_layout_rules(grid);
  const Geometry geo(grid);
  UnionFind uf(static_cast<int>(geo.components().size()));

  CanonicalNetlist out;
  out.width = grid.width();
  out.height = grid.height();
  for (const ContactRegion& region : geo.contacts()) {
    const Point p = region.cells.front();
    const Layer other = *contact_other_layer(grid, p);
    uf.unite(geo.component_at(p, Layer::Metal1), geo.component_at(p, other));
    ++out.contact_merges;
  }

  out.node_partition.assign(static_cast<std::size_t>(grid.cell_count()) * kConductingCount,
                            kNoNode);
  for (int i = 0; i < grid.cell_count(); ++i)
    for (Layer l : kConductingLayers) {
      const int c = geo.component_at(grid.point(i), l);
      if (c >= 0) out.node_partition[node_key(i, l)] = static_cast<NodeId>(uf.find(c));
    }

  for (const ChannelRegion& ch : geo.channels()) {
    CanonicalFet f;
    f.polarity = ch.polarity;
    f.gate = static_cast<NodeId>(uf.find(ch.gate));
    f.a = static_cast<NodeId>(uf.find(ch.source));
    f.b = static_cast<NodeId>(uf.find(ch.drain));
    f.length = static_cast<std::uint64_t>(ch.length);
    f.width = static_cast<std::uint64_t>(ch.width);
    out.fets.push_back(f);
  }
  canonicalize_ids(out.node_partition, out.fets);
  return out;
}

CanonicalNetlist canonicalize_run(const Environment& env) {
  if (!env.is_complete()) throw OracleIntegrityError("run is not complete");
  const LayoutGrid& grid = env.grid();

  std::map<Label, int> index_of;
  UnionFind uf;
  const auto class_of = [&](std::uint64_t label, const char* what) {
    const auto it = index_of.find(static_cast<Label>(label));
    if (label > ~Label{0} || it == index_of.end())
      throw OracleIntegrityError(std::string(what) + " names label " + std::to_string(label) +
                                 " which labels no cell");
    return it->second;
  };

  CanonicalNetlist out;
  out.width = grid.width();
  out.height = grid.height();
  out.node_partition.assign(static_cast<std::size_t>(grid.cell_count()) * kConductingCount,
                            kNoNode);
  for (int i = 0; i < grid.cell_count(); ++i)
    for (Layer l : kConductingLayers) {
      if (!grid.member(grid.point(i), l)) continue;
      const Label v = env.cell(grid.point(i)).label_on(l);
      auto [it, added] = index_of.try_emplace(v, uf.size());
      if (added) uf.add();
      out.node_partition[node_key(i, l)] = static_cast<NodeId>(it->second);
    }

  std::vector<const FetStatement*> fets;
  for (const NetlistStatement& s : env.emitted()) {
    if (const auto* c = std::get_if<ContactStatement>(&s)) {
      uf.unite(class_of(c->node_a, "contact"), class_of(c->node_b, "contact"));
    } else {
      fets.push_back(&std::get<FetStatement>(s));
    }
  }
  for (NodeId& v : out.node_partition)
    if (v != kNoNode) v = static_cast<NodeId>(uf.find(static_cast<int>(v)));
  for (const FetStatement* s : fets) {
    CanonicalFet f;
    f.polarity = s->polarity;
    f.gate = static_cast<NodeId>(uf.find(class_of(s->gate, "fet gate")));
    f.a = static_cast<NodeId>(uf.find(class_of(s->source, "fet source")));
    f.b = static_cast<NodeId>(uf.find(class_of(s->drain, "fet drain")));
    f.length = s->length;
    f.width = s->width;
    out.fets.push_back(f);
  }
  canonicalize_ids(out.node_partition, out.fets);
  return out;
}

NetlistComparison netlists_equal(const CanonicalNetlist& a, const CanonicalNetlist& b) {
  NetlistComparison result;
  auto fail = [&](const std::string& line) {
    result.equal = false;
    result.report += line;
    result.report += '\n';
  };
  if (a.width != b.width || a.height != b.height ||
      a.node_partition.size() != b.node_partition.size()) {
    fail("grid size differs: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
         " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
    return result;
  }

  constexpr int kMaxCellLines = 20;
  int cell_lines = 0;
  int extra_cells = 0;
  auto cell_mismatch = [&](NodeId key, const std::string& why) {
    if (cell_lines++ < kMaxCellLines) fail("cell " + cell_text(a, key) + ": " + why);
    else ++extra_cells;
    result.equal = false;
  };
  std::unordered_map<NodeId, NodeId> a_to_b;
  std::unordered_map<NodeId, NodeId> b_to_a;
  for (NodeId k = 0; k < a.node_partition.size(); ++k) {
    const NodeId x = a.node_partition[k];
    const NodeId y = b.node_partition[k];
    if ((x == kNoNode) != (y == kNoNode)) {
      cell_mismatch(k, "present in only one netlist");
      continue;
    }
    if (x == kNoNode) continue;
    const auto [ia, new_a] = a_to_b.try_emplace(x, y);
    const auto [ib, new_b] = b_to_a.try_emplace(y, x);
    if (ia->second != y || ib->second != x)
      cell_mismatch(k, "node " + std::to_string(x) + " vs node " + std::to_string(y) +
                           " breaks the partition");
  }
  if (extra_cells > 0) fail("... and " + std::to_string(extra_cells) + " more cells");

  std::vector<CanonicalFet> mapped;
  for (CanonicalFet f : a.fets) {
    const auto map = [&](NodeId v) {
      const auto it = a_to_b.find(v);
      return it == a_to_b.end() ? kNoNode : it->second;
    };
    f.gate = map(f.gate);
    f.a = map(f.a);
    f.b = map(f.b);
    if (f.a > f.b) std::swap(f.a, f.b);
    mapped.push_back(f);
  }
  std::sort(mapped.begin(), mapped.end());
  std::vector<CanonicalFet> theirs = b.fets;
  for (CanonicalFet& f : theirs)
    if (f.a > f.b) std::swap(f.a, f.b);
  std::sort(theirs.begin(), theirs.end());
  std::vector<CanonicalFet> only_a;
  std::vector<CanonicalFet> only_b;
  std::set_difference(mapped.begin(), mapped.end(), theirs.begin(), theirs.end(),
                      std::back_inserter(only_a));
  std::set_difference(theirs.begin(), theirs.end(), mapped.begin(), mapped.end(),
                      std::back_inserter(only_b));
  for (const auto& f : only_a) fail("fet only in first: " + fet_text(f));
  for (const auto& f : only_b) fail("fet only in second: " + fet_text(f));
  return result;
}

std::string format_canonical(const CanonicalNetlist& n) {
  std::string out;
  for (const CanonicalFet& f : n.fets) out += "fet " + fet_text(f) + "\n";
  std::map<NodeId, std::vector<NodeId>> nodes;
  for (NodeId k = 0; k < n.node_partition.size(); ++k)
    if (n.node_partition[k] != kNoNode) nodes[n.node_partition[k]].push_back(k);
  for (const auto& [id, keys] : nodes) {
    out += "node " + std::to_string(id) + ":";
    for (NodeId k : keys) out += " " + cell_text(n, k);
    out += "\n";
  }
  return out;
}

}  // namespace lbsim
