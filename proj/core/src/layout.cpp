#include "lbsim/layout.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lbsim {

namespace {

constexpr std::array<std::string_view, kLayerCount> kLayerNames = {
    "METAL1", "METAL2", "POLY", "DIFF", "PSEL", "CONTACT"};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view tok, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw LayoutError("expected integer, got '" + std::string(tok) + "'", line);
  return v;
}

// Flood fill of a boolean mask, components discovered in row-major order of
// their minimum cell. Cells of each component are returned row-major.
template <typename Pred>
std::vector<std::vector<Point>> flood_components(const LayoutGrid& grid, Pred in) {
  std::vector<std::vector<Point>> comps;
  std::vector<std::uint8_t> seen(grid.cell_count(), 0);
  std::deque<Point> queue;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const Point start{x, y};
      if (seen[grid.index(start)] || !in(start)) continue;
      std::vector<Point> cells;
      seen[grid.index(start)] = 1;
      queue.push_back(start);
      while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        cells.push_back(p);
        for (Dir d : kDirs) {
          const Point q = step(p, d);
          if (!grid.in_bounds(q) || seen[grid.index(q)] || !in(q)) continue;
          seen[grid.index(q)] = 1;
          queue.push_back(q);
        }
      }
      std::sort(cells.begin(), cells.end(), [&](Point a, Point b) {
        return grid.index(a) < grid.index(b);
      });
      comps.push_back(std::move(cells));
    }
  }
  return comps;
}

}  // namespace

std::string_view layer_name(Layer l) { return kLayerNames[static_cast<int>(l)]; }

std::optional<Layer> layer_from_name(std::string_view name) {
  for (int i = 0; i < kLayerCount; ++i)
    if (kLayerNames[i] == name) return static_cast<Layer>(i);
  return std::nullopt;
}

LayoutGrid::LayoutGrid(int width, int height, std::vector<Rect> rects)
    : width_(width), height_(height), rects_(std::move(rects)) {
  if (width_ <= 0) throw LayoutError("zero width");
  if (height_ <= 0) throw LayoutError("zero height");
  bits_.assign(static_cast<std::size_t>(width_) * height_, 0);
  for (const Rect& r : rects_) {
    if (r.x0 > r.x1 || r.y0 > r.y1)
      throw LayoutError("inverted rectangle");
    if (r.x0 < 0 || r.y0 < 0 || r.x1 >= width_ || r.y1 >= height_)
      throw LayoutError("rectangle out of bounds");
    for (int y = r.y0; y <= r.y1; ++y)
      for (int x = r.x0; x <= r.x1; ++x) bits_[index({x, y})] |= layer_bit(r.layer);
  }
}

LayoutGrid parse_layout(std::string_view text) {
  int width = -1, height = -1;
  bool have_header = false;
  std::vector<Rect> rects;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tok[0] == "LAYOUT") {
      if (have_header) throw LayoutError("duplicate LAYOUT header", line_no);
      if (tok.size() != 3) throw LayoutError("LAYOUT expects <width> <height>", line_no);
      width = parse_int(tok[1], line_no);
      height = parse_int(tok[2], line_no);
      if (width <= 0) throw LayoutError("zero width", line_no);
      if (height <= 0) throw LayoutError("zero height", line_no);
      have_header = true;
    } else if (tok[0] == "RECT") {
      if (!have_header) throw LayoutError("RECT before LAYOUT header", line_no);
      if (tok.size() != 6)
        throw LayoutError("RECT expects <LAYER> <x0> <y0> <x1> <y1>", line_no);
      const auto layer = layer_from_name(tok[1]);
      if (!layer) throw LayoutError("unknown layer '" + std::string(tok[1]) + "'", line_no);
      Rect r{*layer, parse_int(tok[2], line_no), parse_int(tok[3], line_no),
             parse_int(tok[4], line_no), parse_int(tok[5], line_no)};
      if (r.x0 > r.x1 || r.y0 > r.y1) throw LayoutError("inverted rectangle", line_no);
      if (r.x0 < 0 || r.y0 < 0 || r.x1 >= width || r.y1 >= height)
        throw LayoutError("rectangle out of bounds", line_no);
      rects.push_back(r);
    } else {
      throw LayoutError("unknown statement '" + std::string(tok[0]) + "'", line_no);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw LayoutError("missing LAYOUT header", 1);
  return LayoutGrid(width, height, std::move(rects));
}

LayoutGrid load_layout_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LayoutError("cannot open layout file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str());
}

std::string format_layout(const LayoutGrid& grid) {
  std::ostringstream out;
  out << "LAYOUT " << grid.width() << ' ' << grid.height() << '\n';
  for (const Rect& r : grid.rects())
    out << "RECT " << layer_name(r.layer) << ' ' << r.x0 << ' ' << r.y0 << ' '
        << r.x1 << ' ' << r.y1 << '\n';
  return out.str();
}

std::vector<WireComponent> conducting_components(const LayoutGrid& grid) {
  std::vector<WireComponent> all;
  for (Layer l : kConductingLayers) {
    for (auto& cells : flood_components(grid, [&](Point p) { return grid.member(p, l); }))
      all.push_back(WireComponent{l, 0, std::move(cells)});
  }
  std::stable_sort(all.begin(), all.end(), [&](const WireComponent& a, const WireComponent& b) {
    const int ia = grid.index(a.cells.front()), ib = grid.index(b.cells.front());
    if (ia != ib) return ia < ib;
    return a.layer < b.layer;
  });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].id = static_cast<int>(i);
  return all;
}

std::vector<ContactRegion> contact_regions(const LayoutGrid& grid) {
  std::vector<ContactRegion> out;
  for (auto& cells :
       flood_components(grid, [&](Point p) { return grid.has(p, Layer::Contact); })) {
    out.push_back(ContactRegion{static_cast<int>(out.size()), std::move(cells)});
  }
  return out;
}

namespace {

std::vector<int> component_plane(const LayoutGrid& grid,
                                 const std::vector<WireComponent>& comps) {
  std::vector<int> plane(static_cast<std::size_t>(grid.cell_count()) * kConductingCount, -1);
  for (const auto& c : comps)
    for (Point p : c.cells)
      plane[grid.index(p) * kConductingCount + conducting_slot(c.layer)] = c.id;
  return plane;
}

std::vector<ChannelRegion> measure_channels(const LayoutGrid& grid,
                                            const std::vector<int>& comp_plane) {
  auto comp_at = [&](Point p, Layer l) {
    return comp_plane[grid.index(p) * kConductingCount + conducting_slot(l)];
  };
  std::vector<ChannelRegion> out;
  for (auto& cells : flood_components(grid, [&](Point p) { return grid.channel(p); })) {
    ChannelRegion ch;
    ch.id = static_cast<int>(out.size());
    const Point first = cells.front();
    int x0 = first.x, x1 = first.x, y0 = first.y, y1 = first.y;
    for (Point p : cells) {
      x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    const int w = x1 - x0 + 1, h = y1 - y0 + 1;
    if (static_cast<int>(cells.size()) != w * h)
      throw LayoutRuleViolation("non-rectangular channel", first);

    // DIFF components across each side; a side counts only when every cell of
    // it borders DIFF.
    struct Side {
      std::set<int> comps;
      int touching = 0;
      int length = 0;
    };
    std::array<Side, 4> sides;
    for (Dir d : kDirs) {
      Side& s = sides[static_cast<int>(d)];
      const bool vertical_side = (d == Dir::East || d == Dir::West);
      s.length = vertical_side ? h : w;
      for (int k = 0; k < s.length; ++k) {
        Point edge;
        if (d == Dir::East) edge = {x1, y0 + k};
        else if (d == Dir::West) edge = {x0, y0 + k};
        else if (d == Dir::North) edge = {x0 + k, y0};
        else edge = {x0 + k, y1};
        const Point out_cell = step(edge, d);
        if (grid.member(out_cell, Layer::Diff)) {
          ++s.touching;
          s.comps.insert(comp_at(out_cell, Layer::Diff));
        }
      }
    }
    auto full = [](const Side& s) { return s.touching == s.length && s.comps.size() == 1; };
    auto none = [](const Side& s) { return s.touching == 0; };
    const Side& e = sides[0]; const Side& so = sides[1];
    const Side& we = sides[2]; const Side& n = sides[3];
    int a = -1, b = -1;
    if (full(e) && full(we) && none(n) && none(so)) {
      a = *e.comps.begin(); b = *we.comps.begin();
      ch.width = h; ch.length = w;
    } else if (full(n) && full(so) && none(e) && none(we)) {
      a = *n.comps.begin(); b = *so.comps.begin();
      ch.width = w; ch.length = h;
    } else {
      throw LayoutRuleViolation(
          "channel must border exactly two DIFF components on two opposite full sides", first);
    }
    if (a == b)
      throw LayoutRuleViolation("channel must border exactly two DIFF components", first);
    ch.source = std::min(a, b);
    ch.drain = std::max(a, b);
    ch.gate = comp_at(first, Layer::Poly);

    int psel = 0;
    for (Point p : cells) psel += grid.has(p, Layer::Psel) ? 1 : 0;
    if (psel != 0 && psel != static_cast<int>(cells.size()))
      throw LayoutRuleViolation("mixed PSEL coverage on channel", first);
    ch.polarity = psel ? Polarity::PFET : Polarity::NFET;
    ch.cells = std::move(cells);
    out.push_back(std::move(ch));
  }
  return out;
}

}  // namespace

std::vector<ChannelRegion> channel_components(const LayoutGrid& grid) {
  return measure_channels(grid, component_plane(grid, conducting_components(grid)));
}

Geometry::Geometry(const LayoutGrid& grid)
    : grid_(grid),
      components_(conducting_components(grid)),
      contacts_(contact_regions(grid)) {
  component_plane_ = component_plane(grid_, components_);
  channels_ = measure_channels(grid_, component_plane_);
  contact_plane_.assign(grid_.cell_count(), -1);
  for (const auto& c : contacts_)
    for (Point p : c.cells) contact_plane_[grid_.index(p)] = c.id;
  channel_plane_.assign(grid_.cell_count(), -1);
  for (const auto& c : channels_)
    for (Point p : c.cells) channel_plane_[grid_.index(p)] = c.id;
  boundary_plane_.assign(static_cast<std::size_t>(grid_.cell_count()) * kConductingCount, 0);
  for (int i = 0; i < grid_.cell_count(); ++i) {
    const Point p = grid_.point(i);
    for (Layer l : kConductingLayers) {
      if (!grid_.member(p, l)) continue;
      bool edge = false;
      for (Dir d : kDirs) edge = edge || !grid_.member(step(p, d), l);
      boundary_plane_[i * kConductingCount + conducting_slot(l)] = edge ? 1 : 0;
    }
  }
}

void check_contact_rules(const LayoutGrid& grid) {
  for (const auto& region : contact_regions(grid)) {
    std::optional<Layer> other;
    for (Point p : region.cells) {
      if (!grid.has(p, Layer::Metal1))
        throw LayoutRuleViolation("contact without METAL1", p);
      if (grid.channel(p))
        throw LayoutRuleViolation("contact joins POLY and DIFF directly", p);
      for (Layer l : {Layer::Metal2, Layer::Poly, Layer::Diff}) {
        if (!grid.member(p, l)) continue;
        if (other && *other != l)
          throw LayoutRuleViolation("contact connects more than two layers", p);
        other = l;
      }
    }
    if (!other) throw LayoutRuleViolation("dangling contact", region.cells.front());
    for (Point p : region.cells)
      if (!grid.member(p, *other))
        throw LayoutRuleViolation("contact partially overlaps its wire", p);
  }
}

void check_no_holes(const LayoutGrid& grid) {
  for (const auto& comp : conducting_components(grid)) {
    int x0 = comp.cells.front().x, x1 = x0, y0 = comp.cells.front().y, y1 = y0;
    for (Point p : comp.cells) {
      x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    // Padded box; background is 8-connected (dual of 4-connected wires).
    const int bw = x1 - x0 + 3, bh = y1 - y0 + 3;
    std::vector<std::uint8_t> box(static_cast<std::size_t>(bw) * bh, 0);
    for (Point p : comp.cells) box[(p.y - y0 + 1) * bw + (p.x - x0 + 1)] = 1;
    std::deque<int> queue{0};
    box[0] = 2;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      const int bx = i % bw, by = i / bw;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = bx + dx, ny = by + dy;
          if (nx < 0 || ny < 0 || nx >= bw || ny >= bh) continue;
          const int j = ny * bw + nx;
          if (box[j] != 0) continue;
          box[j] = 2;
          queue.push_back(j);
        }
    }
    for (int i = 0; i < bw * bh; ++i)
      if (box[i] == 0)
        throw LayoutRuleViolation(std::string(layer_name(comp.layer)) + " wire encloses a hole",
                                  comp.cells.front());
  }
}

void check_layout_rules(const LayoutGrid& grid) {
  check_no_holes(grid);
  (void)channel_components(grid);
  check_contact_rules(grid);
}

}  // namespace lbsim
