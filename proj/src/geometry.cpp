#include "antgen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace antgen {

namespace {

constexpr std::array<std::string_view, kParameterCount> kNames = {
    "X1", "X2", "X3", "X4", "X5", "X6", "X7", "Y1", "Y2", "Y3",
    "Y4", "Y5", "Y6", "R1", "R2", "R3", "R4", "R5", "R6", "R7"};

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

ParameterVector ParameterVector::from_span(std::span<const double> values) {
  if (values.size() != kParameterCount)
    throw std::invalid_argument("parameter vector needs exactly 20 values");
  ParameterVector p;
  std::copy(values.begin(), values.end(), p.values_.begin());
  return p;
}

std::string_view ParameterVector::name(std::size_t i) { return kNames.at(i); }

ParameterRanges::ParameterRanges(const std::array<Interval, kParameterCount>& bounds)
    : bounds_(bounds) {
  for (std::size_t i = 0; i < kParameterCount; ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
      throw std::invalid_argument(fmt::format("range {} must satisfy lo < hi", kNames[i]));
  }
}

ParameterRanges ParameterRanges::defaults() {
  std::array<Interval, kParameterCount> b{};
  b[0] = {-30.0, -15.0};
  b[1] = {-15.0, -5.0};
  b[2] = {-5.0, 0.0};
  b[3] = {0.0, 5.0};
  b[4] = {5.0, 15.0};
  b[5] = {15.0, 30.0};
  b[6] = {-30.0, 0.0};
  for (std::size_t i = 7; i < 13; ++i) b[i] = {3.0, 10.0};
  for (std::size_t i = 13; i < 20; ++i) b[i] = {0.1, 1.5};
  return ParameterRanges(b);
}

bool ParameterRanges::contains(const ParameterVector& p) const {
  for (std::size_t i = 0; i < kParameterCount; ++i)
    if (!bounds_[i].contains(p[i])) return false;
  return true;
}

ParameterVector ParameterRanges::clamp(const ParameterVector& p) const {
  ParameterVector out = p;
  for (std::size_t i = 0; i < kParameterCount; ++i)
    out[i] = std::clamp(p[i], bounds_[i].lo, bounds_[i].hi);
  return out;
}

ParameterVector ParameterRanges::midpoint() const {
  ParameterVector out;
  for (std::size_t i = 0; i < kParameterCount; ++i) out[i] = 0.5 * (bounds_[i].lo + bounds_[i].hi);
  return out;
}

ConnectionMap ConnectionMap::defaults() {
  ConnectionMap m;
  m.pairs = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {2, 6}, {3, 7}};
  return m;
}

void ConnectionMap::validate() const {
  for (const auto& [a, b] : pairs) {
    if (a >= node_count || b >= node_count)
      throw std::invalid_argument("connection references a node outside the node table");
    if (a == b) throw std::invalid_argument("connection joins a node to itself");
  }
}

bool ConnectionMap::adjacent(std::size_t edge_a, std::size_t edge_b) const {
  const auto& [a0, a1] = pairs[edge_a];
  const auto& [b0, b1] = pairs[edge_b];
  return a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1;
}

bool ConnectionMap::incident(std::size_t edge, std::size_t node) const {
  return pairs[edge].first == node || pairs[edge].second == node;
}

std::vector<Node> nodes_from(const ParameterVector& p, const ConnectionMap& conn) {
  std::vector<Node> nodes(kNodeCount);
  for (int i = 1; i <= 6; ++i) nodes[static_cast<std::size_t>(i - 1)] = {p.x(i), p.y(i), p.r(i)};
  nodes[6] = {p.x(7), conn.ground_y, p.r(7)};
  nodes[7] = conn.feed;
  return nodes;
}

Trapezoid connect_nodes(const Node& a, const Node& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0)) throw GeometryError("connected nodes have coincident centers");
  const double nx = -dy / len, ny = dx / len;
  return {Point{a.x + a.r * nx, a.y + a.r * ny}, Point{b.x + b.r * nx, b.y + b.r * ny},
          Point{b.x - b.r * nx, b.y - b.r * ny}, Point{a.x - a.r * nx, a.y - a.r * ny}};
}

AntennaLayout build_layout(std::span<const Node> nodes, const ConnectionMap& conn) {
  conn.validate();
  if (nodes.size() != conn.node_count) throw std::invalid_argument("node table size mismatch");
  AntennaLayout layout;
  layout.discs.assign(nodes.begin(), nodes.end());
  layout.trapezoids.reserve(conn.pairs.size());
  for (const auto& [a, b] : conn.pairs) layout.trapezoids.push_back(connect_nodes(nodes[a], nodes[b]));
  return layout;
}

AntennaLayout build_layout(const ParameterVector& params, const ConnectionMap& conn) {
  const auto nodes = nodes_from(params, conn);
  return build_layout(nodes, conn);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = sign(cross(a, b, c)), o2 = sign(cross(a, b, d));
  const int o3 = sign(cross(c, d, a)), o4 = sign(cross(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double distance_to_convex(Point p, std::span<const Point> poly) {
  const std::size_t n = poly.size();
  bool pos = false, neg = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i], b = poly[(i + 1) % n];
    const double c = cross(a, b, p);
    pos |= c > 0.0;
    neg |= c < 0.0;
    best = std::min(best, point_segment_distance(p, a, b));
  }
  if (!(pos && neg)) return 0.0;
  return best;
}

GeometryVerdict check_geometry(std::span<const Node> nodes, const ConnectionMap& conn) {
  conn.validate();
  if (nodes.size() != conn.node_count) throw std::invalid_argument("node table size mismatch");
  const std::size_t edges = conn.pairs.size();

  std::vector<Trapezoid> traps;
  traps.reserve(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    const auto& [a, b] = conn.pairs[e];
    if (nodes[a].x == nodes[b].x && nodes[a].y == nodes[b].y)
      return {GeometryFault::degenerate,
              fmt::format("nodes {} and {} coincide", a + 1, b + 1)};
    traps.push_back(connect_nodes(nodes[a], nodes[b]));
  }

  for (std::size_t e = 0; e < edges; ++e) {
    for (std::size_t f = e + 1; f < edges; ++f) {
      if (conn.adjacent(e, f)) continue;
      const auto& [a, b] = conn.pairs[e];
      const auto& [c, d] = conn.pairs[f];
      if (segments_intersect(nodes[a].center(), nodes[b].center(), nodes[c].center(),
                             nodes[d].center()))
        return {GeometryFault::crossing,
                fmt::format("connections {}-{} and {}-{} cross", a + 1, b + 1, c + 1, d + 1)};
    }
  }

  const bool has_ground = conn.ground_node < conn.node_count;
  const bool has_feed = conn.feed_node < conn.node_count;
  for (std::size_t e = 0; e < edges; ++e) {
    const auto& [a, b] = conn.pairs[e];
    if (has_ground && !conn.incident(e, conn.ground_node)) {
      for (const auto& v : traps[e]) {
        if (v.y <= conn.ground_y)
          return {GeometryFault::short_circuit,
                  fmt::format("connection {}-{} reaches the ground plane", a + 1, b + 1)};
      }
    }
    if (has_feed && !conn.incident(e, conn.feed_node)) {
      const Node& feed = nodes[conn.feed_node];
      if (distance_to_convex(feed.center(), traps[e]) < feed.r)
        return {GeometryFault::short_circuit,
                fmt::format("connection {}-{} overlaps the feed", a + 1, b + 1)};
    }
  }
  return {};
}

GeometryVerdict check_geometry(const ParameterVector& params, const ConnectionMap& conn) {
  const auto nodes = nodes_from(params, conn);
  return check_geometry(nodes, conn);
}

ParameterVector sample_random(const ParameterRanges& ranges, std::mt19937_64& rng) {
  ParameterVector p;
  for (std::size_t i = 0; i < kParameterCount; ++i) {
    std::uniform_real_distribution<double> u(ranges[i].lo, ranges[i].hi);
    p[i] = u(rng);
  }
  return p;
}

ParameterVector sample_random(const ParameterRanges& ranges, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_random(ranges, rng);
}

ParameterVector sample_valid(const ParameterRanges& ranges, const ConnectionMap& conn,
                             std::mt19937_64& rng, std::size_t max_draws) {
  for (std::size_t i = 0; i < max_draws; ++i) {
    auto p = sample_random(ranges, rng);
    if (check_geometry(p, conn)) return p;
  }
  throw GeometryError("no geometry passed the checker within the draw limit");
}

std::string layouts_to_svg(std::span<const AntennaLayout> layouts, std::size_t columns) {
  // Cell in mm: x in [-32, 32], y in [-2, 12].
  constexpr double kW = 64.0, kH = 14.0, kPad = 2.0;
  columns = std::max<std::size_t>(columns, 1);
  const std::size_t rows = (layouts.size() + columns - 1) / columns;
  const double width = static_cast<double>(columns) * (kW + kPad);
  const double height = static_cast<double>(std::max<std::size_t>(rows, 1)) * (kH + kPad);
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}mm\" "
      "height=\"{}mm\">\n",
      width, height, width, height);
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    const double ox = static_cast<double>(k % columns) * (kW + kPad) + kW / 2.0;
    const double oy = static_cast<double>(k / columns) * (kH + kPad) + 12.0;
    out += fmt::format("<g class=\"antenna\" id=\"antenna-{}\" transform=\"translate({} {}) scale(1 -1)\">\n",
                       k, ox, oy);
    out += fmt::format("<rect x=\"-32\" y=\"-2\" width=\"64\" height=\"2\" fill=\"#bbb\"/>\n");
    std::string d;
    for (const auto& t : layouts[k].trapezoids) {
      d += fmt::format("M{:.4f},{:.4f}L{:.4f},{:.4f}L{:.4f},{:.4f}L{:.4f},{:.4f}Z", t[0].x, t[0].y,
                       t[1].x, t[1].y, t[2].x, t[2].y, t[3].x, t[3].y);
    }
    out += fmt::format("<path d=\"{}\" fill=\"#c87533\"/>\n", d);
    for (const auto& n : layouts[k].discs)
      out += fmt::format("<circle cx=\"{:.4f}\" cy=\"{:.4f}\" r=\"{:.4f}\" fill=\"#c87533\"/>\n",
                         n.x, n.y, n.r);
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string layout_to_json(const AntennaLayout& layout) {
  std::string out = "[";
  for (std::size_t i = 0; i < layout.trapezoids.size(); ++i) {
    const auto& t = layout.trapezoids[i];
    out += fmt::format("{}[[{},{}],[{},{}],[{},{}],[{},{}]]", i ? "," : "", t[0].x, t[0].y,
                       t[1].x, t[1].y, t[2].x, t[2].y, t[3].x, t[3].y);
  }
  out += "]";
  return out;
}

}  // namespace antgen
