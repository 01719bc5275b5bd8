#pragma once

// Connecting-nodes planar antenna parameterization.
//
// Eight nodes on a plane are joined by trapezoids. Nodes 1..6 and the ground
// node 7 carry free parameters; node 8 is the fixed feed. The 20 free values
// are stored in canonical order X1..X7, Y1..Y6, R1..R7 (mm).

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace antgen {

inline constexpr std::size_t kParameterCount = 20;
inline constexpr std::size_t kNodeCount = 8;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Node {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;

  Point center() const { return {x, y}; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(const std::array<double, kParameterCount>& values) : values_(values) {}
  static ParameterVector from_span(std::span<const double> values);

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  // 1-based node accessors: x(1..7), y(1..6), r(1..7).
  double x(int node) const { return values_[static_cast<std::size_t>(node - 1)]; }
  double y(int node) const { return values_[static_cast<std::size_t>(6 + node)]; }
  double r(int node) const { return values_[static_cast<std::size_t>(12 + node)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  static std::string_view name(std::size_t i);

  bool operator==(const ParameterVector&) const = default;

 private:
  std::array<double, kParameterCount> values_{};
};

class ParameterRanges {
 public:
  // Throws std::invalid_argument unless lo < hi and both are finite.
  explicit ParameterRanges(const std::array<Interval, kParameterCount>& bounds);

  // X1 [-30,-15], X2 [-15,-5], X3 [-5,0], X4 [0,5], X5 [5,15], X6 [15,30],
  // X7 [-30,0], Y1..6 [3,10], R1..7 [0.1,1.5].
  static ParameterRanges defaults();

  const Interval& operator[](std::size_t i) const { return bounds_[i]; }
  std::span<const Interval> bounds() const { return bounds_; }

  bool contains(const ParameterVector& p) const;
  double to_unit(std::size_t i, double v) const {
    return (v - bounds_[i].lo) / bounds_[i].width();
  }
  double from_unit(std::size_t i, double u) const {
    return bounds_[i].lo + u * bounds_[i].width();
  }
  ParameterVector clamp(const ParameterVector& p) const;
  ParameterVector midpoint() const;

 private:
  std::array<Interval, kParameterCount> bounds_;
};

// Undirected node connections (0-based indices) plus the fixed-node table.
struct ConnectionMap {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t node_count = kNodeCount;
  std::size_t ground_node = 6;  // node 7, Y fixed
  std::size_t feed_node = 7;    // node 8, fully fixed
  double ground_y = 0.0;
  Node feed{0.0, 1.5, 0.5};

  // Pairs 1-2, 2-3, 3-4, 4-5, 5-6, 3-7, 4-8 (written 1-based).
  static ConnectionMap defaults();

  // Throws std::invalid_argument on out-of-range or self-loop pairs.
  void validate() const;
  bool adjacent(std::size_t edge_a, std::size_t edge_b) const;
  bool incident(std::size_t edge, std::size_t node) const;
};

// Node table for the default eight-node scheme.
std::vector<Node> nodes_from(const ParameterVector& params, const ConnectionMap& conn);

using Trapezoid = std::array<Point, 4>;

struct AntennaLayout {
  std::vector<Trapezoid> trapezoids;  // one per connection, same order as the map
  std::vector<Node> discs;
};

// Perpendicular-chord trapezoid between two discs: the parallel sides have
// lengths 2*a.r and 2*b.r and are perpendicular to the center segment.
// Throws GeometryError when the centers coincide.
Trapezoid connect_nodes(const Node& a, const Node& b);

AntennaLayout build_layout(std::span<const Node> nodes, const ConnectionMap& conn);
AntennaLayout build_layout(const ParameterVector& params, const ConnectionMap& conn);

enum class GeometryFault { none, crossing, short_circuit, degenerate };

struct GeometryVerdict {
  GeometryFault fault = GeometryFault::none;
  std::string reason;

  bool ok() const { return fault == GeometryFault::none; }
  explicit operator bool() const { return ok(); }
};

// Rejects layouts whose non-adjacent center segments cross, whose
// non-ground trapezoids reach the ground half-plane y <= ground_y, or whose
// trapezoids overlap the feed disc without being connected to the feed.
GeometryVerdict check_geometry(std::span<const Node> nodes, const ConnectionMap& conn);
GeometryVerdict check_geometry(const ParameterVector& params, const ConnectionMap& conn);

// Closed-segment intersection using orientation predicates.
bool segments_intersect(Point a, Point b, Point c, Point d);

// Minimum distance from p to the boundary-or-interior of a convex polygon
// (0 when p is inside).
double distance_to_convex(Point p, std::span<const Point> polygon);

ParameterVector sample_random(const ParameterRanges& ranges, std::mt19937_64& rng);
ParameterVector sample_random(const ParameterRanges& ranges, std::uint64_t seed);

// Rejection-samples until the geometric checker passes. Throws GeometryError
// after max_draws failures.
ParameterVector sample_valid(const ParameterRanges& ranges, const ConnectionMap& conn,
                             std::mt19937_64& rng, std::size_t max_draws = 100000);

// Gallery of layouts laid out on a grid; one <g class="antenna"> per layout.
std::string layouts_to_svg(std::span<const AntennaLayout> layouts, std::size_t columns = 10);

// [[ [x,y] x4 ] per trapezoid] as compact JSON text.
std::string layout_to_json(const AntennaLayout& layout);

}  // namespace antgen
