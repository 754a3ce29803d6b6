#pragma once

/// @file geometry.hpp
/// @brief Masked Cartesian grids over bounded domains, balls and chains.
///
/// A DomainMask discretizes a bounded open set in R^2 or R^3 as a node
/// lattice with spacing h. A node is interior iff its coordinates satisfy
/// the shape's analytic inequality strictly; the bounding box keeps at
/// least one non-interior node of margin on every side so stencils never
/// leave the array. All downstream quadrature uses the midpoint weight h^N
/// per interior node.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace plate {

using Point = std::array<double, 3>;

double dist(const Point& a, const Point& b);

enum class ShapeTag { rectangle, disk, annulus, l_shape, dumbbell, custom };

std::string to_string(ShapeTag tag);

struct Ball {
  Point center{};
  double radius = 0.0;
};

struct DomainMask {
  int dim = 2;
  double h = 0.0;
  std::array<int, 3> extents{1, 1, 1};
  Point origin{};
  ShapeTag shape_tag = ShapeTag::custom;
  /// Diameter surrogate: max pairwise distance between interior node
  /// centers plus one cell size h (the cells have extent, the centers
  /// do not).
  double diameter = 0.0;

  std::vector<std::uint8_t> interior;  // per node, 0/1
  std::vector<int> compact_id;         // node id -> interior id, or -1
  std::vector<int> cells;              // interior id -> node id
  std::vector<double> cell_dist;       // interior id -> interior_distance
  std::vector<int> wall;               // non-interior nodes with an interior face neighbor

  int node_id(int i, int j, int k) const {
    return (k * extents[1] + j) * extents[0] + i;
  }
  std::array<int, 3> node_coords(int id) const {
    const int i = id % extents[0];
    const int j = (id / extents[0]) % extents[1];
    const int k = id / (extents[0] * extents[1]);
    return {i, j, k};
  }
  Point node_point(int id) const {
    const auto c = node_coords(id);
    return {origin[0] + c[0] * h, origin[1] + c[1] * h,
            dim == 3 ? origin[2] + c[2] * h : 0.0};
  }
  bool in_grid(int i, int j, int k) const {
    return i >= 0 && i < extents[0] && j >= 0 && j < extents[1] && k >= 0 &&
           k < extents[2];
  }
  bool is_interior(int i, int j, int k) const {
    return in_grid(i, j, k) && interior[node_id(i, j, k)] != 0;
  }
  std::size_t interior_count() const { return cells.size(); }
  /// Interior node nearest to p, or -1 if p falls outside the mask.
  int cell_at(const Point& p) const;
  double volume() const;
  double max_interior_distance() const;
};

struct ShapeSpec {
  ShapeTag tag = ShapeTag::rectangle;
  int dim = 2;
  double h = 0.0;
  std::array<double, 3> extent{0, 0, 0};                 // rectangle
  double radius = 0.0;                                   // disk
  double radius_inner = 0.0, radius_outer = 0.0;         // annulus
  double side = 0.0;                                     // l_shape
  double lobe = 0.0;                                     // dumbbell lobe side
  double corridor_length = 0.0, corridor_width = 0.0;    // dumbbell corridor
  std::function<bool(const Point&)> inside;              // custom
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};        // custom bounding box
};

/// Throws std::invalid_argument "degenerate domain" when no interior node
/// survives and "resolution too coarse" when h cannot resolve the thinnest
/// feature of the shape.
DomainMask build_domain(const ShapeSpec& spec);

DomainMask make_rectangle(std::array<double, 3> extent, double h, int dim = 2);
DomainMask make_disk(double radius, double h, int dim = 2);
DomainMask make_annulus(double radius_inner, double radius_outer, double h,
                        int dim = 2);
DomainMask make_lshape(double side, double h, int dim = 2);
DomainMask make_dumbbell(double lobe, double corridor_length,
                         double corridor_width, double h, int dim = 2);

/// Distance from p to the nearest non-interior node center, minus h/2,
/// clamped at zero. Zero on and outside the masked boundary.
double interior_distance(const DomainMask& mask, const Point& p);

/// Interior ids of nodes within radius of the ball center, ascending.
/// Throws when the ball pokes outside the domain ("ball not contained in
/// domain") so level statistics never silently truncate.
std::vector<int> ball_cells(const DomainMask& mask, const Ball& ball);

/// Same lookup without the containment requirement; used by geometry
/// predicates that probe arbitrary balls.
std::vector<int> ball_cells_clipped(const DomainMask& mask, const Ball& ball);

struct ChainReport {
  std::vector<Point> centers;
  double radius = 0.0;
  int length = 0;  // number of hops, centers.size() - 1
};

/// Chain of overlapping balls of radius r joining a to b inside the mask.
/// Consecutive centers are at distance <= r - h, so consecutive balls
/// overlap on a fixed fraction. Straight segment when the segment stays
/// r-deep, otherwise a breadth-first route through {interior_distance > r};
/// throws "chain not constructible at this radius" when no route exists.
ChainReport chain_of_balls(const DomainMask& mask, const Point& a,
                           const Point& b, double r);

/// True iff every boundary-adjacent interior node lies within r0 of some
/// interior node whose interior_distance is at least r0, both up to one
/// cell of lattice slack.
bool check_interior_sphere(const DomainMask& mask, double r0);

}  // namespace plate
