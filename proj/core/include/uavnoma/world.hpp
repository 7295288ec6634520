#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavnoma {

/// Integer lattice coordinate of a map cell.
struct Cell {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Continuous ground-plane position in meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

using Route = std::vector<Cell>;

class InvalidCellError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MapOptions {
  double cell_size = 40.0;  // meters
  double v_max = 10.0;      // m/s
  int block_size = 5;       // building block edge in cells; roads are 1 cell wide
  /// Probability that a block is collapsed rubble (passable) instead of a building.
  double open_block_probability = 0.1;
  /// Upper bound of C_xy as a fraction of v_max.
  double max_cost_fraction = 0.7;
};

/// Occupancy/speed-cost lattice of the service area. Immutable after construction
/// apart from the explicit editing helpers used by scenario and test setup.
class GridMap {
 public:
  GridMap(int width, int height, double cell_size, double v_max, Cell origin);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  double v_max() const { return v_max_; }
  double max_cost() const { return max_cost_fraction_ * v_max_; }
  Cell origin() const { return origin_; }

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool blocked(Cell c) const { return blocked_[index(c)] != 0; }
  double speed_cost(Cell c) const { return cost_[index(c)]; }
  /// V_u = V_max - C_xy on this cell.
  double speed(Cell c) const { return v_max_ - cost_[index(c)]; }

  void set_blocked(Cell c, bool value);
  void set_speed_cost(Cell c, double cost);
  void set_origin(Cell c);
  void set_max_cost_fraction(double f) { max_cost_fraction_ = f; }

  /// Cell containing a ground position; positions on the far edge clamp inward.
  Cell cell_at(Vec2 p) const;
  Vec2 center(Cell c) const;
  double extent_x() const { return width_ * cell_size_; }
  double extent_y() const { return height_ * cell_size_; }

  /// Unblocked cells on the outer border, in lexicographic order.
  std::vector<Cell> perimeter_road_cells() const;

  /// One character per cell, rows from y = height-1 down to 0: '#' blocked,
  /// otherwise the cost decile 0..9 of C_xy relative to max_cost().
  std::string to_text() const;
  /// Inverse of to_text(); digit d maps to cost d/10 * max_cost(). Origin is
  /// marked by the optional trailing line "origin x y".
  static GridMap from_text(const std::string& text, double cell_size, double v_max);

  std::size_t index(Cell c) const;

 private:
  int width_;
  int height_;
  double cell_size_;
  double v_max_;
  double max_cost_fraction_ = 0.7;
  Cell origin_;
  std::vector<std::uint8_t> blocked_;
  std::vector<double> cost_;
};

/// Manhattan lattice of building blocks separated by one-cell roads. Costs are
/// U(0, 0.7 v_max) per road cell. The origin is the road intersection nearest
/// the map center.
GridMap build_map(int width, int height, std::uint64_t block_layout_seed,
                  std::uint64_t cost_seed, const MapOptions& options = {});

/// Minimum travel-time route between two unblocked cells (4-neighbourhood, edge
/// weight = cell_size / V_u of the entered cell). Among equal-time routes the
/// lexicographically smallest cell sequence is returned.
/// Throws InvalidCellError for out-of-map or blocked endpoints and
/// UnreachableError when no route exists.
Route shortest_path(const GridMap& map, Cell from, Cell to);

/// Total travel time of a route under the entered-cell edge weight.
double route_travel_time(const GridMap& map, const Route& route);

struct UserState {
  int id = 0;
  Vec2 position;
  Route route;
  /// Index of the route cell whose center the user last passed.
  std::size_t segment = 0;
  /// Distance travelled from route[segment] toward route[segment + 1].
  double offset = 0.0;
  double v_max = 10.0;
  Cell destination;

  bool arrived() const { return route.empty() || segment + 1 >= route.size(); }
};

/// Places a user at the center of `route.front()`.
UserState make_user(int id, const GridMap& map, Route route);

/// Moves the user along its route for dt seconds, integrating the piecewise
/// constant speed of each occupied cell exactly. Arrived users hold position.
UserState advance_user(UserState user, const GridMap& map, double dt_seconds);

}  // namespace uavnoma
