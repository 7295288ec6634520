#include "uavnoma/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace uavnoma {

namespace {

constexpr std::array<Cell, 4> kSteps{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};

// Neighbours in lexicographic (x, y) order.
std::vector<Cell> open_neighbours(const GridMap& map, Cell c) {
  std::vector<Cell> out;
  out.reserve(4);
  for (const Cell& d : kSteps) {
    Cell n{c.x + d.x, c.y + d.y};
    if (map.contains(n) && !map.blocked(n)) out.push_back(n);
  }
  return out;
}

double entry_time(const GridMap& map, Cell c) { return map.cell_size() / map.speed(c); }

}  // namespace

GridMap::GridMap(int width, int height, double cell_size, double v_max, Cell origin)
    : width_(width), height_(height), cell_size_(cell_size), v_max_(v_max), origin_(origin) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("map must have positive area");
  if (!(cell_size > 0.0) || !(v_max > 0.0)) {
    throw std::invalid_argument("cell size and v_max must be positive");
  }
  if (!contains(origin)) throw InvalidCellError("origin outside map");
  blocked_.assign(static_cast<std::size_t>(width) * height, 0);
  cost_.assign(blocked_.size(), 0.0);
}

std::size_t GridMap::index(Cell c) const {
  if (!contains(c)) throw InvalidCellError("cell outside map");
  return static_cast<std::size_t>(c.y) * width_ + c.x;
}

void GridMap::set_blocked(Cell c, bool value) {
  if (value && c == origin_) throw InvalidCellError("origin cell cannot be blocked");
  blocked_[index(c)] = value ? 1 : 0;
  if (value) cost_[index(c)] = 0.0;
}

void GridMap::set_speed_cost(Cell c, double cost) {
  if (!(cost >= 0.0) || cost > max_cost() * (1.0 + 1e-12)) {
    throw std::invalid_argument("speed cost outside [0, max_cost]");
  }
  cost_[index(c)] = cost;
}

void GridMap::set_origin(Cell c) {
  if (blocked(c)) throw InvalidCellError("origin cell is blocked");
  origin_ = c;
}

Cell GridMap::cell_at(Vec2 p) const {
  int cx = static_cast<int>(std::floor(p.x / cell_size_));
  int cy = static_cast<int>(std::floor(p.y / cell_size_));
  return {std::clamp(cx, 0, width_ - 1), std::clamp(cy, 0, height_ - 1)};
}

Vec2 GridMap::center(Cell c) const {
  return {(c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_};
}

std::vector<Cell> GridMap::perimeter_road_cells() const {
  std::vector<Cell> out;
  for (int x = 0; x < width_; ++x) {
    for (int y = 0; y < height_; ++y) {
      bool edge = x == 0 || y == 0 || x == width_ - 1 || y == height_ - 1;
      if (edge && !blocked({x, y})) out.push_back({x, y});
    }
  }
  return out;
}

std::string GridMap::to_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(width_ + 1) * height_);
  const double cmax = max_cost();
  for (int y = height_ - 1; y >= 0; --y) {
    for (int x = 0; x < width_; ++x) {
      Cell c{x, y};
      if (blocked(c)) {
        out.push_back('#');
      } else {
        int decile = cmax > 0.0 ? static_cast<int>(std::floor(10.0 * speed_cost(c) / cmax)) : 0;
        out.push_back(static_cast<char>('0' + std::clamp(decile, 0, 9)));
      }
    }
    out.push_back('\n');
  }
  return out;
}

GridMap GridMap::from_text(const std::string& text, double cell_size, double v_max) {
  std::istringstream in(text);
  std::vector<std::string> rows;
  std::optional<Cell> origin;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("origin", 0) == 0) {
      std::istringstream os(line.substr(6));
      Cell c;
      if (!(os >> c.x >> c.y)) throw std::invalid_argument("malformed origin line");
      origin = c;
      continue;
    }
    rows.push_back(line);
  }
  if (rows.empty()) throw std::invalid_argument("empty map text");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != width) throw std::invalid_argument("ragged map text");
  }
  GridMap map(width, height, cell_size, v_max, {0, 0});
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      char ch = rows[row][x];
      if (ch == '#') {
        map.blocked_[map.index({x, y})] = 1;
      } else if (ch >= '0' && ch <= '9') {
        map.cost_[map.index({x, y})] = (ch - '0') / 10.0 * map.max_cost();
      } else {
        throw std::invalid_argument(std::string("unexpected map character '") + ch + "'");
      }
    }
  }
  if (origin) {
    map.set_origin(*origin);
  } else {
    // First unblocked cell in lexicographic order.
    for (int x = 0; x < width && !origin; ++x) {
      for (int y = 0; y < height; ++y) {
        if (!map.blocked({x, y})) {
          origin = Cell{x, y};
          break;
        }
      }
    }
    if (!origin) throw std::invalid_argument("map has no open cell");
    map.set_origin(*origin);
  }
  return map;
}

GridMap build_map(int width, int height, std::uint64_t block_layout_seed, std::uint64_t cost_seed,
                  const MapOptions& options) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("zero-area map");
  if (width < 3 || height < 3) throw std::invalid_argument("map must be at least 3x3");
  if (options.block_size < 1) throw std::invalid_argument("block size must be >= 1");

  const int pitch = options.block_size + 1;
  auto is_road_line = [&](int v) { return v % pitch == 0; };

  // Intersection nearest the geometric center.
  Cell origin{0, 0};
  double best = std::numeric_limits<double>::infinity();
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  for (int x = 0; x < width; x += pitch) {
    for (int y = 0; y < height; y += pitch) {
      double d = std::hypot(x - cx, y - cy);
      if (d < best - 1e-12) {
        best = d;
        origin = {x, y};
      }
    }
  }

  GridMap map(width, height, options.cell_size, options.v_max, origin);
  map.set_max_cost_fraction(options.max_cost_fraction);

  std::mt19937_64 layout_rng(block_layout_seed);
  std::bernoulli_distribution open_block(options.open_block_probability);
  const int blocks_x = (width + pitch - 1) / pitch;
  const int blocks_y = (height + pitch - 1) / pitch;
  std::vector<bool> open(static_cast<std::size_t>(blocks_x) * blocks_y);
  for (std::size_t i = 0; i < open.size(); ++i) open[i] = open_block(layout_rng);

  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      if (is_road_line(x) || is_road_line(y)) continue;
      if (open[static_cast<std::size_t>(y / pitch) * blocks_x + x / pitch]) continue;
      map.set_blocked({x, y}, true);
    }
  }

  std::mt19937_64 cost_rng(cost_seed);
  std::uniform_real_distribution<double> cost(0.0, map.max_cost());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!map.blocked({x, y})) map.set_speed_cost({x, y}, cost(cost_rng));
    }
  }
  return map;
}

Route shortest_path(const GridMap& map, Cell from, Cell to) {
  if (!map.contains(from) || !map.contains(to)) throw InvalidCellError("route endpoint outside map");
  if (map.blocked(from) || map.blocked(to)) throw InvalidCellError("route endpoint is blocked");
  if (from == to) return {from};

  // Reverse Dijkstra: time-to-target for every cell.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(map.width()) * map.height(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[map.index(to)] = 0.0;
  open.push({0.0, map.index(to)});
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    Cell v{static_cast<int>(idx % map.width()), static_cast<int>(idx / map.width())};
    const double w = entry_time(map, v);
    for (Cell u : open_neighbours(map, v)) {
      double cand = d + w;
      std::size_t ui = map.index(u);
      if (cand < dist[ui]) {
        dist[ui] = cand;
        open.push({cand, ui});
      }
    }
  }
  if (!std::isfinite(dist[map.index(from)])) throw UnreachableError("destination unreachable");

  Route route{from};
  Cell cur = from;
  while (cur != to) {
    const double here = dist[map.index(cur)];
    const double tol = 1e-9 * std::max(1.0, here);
    bool advanced = false;
    for (Cell n : open_neighbours(map, cur)) {
      if (std::abs(entry_time(map, n) + dist[map.index(n)] - here) <= tol) {
        route.push_back(n);
        cur = n;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw UnreachableError("route reconstruction failed");
  }
  return route;
}

double route_travel_time(const GridMap& map, const Route& route) {
  double t = 0.0;
  for (std::size_t i = 1; i < route.size(); ++i) t += entry_time(map, route[i]);
  return t;
}

UserState make_user(int id, const GridMap& map, Route route) {
  if (route.empty()) throw std::invalid_argument("user route is empty");
  UserState u;
  u.id = id;
  u.position = map.center(route.front());
  u.destination = route.back();
  u.v_max = map.v_max();
  u.route = std::move(route);
  return u;
}

UserState advance_user(UserState user, const GridMap& map, double dt_seconds) {
  if (!(dt_seconds > 0.0)) throw std::invalid_argument("dt must be positive");
  const double cs = map.cell_size();
  const double half = 0.5 * cs;
  double remaining = dt_seconds;
  while (remaining > 0.0 && !user.arrived()) {
    const bool first_half = user.offset < half;
    const Cell occupied = first_half ? user.route[user.segment] : user.route[user.segment + 1];
    const double boundary = first_half ? half : cs;
    const double v = map.speed(occupied);
    const double needed = (boundary - user.offset) / v;
    if (needed <= remaining) {
      remaining -= needed;
      user.offset = boundary;
      if (user.offset >= cs) {
        ++user.segment;
        user.offset = 0.0;
      }
    } else {
      user.offset += v * remaining;
      remaining = 0.0;
    }
  }
  if (user.arrived()) {
    user.segment = user.route.empty() ? 0 : user.route.size() - 1;
    user.offset = 0.0;
    if (!user.route.empty()) user.position = map.center(user.route.back());
    return user;
  }
  const Vec2 a = map.center(user.route[user.segment]);
  const Vec2 b = map.center(user.route[user.segment + 1]);
  const double f = user.offset / cs;
  user.position = {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
  return user;
}

}  // namespace uavnoma
