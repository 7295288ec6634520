#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace uavnoma::oracle {

std::vector<ChannelRow> read_channel_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open golden table " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("d3d,h,fc_ghz,fading,d0,p_los", 0) != 0) throw std::runtime_error(path + ":1: bad header");
  std::vector<ChannelRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      char* end = nullptr;
      const double d = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      v.push_back(d);
    }
    if (v.size() != 10) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 10 columns");
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
  }
  return rows;
}

double relative_error(double got, double want, double floor) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max({std::abs(want), std::abs(got), floor});
}

std::vector<NomaUserResult> noma_bruteforce(const NomaCase& c) {
  std::vector<NomaUserResult> out(static_cast<std::size_t>(c.num_users));
  // Transmitted power of each UAV: sum of its users' shares.
  std::vector<double> tx(static_cast<std::size_t>(c.num_uavs), 0.0);
  for (int k = 0; k < c.num_users; ++k) tx[c.serving[k]] += c.fraction[k] * c.uav_power[c.serving[k]];

  std::vector<double> inter(static_cast<std::size_t>(c.num_users), 0.0);
  for (int k = 0; k < c.num_users; ++k) {
    for (int s = 0; s < c.num_uavs; ++s) {
      if (s != c.serving[k]) inter[k] += c.g[s][k] * std::sqrt(tx[s]);
    }
    out[k].G = c.g[c.serving[k]][k] / (inter[k] + c.noise);
  }
  for (int u = 0; u < c.num_uavs; ++u) {
    std::vector<int> members;
    for (int k = 0; k < c.num_users; ++k) {
      if (c.serving[k] == u) members.push_back(k);
    }
    // Selection sort by (G, id), written out rather than using std::sort.
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::size_t best = i;
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const int a = members[j], b = members[best];
        if (out[a].G < out[b].G || (out[a].G == out[b].G && a < b)) best = j;
      }
      std::swap(members[i], members[best]);
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int k = members[i];
      double intra = 0.0;
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const int m = members[j];
        intra += c.g[u][m] * std::sqrt(c.fraction[m] * c.uav_power[u]);
      }
      const double signal = c.g[u][k] * std::sqrt(c.fraction[k] * c.uav_power[u]);
      out[k].sinr = signal / (intra + inter[k] + c.noise);
      out[k].rate = c.bandwidth * std::log(1.0 + out[k].sinr) / std::log(2.0);
      out[k].position = static_cast<int>(i);
    }
  }
  return out;
}

NomaCase random_noma_case(std::uint64_t seed, int max_uavs, int max_cluster) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nu(1, max_uavs);
  NomaCase c;
  c.num_uavs = nu(rng);
  std::uniform_int_distribution<int> size(0, max_cluster);
  std::vector<int> sizes;
  int total = 0;
  for (int u = 0; u < c.num_uavs; ++u) {
    sizes.push_back(size(rng));
    total += sizes.back();
  }
  if (total == 0) {
    sizes[0] = 1;
    total = 1;
  }
  c.num_users = total;
  for (int u = 0; u < c.num_uavs; ++u) {
    for (int i = 0; i < sizes[u]; ++i) c.serving.push_back(u);
  }
  std::shuffle(c.serving.begin(), c.serving.end(), rng);
  std::uniform_real_distribution<double> logg(-13.0, -7.0);
  c.g.assign(c.num_uavs, std::vector<double>(c.num_users));
  for (auto& row : c.g) {
    for (auto& x : row) x = std::pow(10.0, logg(rng));
  }
  std::uniform_real_distribution<double> pw(0.05, 1.0);
  for (int u = 0; u < c.num_uavs; ++u) c.uav_power.push_back(pw(rng));
  c.fraction.assign(c.num_users, 0.0);
  std::uniform_real_distribution<double> raw(0.05, 1.0);
  for (int u = 0; u < c.num_uavs; ++u) {
    double sum = 0.0;
    for (int k = 0; k < c.num_users; ++k) {
      if (c.serving[k] == u) sum += (c.fraction[k] = raw(rng));
    }
    for (int k = 0; k < c.num_users; ++k) {
      if (c.serving[k] == u) c.fraction[k] /= sum;
    }
  }
  c.noise = std::pow(10.0, std::uniform_real_distribution<double>(-11.0, -8.0)(rng));
  c.bandwidth = 15000.0;
  return c;
}

double partition_sse(const std::vector<Pt>& users, const std::vector<Pt>& uavs,
                     const std::vector<int>& assign, double user_w, double uav_w) {
  double total = 0.0;
  for (std::size_t u = 0; u < uavs.size(); ++u) {
    double sx = uav_w * uavs[u].x, sy = uav_w * uavs[u].y, sw = uav_w;
    for (std::size_t k = 0; k < users.size(); ++k) {
      if (assign[k] == static_cast<int>(u)) {
        sx += user_w * users[k].x;
        sy += user_w * users[k].y;
        sw += user_w;
      }
    }
    const double cx = sx / sw, cy = sy / sw;
    total += uav_w * ((uavs[u].x - cx) * (uavs[u].x - cx) + (uavs[u].y - cy) * (uavs[u].y - cy));
    for (std::size_t k = 0; k < users.size(); ++k) {
      if (assign[k] == static_cast<int>(u)) {
        total += user_w * ((users[k].x - cx) * (users[k].x - cx) + (users[k].y - cy) * (users[k].y - cy));
      }
    }
  }
  return total;
}

double exhaustive_min_sse(const std::vector<Pt>& users, const std::vector<Pt>& uavs, int cap,
                          double user_w, double uav_w) {
  const int n = static_cast<int>(users.size());
  const int m = static_cast<int>(uavs.size());
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<int> count(static_cast<std::size_t>(m), 0);
    bool ok = true;
    for (int a : assign) ok = ok && ++count[a] <= cap;
    if (ok) best = std::min(best, partition_sse(users, uavs, assign, user_w, uav_w));
    int i = 0;
    while (i < n && ++assign[i] == m) assign[i++] = 0;
    if (i == n) break;
  }
  return best;
}

int min_repair_moves(const std::vector<int>& sizes, int cap) {
  int moves = 0;
  for (int s : sizes) moves += std::max(0, s - cap);
  return moves;
}

PathAnswer bruteforce_path(const Grid& g, std::pair<int, int> from, std::pair<int, int> to) {
  PathAnswer best;
  best.time = std::numeric_limits<double>::infinity();
  std::vector<char> seen(static_cast<std::size_t>(g.w * g.h), 0);
  std::vector<std::pair<int, int>> path{from};
  seen[static_cast<std::size_t>(from.second * g.w + from.first)] = 1;
  std::function<void(double)> dfs = [&](double t) {
    if (t > best.time + 1e-9) return;
    const auto cur = path.back();
    if (cur == to) {
      if (t < best.time - 1e-9 || (std::abs(t - best.time) <= 1e-9 && path < best.cells)) {
        best.time = t;
        best.cells = path;
        best.reachable = true;
      }
      return;
    }
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int x = cur.first + dx[d], y = cur.second + dy[d];
      if (x < 0 || y < 0 || x >= g.w || y >= g.h) continue;
      const auto idx = static_cast<std::size_t>(y * g.w + x);
      if (seen[idx] || g.at(x, y) <= 0.0) continue;
      seen[idx] = 1;
      path.push_back({x, y});
      dfs(t + g.cell / g.at(x, y));
      path.pop_back();
      seen[idx] = 0;
    }
  };
  if (g.at(from.first, from.second) > 0.0 && g.at(to.first, to.second) > 0.0) dfs(0.0);
  return best;
}

}  // namespace uavnoma::oracle
