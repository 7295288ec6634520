#include "uavnoma/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace uavnoma {

namespace {

double dist2(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

int nearest(Vec2 p, std::span<const Vec2> centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    double d = dist2(p, centroids[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

Association ClusterSet::association() const {
  return Association(num_clusters(), static_cast<int>(users.size()), members);
}

void ClusterSet::recompute_centroids() {
  centroids.resize(members.size());
  for (std::size_t u = 0; u < members.size(); ++u) {
    double wx = uav_weight * uavs[u].x;
    double wy = uav_weight * uavs[u].y;
    double w = uav_weight;
    for (int k : members[u]) {
      wx += user_weight * users[static_cast<std::size_t>(k)].x;
      wy += user_weight * users[static_cast<std::size_t>(k)].y;
      w += user_weight;
    }
    centroids[u] = {wx / w, wy / w};
  }
}

double sse(const ClusterSet& set) {
  double total = 0.0;
  for (std::size_t u = 0; u < set.members.size(); ++u) {
    total += set.uav_weight * dist2(set.uavs[u], set.centroids[u]);
    for (int k : set.members[u]) {
      total += set.user_weight * dist2(set.users[static_cast<std::size_t>(k)], set.centroids[u]);
    }
  }
  return total;
}

ClusterSet weighted_kmeans(std::span<const Vec2> users, std::span<const Vec2> uavs,
                           const ClusteringConfig& config, std::uint64_t seed) {
  if (users.empty() || uavs.empty()) throw std::invalid_argument("clustering input is empty");
  if (static_cast<int>(uavs.size()) != config.num_clusters) {
    throw std::invalid_argument("one UAV per cluster is required");
  }
  if (users.size() < uavs.size()) throw std::invalid_argument("fewer users than clusters");
  if (!(config.user_weight > 0.0) || !(config.uav_weight > 0.0)) {
    throw std::invalid_argument("clustering weights must be positive");
  }

  ClusterSet set;
  set.users.assign(users.begin(), users.end());
  set.uavs.assign(uavs.begin(), uavs.end());
  set.user_weight = config.user_weight;
  set.uav_weight = config.uav_weight;
  set.members.resize(uavs.size());

  // Initial centroids: U distinct points from users followed by UAVs.
  std::vector<Vec2> pool(users.begin(), users.end());
  pool.insert(pool.end(), uavs.begin(), uavs.end());
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  // Pair the sampled points with the UAVs they start nearest to, so each
  // cluster's seed is close to the UAV it is anchored to.
  std::vector<std::size_t> pick(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(uavs.size()));
  std::sort(pick.begin(), pick.end());
  std::vector<std::size_t> best_perm = pick;
  double best_cost = std::numeric_limits<double>::infinity();
  if (uavs.size() <= 8) {
    do {
      double cost = 0.0;
      for (std::size_t u = 0; u < uavs.size(); ++u) cost += dist2(pool[pick[u]], uavs[u]);
      if (cost < best_cost) {
        best_cost = cost;
        best_perm = pick;
      }
    } while (std::next_permutation(pick.begin(), pick.end()));
  } else {
    std::vector<char> used(pick.size(), 0);
    for (std::size_t u = 0; u < uavs.size(); ++u) {
      std::size_t j = 0;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pick.size(); ++i) {
        if (!used[i] && dist2(pool[pick[i]], uavs[u]) < d) {
          d = dist2(pool[pick[i]], uavs[u]);
          j = i;
        }
      }
      used[j] = 1;
      best_perm[u] = pick[j];
    }
  }
  set.centroids.resize(uavs.size());
  for (std::size_t u = 0; u < uavs.size(); ++u) set.centroids[u] = pool[best_perm[u]];

  for (int n = 0; n < std::max(1, config.max_iterations); ++n) {
    for (auto& m : set.members) m.clear();
    for (std::size_t k = 0; k < users.size(); ++k) {
      set.members[static_cast<std::size_t>(nearest(users[k], set.centroids))].push_back(
          static_cast<int>(k));
    }
    const std::vector<Vec2> previous = set.centroids;
    set.recompute_centroids();
    set.sse_history.push_back(sse(set));
    set.iterations = n + 1;
    if (set.centroids == previous) break;
  }
  return set;
}

ClusterSet rebalance_capacity(ClusterSet set, int max_cluster_size, int* moves) {
  const int num_users = static_cast<int>(set.users.size());
  if (max_cluster_size < 1 ||
      static_cast<long>(set.num_clusters()) * max_cluster_size < num_users) {
    throw InfeasibleCapacityError("U * eta is smaller than the number of users");
  }
  const auto cap = static_cast<std::size_t>(max_cluster_size);
  int count = 0;
  for (;;) {
    // Most overloaded cluster first, lowest index on ties.
    int over = -1;
    for (int u = 0; u < set.num_clusters(); ++u) {
      const auto sz = set.members[static_cast<std::size_t>(u)].size();
      if (sz > cap && (over < 0 || sz > set.members[static_cast<std::size_t>(over)].size())) over = u;
    }
    if (over < 0) break;

    auto& from = set.members[static_cast<std::size_t>(over)];
    const Vec2 mu = set.centroids[static_cast<std::size_t>(over)];
    auto far = std::max_element(from.begin(), from.end(), [&](int a, int b) {
      return dist2(set.users[static_cast<std::size_t>(a)], mu) <
             dist2(set.users[static_cast<std::size_t>(b)], mu);
    });
    const int user = *far;
    from.erase(far);

    const Vec2 p = set.users[static_cast<std::size_t>(user)];
    bool have_empty = false;
    for (const auto& m : set.members) have_empty = have_empty || m.empty();
    int target = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int u = 0; u < set.num_clusters(); ++u) {
      if (u == over) continue;
      const auto& m = set.members[static_cast<std::size_t>(u)];
      const bool eligible = have_empty ? m.empty() : m.size() < cap;
      if (!eligible) continue;
      const double d = dist2(p, set.centroids[static_cast<std::size_t>(u)]);
      if (d < best) {
        best = d;
        target = u;
      }
    }
    auto& to = set.members[static_cast<std::size_t>(target)];
    to.insert(std::upper_bound(to.begin(), to.end(), user), user);
    ++count;
  }
  if (count > 0) set.recompute_centroids();
  if (moves) *moves = count;
  return set;
}

ClusterSet cluster_users(std::span<const Vec2> users, std::span<const Vec2> uavs,
                         const ClusteringConfig& config, std::uint64_t seed) {
  if (static_cast<long>(config.num_clusters) * config.max_cluster_size <
      static_cast<long>(users.size())) {
    throw InfeasibleCapacityError("U * eta is smaller than the number of users");
  }
  ClusterSet best;
  double best_sse = std::numeric_limits<double>::infinity();
  std::mt19937_64 seeds(seed);
  for (int r = 0; r < std::max(1, config.restarts); ++r) {
    const std::uint64_t s = r == 0 ? seed : seeds();
    ClusterSet set = refine_capacity(
        rebalance_capacity(weighted_kmeans(users, uavs, config, s), config.max_cluster_size),
        config.max_cluster_size);
    const double v = sse(set);
    if (v < best_sse) {
      best_sse = v;
      best = std::move(set);
    }
  }
  return best;
}

ClusterSet refine_capacity(ClusterSet set, int max_cluster_size) {
  const int num_clusters = set.num_clusters();
  const int num_users = static_cast<int>(set.users.size());
  std::vector<int> owner(static_cast<std::size_t>(num_users));
  std::vector<int> size(static_cast<std::size_t>(num_clusters), 0);
  for (int u = 0; u < num_clusters; ++u) {
    for (int k : set.members[static_cast<std::size_t>(u)]) owner[static_cast<std::size_t>(k)] = u;
    size[static_cast<std::size_t>(u)] = static_cast<int>(set.members[static_cast<std::size_t>(u)].size());
  }
  auto rebuild = [&](ClusterSet& s) {
    for (auto& m : s.members) m.clear();
    for (int k = 0; k < num_users; ++k) s.members[static_cast<std::size_t>(owner[static_cast<std::size_t>(k)])].push_back(k);
    s.recompute_centroids();
  };
  rebuild(set);
  double current = sse(set);
  ClusterSet cand = set;
  auto fits = [&] {
    for (int c : size) {
      if (c > max_cluster_size) return false;
    }
    return true;
  };
  auto reassign = [&](int k, int to) {
    --size[static_cast<std::size_t>(owner[static_cast<std::size_t>(k)])];
    ++size[static_cast<std::size_t>(to)];
    owner[static_cast<std::size_t>(k)] = to;
  };
  // First-improvement search over every reassignment of one or two users.
  for (bool improved = true; improved;) {
    improved = false;
    for (int a = 0; a < num_users && !improved; ++a) {
      for (int b = a; b < num_users && !improved; ++b) {
        const int oa = owner[static_cast<std::size_t>(a)], ob = owner[static_cast<std::size_t>(b)];
        for (int ta = 0; ta < num_clusters && !improved; ++ta) {
          for (int tb = 0; tb < num_clusters && !improved; ++tb) {
            if (a == b && tb != ta) continue;
            if (ta == oa && tb == ob) continue;
            reassign(a, ta);
            if (b != a) reassign(b, tb);
            if (fits()) {
              rebuild(cand);
              const double v = sse(cand);
              if (v < current * (1.0 - 1e-12)) {
                current = v;
                std::swap(set, cand);
                improved = true;
                break;
              }
            }
            if (b != a) reassign(b, ob);
            reassign(a, oa);
          }
        }
      }
    }
  }
  return set;
}

}  // namespace uavnoma
