#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavnoma/noma.hpp"
#include "uavnoma/world.hpp"

namespace uavnoma {

class InfeasibleCapacityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ClusteringConfig {
  int num_clusters = 3;     // U
  int max_cluster_size = 3; // eta
  int max_iterations = 100; // N
  double user_weight = 1.0;
  double uav_weight = 2.0;
  int restarts = 10;  // cluster_users keeps the lowest-SSE start
};

/// Clusters anchored to UAVs: cluster u always contains UAV u's ground point.
struct ClusterSet {
  std::vector<std::vector<int>> members;  // user ids per cluster, ascending
  std::vector<Vec2> centroids;
  std::vector<Vec2> users;
  std::vector<Vec2> uavs;
  double user_weight = 1.0;
  double uav_weight = 2.0;
  /// SSE after each Lloyd update, first entry after the first update.
  std::vector<double> sse_history;
  int iterations = 0;

  int num_clusters() const { return static_cast<int>(members.size()); }
  Association association() const;
  /// Recomputes every centroid as the weighted mean of its users and its UAV.
  void recompute_centroids();
};

/// Weighted K-means (Lloyd) on users plus UAV ground points, the latter with
/// weight uav_weight and pinned one per cluster. Initial centroids are drawn
/// from the combined point set without replacement. Stops at an exact
/// centroid fixed point or after max_iterations. Capacity is not enforced.
ClusterSet weighted_kmeans(std::span<const Vec2> users, std::span<const Vec2> uavs,
                           const ClusteringConfig& config, std::uint64_t seed);

/// Moves the farthest member of any over-capacity cluster to an empty cluster
/// if one exists, otherwise to the nearest cluster with spare capacity, until
/// every cluster holds at most eta users. Centroids are held fixed while moving
/// and recomputed at the end. Throws InfeasibleCapacityError if U * eta < K.
ClusterSet rebalance_capacity(ClusterSet set, int max_cluster_size, int* moves = nullptr);

/// Weighted sum of squared distances from every point (users and UAVs) to its
/// cluster centroid.
double sse(const ClusterSet& set);

/// Capacity-respecting local search over every reassignment of one or two
/// users, each accepted only if SSE decreases.
ClusterSet refine_capacity(ClusterSet set, int max_cluster_size);

/// weighted_kmeans, then rebalance_capacity, then refine_capacity; repeated
/// for config.restarts seeds and the lowest-SSE result kept.
ClusterSet cluster_users(std::span<const Vec2> users, std::span<const Vec2> uavs,
                         const ClusteringConfig& config, std::uint64_t seed);

}  // namespace uavnoma
