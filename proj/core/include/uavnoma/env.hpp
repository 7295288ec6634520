#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uavnoma/agent.hpp"
#include "uavnoma/channel.hpp"
#include "uavnoma/clustering.hpp"
#include "uavnoma/noma.hpp"
#include "uavnoma/world.hpp"

namespace uavnoma {

enum class AccessScheme { kNoma, kOma };

/// Scenario parameters.
struct SimConfig {
  double x_min = 0.0, x_max = 1000.0;
  double y_min = 0.0, y_max = 1000.0;
  double h_min = 20.0, h_max = 150.0;
  int num_uavs = 3;
  int num_users = 6;
  int max_cluster_size = 3;  // eta
  double bandwidth_hz = 15.0e3;
  double carrier_hz = 2.0e9;
  double noise_dbm_per_hz = -100.0;
  double user_v_max = 10.0;
  double uav_speed = 5.0;
  double p_max_dbm = 29.0;
  double recluster_interval = 60.0;  // T_r in seconds; <= 0 disables re-clustering
  double r_qos_bps = 150.0;
  double dt = 1.0;
  double horizon = 180.0;            // T
  FadingMode fading = FadingMode::kUnit;
  AccessScheme access = AccessScheme::kNoma;

  // Map.
  int map_cells = 25;
  int block_cells = 5;
  double open_block_probability = 0.1;
  std::uint64_t map_seed = 7;
  /// Seed for user destinations; negative draws new destinations every episode.
  long long destination_seed = -1;

  // Initial UAV altitude band.
  double init_h_min = 80.0;
  double init_h_max = 90.0;

  // Clustering.
  double user_weight = 1.0;
  double uav_weight = 2.0;
  int kmeans_iterations = 100;
  int kmeans_restarts = 10;

  // Circular baseline.
  double circle_radius = 100.0;
  double circle_height = 85.0;

  double p_max_w() const;
  int steps() const;
  double noise_power_w() const;
  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Applies "key=value" overrides. Unknown keys and malformed values throw ConfigError.
void apply_override(SimConfig& config, const std::string& key, const std::string& value);
/// Reads a human-readable key/value file ('#' comments, "key = value" lines).
SimConfig load_config(const std::string& text, SimConfig base = {});
/// Canonical key=value listing of every field in a fixed order.
std::string canonical_config(const SimConfig& config);

/// Direct trajectory command for non-learning policies: fly toward `target`
/// at UAV speed, split power with `fractions` (empty = equal split).
struct UavCommand {
  Vec3 target;
  std::vector<double> fractions;
};

struct ConstraintViolation {
  std::string constraint;  // bounds, separation, association, power, sic-order
  std::string detail;
};

struct TraceRow {
  double t = 0.0;  // slot start time
  std::vector<Vec3> uav_positions;  // after this slot's movement
  std::vector<Vec2> user_positions;  // during this slot
  std::vector<int> serving;         // user -> UAV
  std::vector<int> actions;         // -1 for command-driven slots
  std::vector<DecodedCluster> clusters;
  PowerAllocation power;
  std::vector<double> user_rate_bps;  // indexed by user
  double sum_rate_bps = 0.0;
  int penalty = 0;  // lambda
  double reward = 0.0;
  bool reclustered_after = false;
};

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  /// (time, serving vector) at every clustering instant including t = 0.
  std::vector<std::pair<double, std::vector<int>>> clusterings;

  double throughput_bits(double dt) const;
};

struct StepResult {
  std::vector<double> rewards;  // identical for every UAV
  const TraceRow* row = nullptr;
  bool done = false;
};

/// Discrete-time MDP over one episode of T / dt slots.
class Environment {
 public:
  Environment(SimConfig config, ActionSpace actions);

  const SimConfig& config() const { return config_; }
  const ActionSpace& action_space() const { return actions_; }
  const GridMap& map() const { return map_; }

  /// Initializes UAVs (uniform 2D, altitude in the init band), users at the
  /// origin with seeded destinations, clustering, fading streams and gains.
  void reset(std::uint64_t episode_seed);

  void set_reclustering(bool enabled) { recluster_enabled_ = enabled; }
  bool reclustering() const { return recluster_enabled_; }

  double time() const { return t_; }
  int slot() const { return slot_; }
  bool done() const { return slot_ >= config_.steps(); }

  const std::vector<Vec3>& uav_positions() const { return uavs_; }
  const std::vector<UserState>& users() const { return users_; }
  const Association& association() const { return assoc_; }
  const ClusterSet& clusters() const { return cluster_set_; }
  const GainMatrix& gains() const { return gains_; }
  Snapshot snapshot() const;

  int cluster_size(int uav) const { return static_cast<int>(assoc_.cluster(uav).size()); }
  ActionMask mask(int uav) const { return actions_.mask(cluster_size(uav)); }
  std::vector<double> observe(int uav, const StateScaling& scaling) const;
  StateScaling default_scaling() const;

  /// Executes one slot from per-UAV action indices. Throws std::logic_error if
  /// an action is masked for its UAV.
  StepResult step(const std::vector<int>& actions);
  /// Executes one slot from direct commands (baseline trajectories).
  StepResult step_commands(const std::vector<UavCommand>& commands);

  const EpisodeTrace& trace() const { return trace_; }

  /// Test hooks.
  void set_uav_positions(std::vector<Vec3> positions);
  void set_users(std::vector<UserState> users);
  void set_association(const Association& assoc);
  void freeze_users(bool frozen) { users_frozen_ = frozen; }

 private:
  StepResult execute(const std::vector<Vec3>& proposed, const std::vector<std::vector<double>>& gears,
                     std::vector<int> action_record);
  void recompute_gains(bool redraw_fading);
  void recluster();
  std::vector<Vec3> resolve_collisions(const std::vector<Vec3>& proposed) const;
  bool in_bounds(const Vec3& p) const;

  SimConfig config_;
  ActionSpace actions_;
  GridMap map_;
  ChannelConfig channel_;
  std::vector<Vec3> uavs_;
  std::vector<UserState> users_;
  ClusterSet cluster_set_;
  Association assoc_;
  GainMatrix gains_;
  std::vector<double> fading_;  // per link, U x K
  std::vector<FadingStream> fading_streams_;
  std::vector<std::vector<int>> orders_;
  EpisodeTrace trace_;
  std::mt19937_64 rng_;
  std::uint64_t episode_seed_ = 0;
  int recluster_count_ = 0;
  double t_ = 0.0;
  int slot_ = 0;
  bool recluster_enabled_ = true;
  bool users_frozen_ = false;
};

/// Movement displacement of V * dt along one axis; up/down change altitude,
/// forward/backward change y, left/right change x.
Vec3 apply_movement(const Vec3& position, Movement movement, const SimConfig& config);

/// Reward shared by all UAVs: slot sum rate / 2^lambda.
double reward(double slot_sum_rate_bps, int penalty);

/// Checks altitude/area bounds, UAV separation, association, power budget and
/// SIC order on one trace row.
std::vector<ConstraintViolation> audit_row(const TraceRow& row, const SimConfig& config);

}  // namespace uavnoma
