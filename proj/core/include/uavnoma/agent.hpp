#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "uavnoma/channel.hpp"
#include "uavnoma/neuralnet.hpp"
#include "uavnoma/noma.hpp"

namespace uavnoma {

enum class Movement { kUp = 0, kDown, kForward, kBackward, kLeft, kRight, kHover };
inline constexpr int kNumMovements = 7;

std::string_view movement_name(Movement m);

/// Preset power splits per cluster size; each gear lists fractions for the
/// decoding order, weakest user first.
using GearTable = std::vector<std::vector<double>>;

/// gears[n] is the table for cluster size n (index 0 unused).
std::vector<GearTable> default_gear_tables();

using ActionMask = std::vector<std::uint8_t>;

struct DecodedAction {
  Movement movement = Movement::kHover;
  int cluster_size = 0;  // segment arity
  int gear = 0;
  std::span<const double> fractions;

  friend bool operator==(const DecodedAction& a, const DecodedAction& b) {
    return a.movement == b.movement && a.cluster_size == b.cluster_size && a.gear == b.gear;
  }
};

/// Concatenated discrete action space: one segment per supported cluster size,
/// movement-major inside a segment (index = offset + movement * gears + gear).
class ActionSpace {
 public:
  /// Segments for cluster sizes 1..max_cluster_size.
  explicit ActionSpace(int max_cluster_size, std::vector<GearTable> gears = default_gear_tables(),
                       bool allow_vertical = true);
  /// Segments only for the listed cluster sizes (ascending).
  ActionSpace(std::vector<int> segment_sizes, std::vector<GearTable> gears, bool allow_vertical);

  int size() const { return total_; }
  const std::vector<int>& segment_sizes() const { return sizes_; }
  bool allow_vertical() const { return allow_vertical_; }
  int max_cluster_size() const { return sizes_.back(); }
  int gears_for(int cluster_size) const;
  const GearTable& gear_table(int cluster_size) const;

  DecodedAction decode(int index) const;
  int encode(Movement movement, int cluster_size, int gear) const;

  /// Enables only the segment matching cluster_size. An empty cluster gets the
  /// seven movements of the first segment's gear 0. Vertical moves are masked
  /// out when the space disallows them.
  ActionMask mask(int cluster_size) const;

 private:
  int segment_offset(int cluster_size) const;

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<GearTable> gears_;
  bool allow_vertical_ = true;
  int total_ = 0;
};

/// Free-function form of ActionSpace::mask.
ActionMask action_mask(const ActionSpace& space, int cluster_size);

struct StateScaling {
  double x_max = 1000.0;
  double y_max = 1000.0;
  double h_max = 150.0;
  double gain_db_floor = -140.0;
  double gain_db_ceiling = -60.0;

  double scale_gain(double g) const;
};

/// Everything an agent may observe at the start of a slot.
struct Snapshot {
  std::vector<Vec3> uav_positions;
  GainMatrix gains;
  Association association;
  /// Per-UAV decoding order (weakest first); determines own-gain ordering.
  std::vector<std::vector<int>> decoding_orders;
};

/// Abstracted state, fixed layout for every agent:
/// [own xyz | other UAVs' xyz by id | own users' gains in decoding order,
///  zero-padded to eta | other users' gains from this UAV by id, zero-padded to K].
std::vector<double> abstract_state(const Snapshot& snapshot, int self_uav, int max_cluster_size,
                                   const StateScaling& scaling);

int state_size(int num_uavs, int num_users, int max_cluster_size);

/// Epsilon-greedy over unmasked actions; argmax ties go to the lowest index.
int select_action(std::span<const double> q_values, const ActionMask& mask, double epsilon,
                  std::mt19937_64& rng);

/// Index of the maximal unmasked Q-value (lowest index on ties).
int masked_argmax(std::span<const double> q_values, const ActionMask& mask);

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  ActionMask next_mask;
  bool terminal = false;
};

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return items_.size() == capacity_; }
  const Experience& operator[](std::size_t i) const { return items_.at(i); }
  std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Experience> items_;
};

struct EpsilonSchedule {
  double start = 0.9;
  double end = 0.05;
  double decay_fraction = 0.8;

  /// Linear decay from start to end over the first decay_fraction of episodes.
  double value(int episode, int total_episodes) const;
};

struct HyperParams {
  double discount = 1.0;  // beta
  EpsilonSchedule epsilon;
  double learning_rate = 1e-3;
  int target_period = 1500;  // v, in training ticks
  std::size_t batch_size = 128;
  std::size_t replay_capacity = 10000;
  int hidden_units = 70;
  /// Multiplies raw rewards (bit/s) before they enter TD targets.
  double reward_scale = 1.0 / 90000.0;
};

/// y = R + beta * max over unmasked a' of Q_target(S', a'); y = R when terminal.
double td_target(double reward, std::span<const double> next_state, const QNetwork& target_net,
                 const ActionMask& next_mask, double discount, bool terminal = false);

/// One call per agent-step. Once the replay is full: samples a minibatch,
/// builds TD targets with the target network, performs one optimizer update on
/// the evaluation network, and copies it to the target every target_period
/// ticks. Returns the loss, or nullopt while the replay is still filling.
std::optional<double> sdqn_train_tick(QNetwork& eval_net, QNetwork& target_net,
                                      AdamOptimizer& optimizer, const ReplayMemory& replay,
                                      const HyperParams& hyper, long& train_ticks,
                                      std::mt19937_64& rng);

/// Evaluation/target pair with its replay memory. SDQN shares one learner
/// between all agents; the private-DQN baseline gives each agent its own.
class DqnLearner {
 public:
  DqnLearner(int state_len, int num_actions, const HyperParams& hyper, std::uint64_t seed);

  int act(std::span<const double> state, const ActionMask& mask, double epsilon);
  void remember(Experience e) { replay_.push(std::move(e)); }
  std::optional<double> tick();

  const QNetwork& eval_net() const { return eval_; }
  QNetwork& eval_net() { return eval_; }
  const QNetwork& target_net() const { return target_; }
  const ReplayMemory& replay() const { return replay_; }
  const HyperParams& hyper() const { return hyper_; }
  long train_ticks() const { return ticks_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  HyperParams hyper_;
  QNetwork eval_;
  QNetwork target_;
  AdamOptimizer optimizer_;
  ReplayMemory replay_;
  long ticks_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace uavnoma
