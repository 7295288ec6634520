#include "uavnoma/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavnoma {

std::string_view movement_name(Movement m) {
  switch (m) {
    case Movement::kUp: return "up";
    case Movement::kDown: return "down";
    case Movement::kForward: return "forward";
    case Movement::kBackward: return "backward";
    case Movement::kLeft: return "left";
    case Movement::kRight: return "right";
    case Movement::kHover: return "hover";
  }
  return "?";
}

std::vector<GearTable> default_gear_tables() {
  return {
      {},
      {{1.0}, {1.0}, {1.0}, {1.0}},
      {{0.9, 0.1}, {0.8, 0.2}, {0.7, 0.3}, {0.6, 0.4}},
      {{0.7, 0.2, 0.1}, {0.6, 0.3, 0.1}, {0.5, 0.3, 0.2}, {0.4, 0.35, 0.25}},
  };
}

ActionSpace::ActionSpace(int max_cluster_size, std::vector<GearTable> gears, bool allow_vertical)
    : ActionSpace(
          [&] {
            if (max_cluster_size < 1) throw std::invalid_argument("eta must be >= 1");
            std::vector<int> s;
            for (int n = 1; n <= max_cluster_size; ++n) s.push_back(n);
            return s;
          }(),
          std::move(gears), allow_vertical) {}

ActionSpace::ActionSpace(std::vector<int> segment_sizes, std::vector<GearTable> gears,
                         bool allow_vertical)
    : sizes_(std::move(segment_sizes)), gears_(std::move(gears)), allow_vertical_(allow_vertical) {
  if (sizes_.empty()) throw std::invalid_argument("action space needs at least one segment");
  if (!std::is_sorted(sizes_.begin(), sizes_.end()) ||
      std::adjacent_find(sizes_.begin(), sizes_.end()) != sizes_.end()) {
    throw std::invalid_argument("segment sizes must be strictly ascending");
  }
  for (int n : sizes_) {
    if (n < 1 || n >= static_cast<int>(gears_.size()) || gears_[static_cast<std::size_t>(n)].empty()) {
      throw std::invalid_argument("no power gear table for cluster size " + std::to_string(n));
    }
    for (const auto& g : gears_[static_cast<std::size_t>(n)]) {
      if (static_cast<int>(g.size()) != n) throw std::invalid_argument("gear arity mismatch");
      double s = 0.0;
      for (double f : g) s += f;
      if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("gear fractions must sum to 1");
    }
    offsets_.push_back(total_);
    total_ += kNumMovements * gears_for(n);
  }
}

int ActionSpace::gears_for(int cluster_size) const {
  return static_cast<int>(gear_table(cluster_size).size());
}

const GearTable& ActionSpace::gear_table(int cluster_size) const {
  if (cluster_size < 1 || cluster_size >= static_cast<int>(gears_.size())) {
    throw std::out_of_range("no gear table for cluster size");
  }
  return gears_[static_cast<std::size_t>(cluster_size)];
}

int ActionSpace::segment_offset(int cluster_size) const {
  auto it = std::find(sizes_.begin(), sizes_.end(), cluster_size);
  if (it == sizes_.end()) throw std::out_of_range("cluster size has no action segment");
  return offsets_[static_cast<std::size_t>(it - sizes_.begin())];
}

DecodedAction ActionSpace::decode(int index) const {
  if (index < 0 || index >= total_) throw std::out_of_range("action index out of range");
  std::size_t seg = sizes_.size() - 1;
  while (offsets_[seg] > index) --seg;
  const int n = sizes_[seg];
  const int local = index - offsets_[seg];
  const int g = gears_for(n);
  DecodedAction out;
  out.movement = static_cast<Movement>(local / g);
  out.cluster_size = n;
  out.gear = local % g;
  out.fractions = gear_table(n)[static_cast<std::size_t>(out.gear)];
  return out;
}

int ActionSpace::encode(Movement movement, int cluster_size, int gear) const {
  const int g = gears_for(cluster_size);
  if (gear < 0 || gear >= g) throw std::out_of_range("gear index out of range");
  const int m = static_cast<int>(movement);
  if (m < 0 || m >= kNumMovements) throw std::out_of_range("movement out of range");
  return segment_offset(cluster_size) + m * g + gear;
}

ActionMask ActionSpace::mask(int cluster_size) const {
  if (cluster_size < 0) throw std::invalid_argument("negative cluster size");
  ActionMask m(static_cast<std::size_t>(total_), 0);
  auto vertical = [](int mv) {
    return mv == static_cast<int>(Movement::kUp) || mv == static_cast<int>(Movement::kDown);
  };
  if (cluster_size == 0) {
    for (int mv = 0; mv < kNumMovements; ++mv) {
      if (!allow_vertical_ && vertical(mv)) continue;
      m[static_cast<std::size_t>(encode(static_cast<Movement>(mv), sizes_.front(), 0))] = 1;
    }
    return m;
  }
  const int offset = segment_offset(cluster_size);
  const int g = gears_for(cluster_size);
  for (int mv = 0; mv < kNumMovements; ++mv) {
    if (!allow_vertical_ && vertical(mv)) continue;
    for (int j = 0; j < g; ++j) m[static_cast<std::size_t>(offset + mv * g + j)] = 1;
  }
  return m;
}

ActionMask action_mask(const ActionSpace& space, int cluster_size) { return space.mask(cluster_size); }

double StateScaling::scale_gain(double g) const {
  if (!(g > 0.0)) return 0.0;
  const double db = 10.0 * std::log10(g);
  return std::max(0.0, (db - gain_db_floor) / (gain_db_ceiling - gain_db_floor));
}

int state_size(int num_uavs, int num_users, int max_cluster_size) {
  return 3 * num_uavs + max_cluster_size + num_users;
}

std::vector<double> abstract_state(const Snapshot& snapshot, int self_uav, int max_cluster_size,
                                   const StateScaling& scaling) {
  const int num_uavs = static_cast<int>(snapshot.uav_positions.size());
  const int num_users = snapshot.gains.num_users();
  if (self_uav < 0 || self_uav >= num_uavs) throw std::out_of_range("unknown UAV id");
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(state_size(num_uavs, num_users, max_cluster_size)));
  auto push_pos = [&](const Vec3& p) {
    s.push_back(p.x / scaling.x_max);
    s.push_back(p.y / scaling.y_max);
    s.push_back(p.z / scaling.h_max);
  };
  push_pos(snapshot.uav_positions[static_cast<std::size_t>(self_uav)]);
  for (int u = 0; u < num_uavs; ++u) {
    if (u != self_uav) push_pos(snapshot.uav_positions[static_cast<std::size_t>(u)]);
  }
  const auto& own = snapshot.decoding_orders.at(static_cast<std::size_t>(self_uav));
  if (static_cast<int>(own.size()) > max_cluster_size) {
    throw std::invalid_argument("cluster larger than eta");
  }
  for (int k : own) s.push_back(scaling.scale_gain(snapshot.gains(self_uav, k)));
  for (int i = static_cast<int>(own.size()); i < max_cluster_size; ++i) s.push_back(0.0);
  int others = 0;
  for (int k = 0; k < num_users; ++k) {
    if (snapshot.association.serving(k) == self_uav) continue;
    s.push_back(scaling.scale_gain(snapshot.gains(self_uav, k)));
    ++others;
  }
  for (int i = others; i < num_users; ++i) s.push_back(0.0);
  return s;
}

int masked_argmax(std::span<const double> q_values, const ActionMask& mask) {
  if (mask.size() != q_values.size()) throw std::invalid_argument("mask length differs from Q vector");
  int best = -1;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    if (!mask[i]) continue;
    if (best < 0 || q_values[i] > best_q) {
      best = static_cast<int>(i);
      best_q = q_values[i];
    }
  }
  if (best < 0) throw std::invalid_argument("mask leaves no valid action");
  return best;
}

int select_action(std::span<const double> q_values, const ActionMask& mask, double epsilon,
                  std::mt19937_64& rng) {
  if (mask.size() != q_values.size()) throw std::invalid_argument("mask length differs from Q vector");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (epsilon > 0.0 && coin(rng) < epsilon) {
    const auto valid = static_cast<long>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
    if (valid == 0) throw std::invalid_argument("mask leaves no valid action");
    std::uniform_int_distribution<long> pick(0, valid - 1);
    long n = pick(rng);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] && n-- == 0) return static_cast<int>(i);
    }
  }
  return masked_argmax(q_values, mask);
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  items_.reserve(capacity);
}

void ReplayMemory::push(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
  } else {
    items_[next_] = std::move(e);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t batch, std::mt19937_64& rng) const {
  if (items_.empty()) throw std::logic_error("sampling from an empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = pick(rng);
  return out;
}

double EpsilonSchedule::value(int episode, int total_episodes) const {
  const double horizon = std::max(1.0, decay_fraction * total_episodes);
  const double f = std::min(1.0, std::max(0.0, episode / horizon));
  return start + (end - start) * f;
}

double td_target(double reward, std::span<const double> next_state, const QNetwork& target_net,
                 const ActionMask& next_mask, double discount, bool terminal) {
  if (terminal || discount == 0.0) return reward;
  const Eigen::VectorXd q = target_net.forward(next_state);
  const int a = masked_argmax(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), next_mask);
  return reward + discount * q(a);
}

std::optional<double> sdqn_train_tick(QNetwork& eval_net, QNetwork& target_net,
                                      AdamOptimizer& optimizer, const ReplayMemory& replay,
                                      const HyperParams& hyper, long& train_ticks,
                                      std::mt19937_64& rng) {
  if (!replay.full()) return std::nullopt;
  const auto idx = replay.sample_indices(hyper.batch_size, rng);
  const int n = static_cast<int>(idx.size());
  const int in = eval_net.input_size();

  TrainingBatch batch;
  batch.states.resize(in, n);
  batch.targets.resize(n);
  batch.actions.resize(idx.size());
  Eigen::MatrixXd next(in, n);
  for (int j = 0; j < n; ++j) {
    const Experience& e = replay[idx[static_cast<std::size_t>(j)]];
    batch.states.col(j) = Eigen::Map<const Eigen::VectorXd>(e.state.data(), in);
    next.col(j) = Eigen::Map<const Eigen::VectorXd>(e.next_state.data(), in);
    batch.actions[static_cast<std::size_t>(j)] = e.action;
  }
  // Batched form of td_target.
  const Eigen::MatrixXd q_next = target_net.forward_batch(next);
  for (int j = 0; j < n; ++j) {
    const Experience& e = replay[idx[static_cast<std::size_t>(j)]];
    double y = e.reward * hyper.reward_scale;
    if (!e.terminal && hyper.discount != 0.0) {
      const auto col = q_next.col(j);
      const int a = masked_argmax(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                  e.next_mask);
      y += hyper.discount * col(a);
    }
    batch.targets(j) = y;
  }
  const double loss = train_step(eval_net, optimizer, batch);
  ++train_ticks;
  if (hyper.target_period > 0 && train_ticks % hyper.target_period == 0) copy_params(eval_net, target_net);
  return loss;
}

DqnLearner::DqnLearner(int state_len, int num_actions, const HyperParams& hyper, std::uint64_t seed)
    : hyper_(hyper),
      eval_({state_len, hyper.hidden_units, num_actions}, seed),
      target_(eval_),
      optimizer_(eval_, hyper.learning_rate),
      replay_(hyper.replay_capacity),
      rng_(seed ^ 0x9e3779b97f4a7c15ULL) {}

int DqnLearner::act(std::span<const double> state, const ActionMask& mask, double epsilon) {
  const Eigen::VectorXd q = eval_.forward(state);
  return select_action(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), mask,
                       epsilon, rng_);
}

std::optional<double> DqnLearner::tick() {
  return sdqn_train_tick(eval_, target_, optimizer_, replay_, hyper_, ticks_, rng_);
}

}  // namespace uavnoma
