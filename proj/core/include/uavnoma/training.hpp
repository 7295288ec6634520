#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavnoma/agent.hpp"
#include "uavnoma/env.hpp"

namespace uavnoma {

enum class Scheme { kSdqn, kSdqn2d, kMutual, kPrivateDqn, kStaticCluster, kCircular };

std::string_view scheme_name(Scheme s);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(std::string_view name);
bool scheme_learns(Scheme s);

/// Scheme-specific config adjustments (mutual forces eta = K / U, static-cluster
/// disables re-clustering). Throws ConfigError when K is not a multiple of U for
/// the mutual scheme.
SimConfig scheme_config(Scheme s, SimConfig base);
ActionSpace scheme_actions(Scheme s, const SimConfig& config);

struct EpisodeLog {
  int episode = 0;  // 1-based
  double mean_loss = 0.0;  // NaN while the replay is filling
  double epsilon = 0.0;
  double throughput_bits = 0.0;
  double mean_rate_bps = 0.0;  // throughput_bits / (T)
};

/// A policy maps the current environment state to one slot of decisions.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual StepResult act_and_step(Environment& env) = 0;
};

/// Epsilon-greedy (or greedy, epsilon = 0) play from per-UAV networks.
/// `nets` holds one shared network or one per UAV.
class NetworkPolicy : public Policy {
 public:
  NetworkPolicy(std::vector<const QNetwork*> nets, double epsilon, std::uint64_t seed);
  StepResult act_and_step(Environment& env) override;

 private:
  std::vector<const QNetwork*> nets_;
  double epsilon_;
  std::mt19937_64 rng_;
};

/// Orbits each UAV around its cluster centroid at the configured radius and
/// height with an equal power split.
class CircularPolicy : public Policy {
 public:
  StepResult act_and_step(Environment& env) override;

 private:
  std::vector<double> phase_;
  int last_slot_ = -1;
};

/// Plays one full episode from `seed` and returns its trace.
EpisodeTrace run_episode(Environment& env, Policy& policy, std::uint64_t seed);

struct TrainOptions {
  int episodes = 100;
  std::uint64_t seed = 1;
  HyperParams hyper;
  /// Episodes after which the networks are copied into TrainResult::snapshots.
  std::vector<int> snapshot_episodes;
  /// Called after every episode with its log entry and trace.
  std::function<void(const EpisodeLog&, const EpisodeTrace&)> on_episode;
};

struct TrainResult {
  Scheme scheme = Scheme::kSdqn;
  SimConfig config;
  std::vector<EpisodeLog> log;
  /// One shared network, or one per UAV for private-DQN; empty for circular.
  std::vector<QNetwork> nets;
  /// (episode, networks) for every requested snapshot episode.
  std::vector<std::pair<int, std::vector<QNetwork>>> snapshots;

  std::vector<double> throughput_curve() const;
};

/// Episode seed used by training episode `episode` (1-based) of run `seed`.
std::uint64_t episode_seed(std::uint64_t run_seed, int episode);

/// Trains (or, for circular, simply plays) `options.episodes` episodes.
TrainResult train(Scheme scheme, const SimConfig& config, const TrainOptions& options);

/// Greedy policy for a finished training result (circular for the circular scheme).
/// The policy refers to the result's networks, which must outlive it.
std::unique_ptr<Policy> greedy_policy(const TrainResult& result);
/// Greedy policy over an explicit network set, e.g. a snapshot.
std::unique_ptr<Policy> greedy_policy(const std::vector<QNetwork>& nets);

/// Trailing moving average over `window` episodes (shorter at the start).
std::vector<double> smooth(const std::vector<double>& curve, int window);

struct CurveSummary {
  double final_throughput = 0.0;  // mean of the last `tail` episodes
  int episodes_to_90 = 0;         // first full-window episode whose smoothed value is >= 90% of the smoothed max
  double max_smoothed = 0.0;
};

CurveSummary summarize_curve(const std::vector<double>& curve, int window = 10, int tail = 10);

}  // namespace uavnoma
