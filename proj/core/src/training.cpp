#include "uavnoma/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uavnoma {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kSdqn: return "sdqn";
    case Scheme::kSdqn2d: return "sdqn2d";
    case Scheme::kMutual: return "mutual";
    case Scheme::kPrivateDqn: return "private-dqn";
    case Scheme::kStaticCluster: return "static-cluster";
    case Scheme::kCircular: return "circular";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::kSdqn, Scheme::kSdqn2d, Scheme::kMutual, Scheme::kPrivateDqn,
                   Scheme::kStaticCluster, Scheme::kCircular}) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

bool scheme_learns(Scheme s) { return s != Scheme::kCircular; }

SimConfig scheme_config(Scheme s, SimConfig base) {
  if (s == Scheme::kMutual) {
    if (base.num_users % base.num_uavs != 0) {
      throw ConfigError("mutual scheme needs K to be a multiple of U");
    }
    base.max_cluster_size = base.num_users / base.num_uavs;
  }
  if (s == Scheme::kStaticCluster) base.recluster_interval = 0.0;
  return base;
}

ActionSpace scheme_actions(Scheme s, const SimConfig& config) {
  switch (s) {
    case Scheme::kSdqn2d: return ActionSpace(config.max_cluster_size, default_gear_tables(), false);
    case Scheme::kMutual: return ActionSpace(std::vector<int>{config.max_cluster_size}, default_gear_tables(), true);
    default: return ActionSpace(config.max_cluster_size);
  }
}

std::vector<double> TrainResult::throughput_curve() const {
  std::vector<double> out;
  out.reserve(log.size());
  for (const auto& e : log) out.push_back(e.throughput_bits);
  return out;
}

NetworkPolicy::NetworkPolicy(std::vector<const QNetwork*> nets, double epsilon, std::uint64_t seed)
    : nets_(std::move(nets)), epsilon_(epsilon), rng_(seed) {
  if (nets_.empty()) throw std::invalid_argument("policy needs at least one network");
}

StepResult NetworkPolicy::act_and_step(Environment& env) {
  const StateScaling scaling = env.default_scaling();
  std::vector<int> actions;
  for (int u = 0; u < env.config().num_uavs; ++u) {
    const QNetwork& net = *nets_[nets_.size() == 1 ? 0 : static_cast<std::size_t>(u)];
    const auto s = env.observe(u, scaling);
    const Eigen::VectorXd q = net.forward(s);
    actions.push_back(select_action(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())),
                                    env.mask(u), epsilon_, rng_));
  }
  return env.step(actions);
}

StepResult CircularPolicy::act_and_step(Environment& env) {
  const SimConfig& c = env.config();
  const double radius = c.circle_radius;
  const double dtheta = c.uav_speed * c.dt / radius;
  std::vector<UavCommand> cmds;
  for (int u = 0; u < c.num_uavs; ++u) {
    const Vec3& p = env.uav_positions()[static_cast<std::size_t>(u)];
    const Vec2 centre = env.clusters().centroids[static_cast<std::size_t>(u)];
    const double theta = std::atan2(p.y - centre.y, p.x - centre.x);
    const double rho = std::hypot(p.x - centre.x, p.y - centre.y);
    UavCommand cmd;
    if (std::abs(rho - radius) > 1e-6 || std::abs(p.z - c.circle_height) > 1e-6) {
      cmd.target = {centre.x + radius * std::cos(theta), centre.y + radius * std::sin(theta), c.circle_height};
    } else {
      cmd.target = {centre.x + radius * std::cos(theta + dtheta), centre.y + radius * std::sin(theta + dtheta),
                    c.circle_height};
    }
    cmds.push_back(cmd);
  }
  return env.step_commands(cmds);
}

EpisodeTrace run_episode(Environment& env, Policy& policy, std::uint64_t seed) {
  env.reset(seed);
  while (!env.done()) policy.act_and_step(env);
  return env.trace();
}

std::uint64_t episode_seed(std::uint64_t run_seed, int episode) {
  return splitmix(splitmix(run_seed) ^ static_cast<std::uint64_t>(episode));
}

TrainResult train(Scheme scheme, const SimConfig& base, const TrainOptions& options) {
  if (options.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  TrainResult result;
  result.scheme = scheme;
  result.config = scheme_config(scheme, base);
  Environment env(result.config, scheme_actions(scheme, result.config));
  const SimConfig& cfg = result.config;
  const int num_uavs = cfg.num_uavs;

  if (!scheme_learns(scheme)) {
    CircularPolicy policy;
    for (int ep = 1; ep <= options.episodes; ++ep) {
      const EpisodeTrace trace = run_episode(env, policy, episode_seed(options.seed, ep));
      const double bits = trace.throughput_bits(cfg.dt);
      EpisodeLog log{ep, std::numeric_limits<double>::quiet_NaN(), 0.0, bits, bits / (cfg.steps() * cfg.dt)};
      result.log.push_back(log);
      if (options.on_episode) options.on_episode(log, trace);
    }
    return result;
  }

  const int state_len = state_size(num_uavs, cfg.num_users, cfg.max_cluster_size);
  const int num_actions = env.action_space().size();
  std::vector<DqnLearner> learners;
  const int num_learners = scheme == Scheme::kPrivateDqn ? num_uavs : 1;
  for (int i = 0; i < num_learners; ++i) {
    learners.emplace_back(state_len, num_actions, options.hyper, splitmix(options.seed * 1000003ULL + i));
  }
  auto learner = [&](int u) -> DqnLearner& {
    return learners[num_learners == 1 ? 0 : static_cast<std::size_t>(u)];
  };

  const StateScaling scaling = env.default_scaling();
  for (int ep = 1; ep <= options.episodes; ++ep) {
    const double eps = options.hyper.epsilon.value(ep - 1, options.episodes);
    env.reset(episode_seed(options.seed, ep));
    double loss_sum = 0.0;
    long loss_count = 0;
    std::vector<std::vector<double>> states(static_cast<std::size_t>(num_uavs));
    std::vector<int> actions(static_cast<std::size_t>(num_uavs));
    while (!env.done()) {
      for (int u = 0; u < num_uavs; ++u) {
        const auto i = static_cast<std::size_t>(u);
        states[i] = env.observe(u, scaling);
        actions[i] = learner(u).act(states[i], env.mask(u), eps);
      }
      const StepResult res = env.step(actions);
      for (int u = 0; u < num_uavs; ++u) {
        const auto i = static_cast<std::size_t>(u);
        learner(u).remember({std::move(states[i]), actions[i], res.rewards[i], env.observe(u, scaling),
                             env.mask(u), res.done});
        if (auto loss = learner(u).tick()) {
          loss_sum += *loss;
          ++loss_count;
        }
      }
    }
    EpisodeLog log{ep,
                   loss_count ? loss_sum / static_cast<double>(loss_count)
                              : std::numeric_limits<double>::quiet_NaN(),
                   eps, env.trace().throughput_bits(cfg.dt),
                   env.trace().throughput_bits(cfg.dt) / (cfg.steps() * cfg.dt)};
    result.log.push_back(log);
    if (std::find(options.snapshot_episodes.begin(), options.snapshot_episodes.end(), ep) !=
        options.snapshot_episodes.end()) {
      std::vector<QNetwork> nets;
      for (auto& l : learners) nets.push_back(l.eval_net());
      result.snapshots.emplace_back(ep, std::move(nets));
    }
    if (options.on_episode) options.on_episode(log, env.trace());
  }
  for (auto& l : learners) result.nets.push_back(l.eval_net());
  return result;
}

std::unique_ptr<Policy> greedy_policy(const TrainResult& result) {
  if (!scheme_learns(result.scheme)) return std::make_unique<CircularPolicy>();
  return greedy_policy(result.nets);
}

std::unique_ptr<Policy> greedy_policy(const std::vector<QNetwork>& nets) {
  std::vector<const QNetwork*> ptrs;
  for (const auto& n : nets) ptrs.push_back(&n);
  return std::make_unique<NetworkPolicy>(std::move(ptrs), 0.0, 0);
}

std::vector<double> smooth(const std::vector<double>& curve, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out;
  out.reserve(curve.size());
  double run = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    run += curve[i];
    if (i >= static_cast<std::size_t>(window)) run -= curve[i - static_cast<std::size_t>(window)];
    out.push_back(run / static_cast<double>(std::min<std::size_t>(i + 1, static_cast<std::size_t>(window))));
  }
  return out;
}

CurveSummary summarize_curve(const std::vector<double>& curve, int window, int tail) {
  CurveSummary s;
  if (curve.empty()) return s;
  const auto sm = smooth(curve, window);
  // Partial windows at the start are too noisy to count.
  const std::size_t first = curve.size() >= static_cast<std::size_t>(window) ? static_cast<std::size_t>(window) - 1 : 0;
  s.max_smoothed = *std::max_element(sm.begin() + static_cast<std::ptrdiff_t>(first), sm.end());
  for (std::size_t i = first; i < sm.size(); ++i) {
    if (sm[i] >= 0.9 * s.max_smoothed) {
      s.episodes_to_90 = static_cast<int>(i) + 1;
      break;
    }
  }
  const std::size_t n = std::min<std::size_t>(curve.size(), static_cast<std::size_t>(std::max(tail, 1)));
  double sum = 0.0;
  for (std::size_t i = curve.size() - n; i < curve.size(); ++i) sum += curve[i];
  s.final_throughput = sum / static_cast<double>(n);
  return s;
}

}  // namespace uavnoma
