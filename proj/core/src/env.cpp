#include "uavnoma/env.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace uavnoma {

namespace {

constexpr double kPositionEps = 1e-9;

bool same_point(const Vec3& a, const Vec3& b) {
  return std::abs(a.x - b.x) <= 1e-6 && std::abs(a.y - b.y) <= 1e-6 && std::abs(a.z - b.z) <= 1e-6;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

struct Field {
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": '" + v + "'");
  }
}

std::string fmt(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

#define UAVNOMA_DOUBLE(name)                                                                 \
  {                                                                                          \
    #name, Field {                                                                           \
      [](SimConfig& c, const std::string& v) { c.name = parse_double(#name, v); },           \
          [](const SimConfig& c) { return fmt(c.name); }                                     \
    }                                                                                        \
  }
#define UAVNOMA_INT(name)                                                                    \
  {                                                                                          \
    #name, Field {                                                                           \
      [](SimConfig& c, const std::string& v) {                                               \
        c.name = static_cast<decltype(c.name)>(parse_int(#name, v));                         \
      },                                                                                     \
          [](const SimConfig& c) { return std::to_string(c.name); }                          \
    }                                                                                        \
  }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      UAVNOMA_DOUBLE(x_min),
      UAVNOMA_DOUBLE(x_max),
      UAVNOMA_DOUBLE(y_min),
      UAVNOMA_DOUBLE(y_max),
      UAVNOMA_DOUBLE(h_min),
      UAVNOMA_DOUBLE(h_max),
      UAVNOMA_INT(num_uavs),
      UAVNOMA_INT(num_users),
      UAVNOMA_INT(max_cluster_size),
      UAVNOMA_DOUBLE(bandwidth_hz),
      UAVNOMA_DOUBLE(carrier_hz),
      UAVNOMA_DOUBLE(noise_dbm_per_hz),
      UAVNOMA_DOUBLE(user_v_max),
      UAVNOMA_DOUBLE(uav_speed),
      UAVNOMA_DOUBLE(p_max_dbm),
      UAVNOMA_DOUBLE(recluster_interval),
      UAVNOMA_DOUBLE(r_qos_bps),
      UAVNOMA_DOUBLE(dt),
      UAVNOMA_DOUBLE(horizon),
      {"fading",
       Field{[](SimConfig& c, const std::string& v) {
               if (v == "unit") c.fading = FadingMode::kUnit;
               else if (v == "rayleigh") c.fading = FadingMode::kRayleigh;
               else throw ConfigError("fading must be 'unit' or 'rayleigh'");
             },
             [](const SimConfig& c) {
               return std::string(c.fading == FadingMode::kUnit ? "unit" : "rayleigh");
             }}},
      {"access",
       Field{[](SimConfig& c, const std::string& v) {
               if (v == "noma") c.access = AccessScheme::kNoma;
               else if (v == "oma") c.access = AccessScheme::kOma;
               else throw ConfigError("access must be 'noma' or 'oma'");
             },
             [](const SimConfig& c) {
               return std::string(c.access == AccessScheme::kNoma ? "noma" : "oma");
             }}},
      UAVNOMA_INT(map_cells),
      UAVNOMA_INT(block_cells),
      UAVNOMA_DOUBLE(open_block_probability),
      UAVNOMA_INT(map_seed),
      UAVNOMA_INT(destination_seed),
      UAVNOMA_DOUBLE(init_h_min),
      UAVNOMA_DOUBLE(init_h_max),
      UAVNOMA_DOUBLE(user_weight),
      UAVNOMA_DOUBLE(uav_weight),
      UAVNOMA_INT(kmeans_iterations),
      UAVNOMA_INT(kmeans_restarts),
      UAVNOMA_DOUBLE(circle_radius),
      UAVNOMA_DOUBLE(circle_height),
  };
  return table;
}

#undef UAVNOMA_DOUBLE
#undef UAVNOMA_INT

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double SimConfig::p_max_w() const { return dbm_to_watts(p_max_dbm); }

int SimConfig::steps() const { return static_cast<int>(std::llround(horizon / dt)); }

double SimConfig::noise_power_w() const { return dbm_to_watts(noise_dbm_per_hz) * bandwidth_hz; }

void SimConfig::validate() const {
  if (num_uavs < 1 || num_users < 1) throw ConfigError("need at least one UAV and one user");
  if (max_cluster_size < 1) throw ConfigError("max_cluster_size must be >= 1");
  if (static_cast<long>(num_uavs) * max_cluster_size < num_users) {
    throw InfeasibleCapacityError("infeasible capacity: num_uavs * max_cluster_size < num_users");
  }
  if (!(x_max > x_min) || !(y_max > y_min) || !(h_max > h_min) || !(h_min > 1.0)) {
    throw ConfigError("invalid service area bounds");
  }
  if (!(init_h_min >= h_min) || !(init_h_max <= h_max) || init_h_min > init_h_max) {
    throw ConfigError("initial altitude band outside [h_min, h_max]");
  }
  if (!(dt > 0.0) || !(horizon >= dt)) throw ConfigError("invalid dt / horizon");
  if (!(bandwidth_hz > 0.0) || !(carrier_hz > 0.0)) throw ConfigError("invalid radio parameters");
  if (!(user_v_max > 0.0) || !(uav_speed > 0.0)) throw ConfigError("speeds must be positive");
  if (map_cells < 3 || block_cells < 1) throw ConfigError("map must be at least 3x3 cells");
  if (!(user_weight > 0.0) || !(uav_weight > 0.0)) throw ConfigError("weights must be positive");
}

void apply_override(SimConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(config, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

SimConfig load_config(const std::string& text, SimConfig base) {
  std::istringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_override(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

std::string canonical_config(const SimConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + "=" + field.get(config) + "\n";
  return out;
}

double EpisodeTrace::throughput_bits(double dt) const {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.sum_rate_bps;
  return sum * dt;
}

Vec3 apply_movement(const Vec3& position, Movement movement, const SimConfig& config) {
  const double step = config.uav_speed * config.dt;
  Vec3 p = position;
  switch (movement) {
    case Movement::kUp: p.z += step; break;
    case Movement::kDown: p.z -= step; break;
    case Movement::kForward: p.y += step; break;
    case Movement::kBackward: p.y -= step; break;
    case Movement::kLeft: p.x -= step; break;
    case Movement::kRight: p.x += step; break;
    case Movement::kHover: break;
  }
  const bool inside = p.x >= config.x_min - kPositionEps && p.x <= config.x_max + kPositionEps &&
                      p.y >= config.y_min - kPositionEps && p.y <= config.y_max + kPositionEps &&
                      p.z >= config.h_min - kPositionEps && p.z <= config.h_max + kPositionEps;
  return inside ? p : position;
}

double reward(double slot_sum_rate_bps, int penalty) {
  if (penalty < 0) throw std::invalid_argument("negative penalty");
  return std::ldexp(slot_sum_rate_bps, -penalty);
}

std::vector<ConstraintViolation> audit_row(const TraceRow& row, const SimConfig& config) {
  std::vector<ConstraintViolation> out;
  auto fail = [&](const char* c, std::string d) { out.push_back({c, std::move(d)}); };
  for (std::size_t u = 0; u < row.uav_positions.size(); ++u) {
    const Vec3& p = row.uav_positions[u];
    if (p.x < config.x_min - kPositionEps || p.x > config.x_max + kPositionEps ||
        p.y < config.y_min - kPositionEps || p.y > config.y_max + kPositionEps ||
        p.z < config.h_min - kPositionEps || p.z > config.h_max + kPositionEps) {
      fail("bounds", "UAV " + std::to_string(u) + " outside service volume");
    }
    for (std::size_t v = u + 1; v < row.uav_positions.size(); ++v) {
      if (same_point(p, row.uav_positions[v])) {
        fail("separation", "UAVs " + std::to_string(u) + " and " + std::to_string(v) + " coincide");
      }
    }
  }
  std::vector<int> seen(row.serving.size(), 0);
  for (const auto& dc : row.clusters) {
    if (static_cast<int>(dc.order.size()) > config.max_cluster_size) {
      fail("association", "cluster " + std::to_string(dc.uav) + " exceeds eta");
    }
    double used = 0.0;
    for (int k : dc.order) {
      if (k < 0 || k >= static_cast<int>(seen.size())) {
        fail("association", "unknown user in cluster");
        continue;
      }
      ++seen[static_cast<std::size_t>(k)];
      if (row.serving[static_cast<std::size_t>(k)] != dc.uav) {
        fail("association", "user " + std::to_string(k) + " listed under a non-serving UAV");
      }
      used += row.power.user_fraction.at(static_cast<std::size_t>(k)) *
              row.power.uav_power.at(static_cast<std::size_t>(dc.uav));
    }
    const double cap = row.power.uav_power.at(static_cast<std::size_t>(dc.uav));
    if (used > cap * (1.0 + 1e-12)) fail("power", "UAV " + std::to_string(dc.uav) + " exceeds P_u");
    for (std::size_t i = 1; i < dc.equivalent_gain.size(); ++i) {
      if (dc.equivalent_gain[i] < dc.equivalent_gain[i - 1]) {
        fail("sic-order", "decoding order of UAV " + std::to_string(dc.uav) + " not ascending in G");
      }
    }
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (seen[k] != 1) fail("association", "user " + std::to_string(k) + " served " + std::to_string(seen[k]) + " times");
  }
  return out;
}

Environment::Environment(SimConfig config, ActionSpace actions)
    : config_(std::move(config)),
      actions_(std::move(actions)),
      map_([&] {
        config_.validate();
        MapOptions opt;
        opt.cell_size = (config_.x_max - config_.x_min) / config_.map_cells;
        opt.v_max = config_.user_v_max;
        opt.block_size = config_.block_cells;
        opt.open_block_probability = config_.open_block_probability;
        return build_map(config_.map_cells, config_.map_cells, config_.map_seed,
                         mix(config_.map_seed, 1), opt);
      }()) {
  if (actions_.max_cluster_size() > config_.max_cluster_size) {
    throw ConfigError("action space covers clusters larger than max_cluster_size");
  }
  channel_.carrier_hz = config_.carrier_hz;
  channel_.bandwidth_hz = config_.bandwidth_hz;
  channel_.noise_dbm_per_hz = config_.noise_dbm_per_hz;
  channel_.fading = config_.fading;
  reset(0);
}

void Environment::reset(std::uint64_t episode_seed) {
  episode_seed_ = episode_seed;
  rng_.seed(mix(episode_seed, 0xA11CE));
  t_ = 0.0;
  slot_ = 0;
  recluster_count_ = 0;
  trace_ = {};

  std::uniform_real_distribution<double> ux(config_.x_min, config_.x_max);
  std::uniform_real_distribution<double> uy(config_.y_min, config_.y_max);
  std::uniform_real_distribution<double> uz(config_.init_h_min, config_.init_h_max);
  uavs_.clear();
  for (int u = 0; u < config_.num_uavs; ++u) uavs_.push_back({ux(rng_), uy(rng_), uz(rng_)});

  const auto destinations = map_.perimeter_road_cells();
  std::uniform_int_distribution<std::size_t> pick(0, destinations.size() - 1);
  std::mt19937_64 dest_rng(config_.destination_seed >= 0
                               ? mix(static_cast<std::uint64_t>(config_.destination_seed), 0xDE57)
                               : rng_());
  users_.clear();
  for (int k = 0; k < config_.num_users; ++k) {
    Route r = shortest_path(map_, map_.origin(), destinations[pick(dest_rng)]);
    UserState user = make_user(k, map_, std::move(r));
    users_.push_back(std::move(user));
  }

  fading_streams_.clear();
  for (int i = 0; i < config_.num_uavs * config_.num_users; ++i) {
    fading_streams_.emplace_back(config_.fading, mix(episode_seed, 0xFADE0000ULL + static_cast<std::uint64_t>(i)));
  }
  fading_.assign(static_cast<std::size_t>(config_.num_uavs * config_.num_users), 1.0);

  recluster();
  recompute_gains(true);
}

void Environment::recluster() {
  std::vector<Vec2> users;
  for (const auto& u : users_) users.push_back({u.position.x + config_.x_min, u.position.y + config_.y_min});
  std::vector<Vec2> uavs;
  for (const auto& p : uavs_) uavs.push_back({p.x, p.y});
  ClusteringConfig cc;
  cc.num_clusters = config_.num_uavs;
  cc.max_cluster_size = config_.max_cluster_size;
  cc.max_iterations = config_.kmeans_iterations;
  cc.restarts = config_.kmeans_restarts;
  cc.user_weight = config_.user_weight;
  cc.uav_weight = config_.uav_weight;
  cluster_set_ = cluster_users(users, uavs, cc, mix(episode_seed_, 0xC1u + static_cast<std::uint64_t>(recluster_count_)));
  ++recluster_count_;
  assoc_ = cluster_set_.association();
  trace_.clusterings.emplace_back(t_, assoc_.serving_vector());
}

void Environment::recompute_gains(bool redraw_fading) {
  gains_ = GainMatrix(config_.num_uavs, config_.num_users);
  const double fc = channel_.carrier_ghz();
  for (int u = 0; u < config_.num_uavs; ++u) {
    for (int k = 0; k < config_.num_users; ++k) {
      const std::size_t link = static_cast<std::size_t>(u * config_.num_users + k);
      if (redraw_fading) fading_[link] = fading_streams_[link].draw();
      const Vec2 up{users_[static_cast<std::size_t>(k)].position.x + config_.x_min,
                    users_[static_cast<std::size_t>(k)].position.y + config_.y_min};
      const Vec3& q = uavs_[static_cast<std::size_t>(u)];
      const double d = distance_3d(up, q);
      gains_(u, k) = channel_gain(path_loss(d, q.z, fc).expected_db, fading_[link]);
    }
  }
  PowerAllocation equal;
  equal.uav_power.assign(static_cast<std::size_t>(config_.num_uavs), config_.p_max_w());
  equal.user_fraction.assign(static_cast<std::size_t>(config_.num_users), 0.0);
  for (int u = 0; u < config_.num_uavs; ++u) {
    const auto& c = assoc_.cluster(u);
    for (int k : c) equal.user_fraction[static_cast<std::size_t>(k)] = 1.0 / static_cast<double>(c.size());
  }
  orders_.clear();
  for (auto& dc : order_clusters(gains_, assoc_, equal, channel_.noise_power_w())) orders_.push_back(dc.order);
}

Snapshot Environment::snapshot() const { return {uavs_, gains_, assoc_, orders_}; }

StateScaling Environment::default_scaling() const {
  StateScaling s;
  s.x_max = config_.x_max;
  s.y_max = config_.y_max;
  s.h_max = config_.h_max;
  return s;
}

std::vector<double> Environment::observe(int uav, const StateScaling& scaling) const {
  return abstract_state(snapshot(), uav, config_.max_cluster_size, scaling);
}

bool Environment::in_bounds(const Vec3& p) const {
  return p.x >= config_.x_min - kPositionEps && p.x <= config_.x_max + kPositionEps &&
         p.y >= config_.y_min - kPositionEps && p.y <= config_.y_max + kPositionEps &&
         p.z >= config_.h_min - kPositionEps && p.z <= config_.h_max + kPositionEps;
}

std::vector<Vec3> Environment::resolve_collisions(const std::vector<Vec3>& proposed) const {
  std::vector<Vec3> out = proposed;
  const std::size_t n = out.size();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n && !changed; ++i) {
      for (std::size_t j = i + 1; j < n && !changed; ++j) {
        if (!same_point(out[i], out[j])) continue;
        // The higher id yields; if it is already hovering, the lower id moved
        // onto it and must hover instead.
        const bool j_moved = !same_point(out[j], uavs_[j]);
        const std::size_t yield = j_moved ? j : i;
        out[yield] = uavs_[yield];
        changed = true;
      }
    }
  }
  return out;
}

StepResult Environment::step(const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != config_.num_uavs) {
    throw std::invalid_argument("one action per UAV is required");
  }
  std::vector<Vec3> proposed;
  std::vector<std::vector<double>> gears;
  for (int u = 0; u < config_.num_uavs; ++u) {
    const int a = actions[static_cast<std::size_t>(u)];
    const ActionMask m = mask(u);
    if (a < 0 || a >= actions_.size() || !m[static_cast<std::size_t>(a)]) {
      throw std::logic_error("action " + std::to_string(a) + " is masked for UAV " + std::to_string(u));
    }
    const DecodedAction d = actions_.decode(a);
    proposed.push_back(apply_movement(uavs_[static_cast<std::size_t>(u)], d.movement, config_));
    if (cluster_size(u) > 0) {
      gears.emplace_back(d.fractions.begin(), d.fractions.end());
    } else {
      gears.emplace_back();
    }
  }
  return execute(proposed, gears, actions);
}

StepResult Environment::step_commands(const std::vector<UavCommand>& commands) {
  if (static_cast<int>(commands.size()) != config_.num_uavs) {
    throw std::invalid_argument("one command per UAV is required");
  }
  const double reach = config_.uav_speed * config_.dt;
  std::vector<Vec3> proposed;
  std::vector<std::vector<double>> gears;
  for (int u = 0; u < config_.num_uavs; ++u) {
    const Vec3& p = uavs_[static_cast<std::size_t>(u)];
    const UavCommand& c = commands[static_cast<std::size_t>(u)];
    Vec3 d{c.target.x - p.x, c.target.y - p.y, c.target.z - p.z};
    const double len = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    Vec3 next = p;
    if (len > 0.0) {
      const double f = std::min(1.0, reach / len);
      next = {p.x + d.x * f, p.y + d.y * f, p.z + d.z * f};
    }
    next.x = std::clamp(next.x, config_.x_min, config_.x_max);
    next.y = std::clamp(next.y, config_.y_min, config_.y_max);
    next.z = std::clamp(next.z, config_.h_min, config_.h_max);
    proposed.push_back(next);
    if (!c.fractions.empty() && static_cast<int>(c.fractions.size()) != cluster_size(u)) {
      throw std::invalid_argument("command power split arity differs from cluster size");
    }
    gears.push_back(c.fractions);
  }
  return execute(proposed, gears, std::vector<int>(static_cast<std::size_t>(config_.num_uavs), -1));
}

StepResult Environment::execute(const std::vector<Vec3>& proposed,
                                const std::vector<std::vector<double>>& gears,
                                std::vector<int> action_record) {
  if (done()) throw std::logic_error("episode already finished");
  uavs_ = resolve_collisions(proposed);
  recompute_gains(true);

  const double noise = channel_.noise_power_w();
  PowerAllocation power;
  power.uav_power.assign(static_cast<std::size_t>(config_.num_uavs), config_.p_max_w());
  power.user_fraction.assign(static_cast<std::size_t>(config_.num_users), 0.0);
  for (int u = 0; u < config_.num_uavs; ++u) {
    const auto& c = assoc_.cluster(u);
    for (int k : c) power.user_fraction[static_cast<std::size_t>(k)] = 1.0 / static_cast<double>(c.size());
  }
  std::vector<DecodedCluster> clusters = order_clusters(gains_, assoc_, power, noise);
  for (int u = 0; u < config_.num_uavs; ++u) {
    const auto& g = gears[static_cast<std::size_t>(u)];
    if (!g.empty()) assign_gear(clusters[static_cast<std::size_t>(u)].order, g, power);
  }

  const bool noma = config_.access == AccessScheme::kNoma;
  if (noma) {
    evaluate_noma(clusters, gains_, assoc_, power, noise, config_.bandwidth_hz);
  } else {
    evaluate_oma(clusters, gains_, assoc_, power, noise, config_.bandwidth_hz);
  }

  TraceRow row;
  row.t = t_;
  row.uav_positions = uavs_;
  for (const auto& u : users_) row.user_positions.push_back({u.position.x + config_.x_min, u.position.y + config_.y_min});
  row.serving = assoc_.serving_vector();
  row.actions = std::move(action_record);
  row.user_rate_bps.assign(static_cast<std::size_t>(config_.num_users), 0.0);
  for (const auto& dc : clusters) {
    for (std::size_t i = 0; i < dc.order.size(); ++i) {
      row.user_rate_bps[static_cast<std::size_t>(dc.order[i])] = dc.rate_bps[i];
    }
  }
  row.sum_rate_bps = slot_sum_rate(clusters);

  // QoS penalty with a one-step lookahead over the power gears of each cluster.
  int penalty = 0;
  for (const auto& dc : clusters) {
    const int violators = static_cast<int>(std::count_if(
        dc.rate_bps.begin(), dc.rate_bps.end(), [&](double r) { return r < config_.r_qos_bps; }));
    if (violators == 0) continue;
    const int n = static_cast<int>(dc.order.size());
    bool satisfiable = false;
    std::vector<std::vector<double>> candidates;
    try {
      const auto& table = actions_.gear_table(n);
      candidates.assign(table.begin(), table.end());
    } catch (const std::out_of_range&) {
    }
    candidates.emplace_back(static_cast<std::size_t>(n), 1.0 / n);
    for (const auto& gear : candidates) {
      PowerAllocation trial = power;
      assign_gear(dc.order, gear, trial);
      bool ok = true;
      if (noma) {
        for (std::size_t i = 0; i < dc.order.size() && ok; ++i) {
          ok = user_rate(sinr_decoded(i, dc.order, dc.uav, gains_, assoc_, trial, noise),
                         config_.bandwidth_hz) >= config_.r_qos_bps;
        }
      } else {
        for (double r : oma_rate(dc.order, dc.uav, gains_, assoc_, trial, noise, config_.bandwidth_hz)) {
          ok = ok && r >= config_.r_qos_bps;
        }
      }
      if (ok) {
        satisfiable = true;
        break;
      }
    }
    if (satisfiable) penalty += violators;
  }
  row.penalty = penalty;
  row.reward = reward(row.sum_rate_bps, penalty);
  row.clusters = std::move(clusters);
  row.power = std::move(power);

  if (!users_frozen_) {
    for (auto& u : users_) u = advance_user(std::move(u), map_, config_.dt);
  }
  ++slot_;
  t_ = slot_ * config_.dt;
  if (recluster_enabled_ && config_.recluster_interval > 0.0 && !done()) {
    const long per = std::lround(config_.recluster_interval / config_.dt);
    if (per > 0 && slot_ % per == 0) {
      recluster();
      row.reclustered_after = true;
    }
  }
  recompute_gains(false);

  trace_.rows.push_back(std::move(row));
  StepResult res;
  res.rewards.assign(static_cast<std::size_t>(config_.num_uavs), trace_.rows.back().reward);
  res.row = &trace_.rows.back();
  res.done = done();
  return res;
}

void Environment::set_uav_positions(std::vector<Vec3> positions) {
  if (static_cast<int>(positions.size()) != config_.num_uavs) throw std::invalid_argument("UAV count");
  uavs_ = std::move(positions);
  recompute_gains(false);
}

void Environment::set_users(std::vector<UserState> users) {
  if (static_cast<int>(users.size()) != config_.num_users) throw std::invalid_argument("user count");
  users_ = std::move(users);
  recompute_gains(false);
}

void Environment::set_association(const Association& assoc) {
  if (assoc.num_uavs() != config_.num_uavs || assoc.num_users() != config_.num_users) {
    throw std::invalid_argument("association shape");
  }
  if (static_cast<int>(assoc.max_cluster_size()) > config_.max_cluster_size) {
    throw std::invalid_argument("association exceeds eta");
  }
  assoc_ = assoc;
  recompute_gains(false);
}

}  // namespace uavnoma
