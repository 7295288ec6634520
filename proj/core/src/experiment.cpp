#include "uavnoma/experiment.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace uavnoma {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Writer {
  fs::path dir;
  std::vector<fs::path>* files;

  std::ofstream open(const std::string& name) {
    fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw OutputDirError("cannot write " + p.string());
    files->push_back(p);
    return out;
  }
};

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputDirError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".uavsim-write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw OutputDirError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

json variant_json(const VariantSummary& v) {
  json j;
  j["variant"] = v.variant;
  j["seeds"] = v.seeds;
  j["final_throughput_bits"] = v.final_throughput;
  j["episodes_to_90"] = v.episodes_to_90;
  j["median_final_throughput_bits"] = v.median_final;
  j["median_episodes_to_90"] = v.median_episodes_to_90;
  return j;
}

VariantSummary summarize_variant(const std::string& name, const std::vector<std::uint64_t>& seeds,
                                 const std::vector<TrainResult>& runs) {
  VariantSummary v;
  v.variant = name;
  v.seeds = seeds;
  std::vector<double> tt;
  for (const auto& r : runs) {
    const auto s = summarize_curve(r.throughput_curve());
    v.final_throughput.push_back(s.final_throughput);
    v.episodes_to_90.push_back(s.episodes_to_90);
    tt.push_back(s.episodes_to_90);
  }
  v.median_final = median(v.final_throughput);
  v.median_episodes_to_90 = median(tt);
  return v;
}

struct Ctx {
  const ScenarioRequest& req;
  SimConfig config;
  Writer w;
  ScenarioResult& result;
  json summary = json::object();
};

TrainOptions options_for(const Ctx& c, std::uint64_t seed) {
  TrainOptions o;
  o.episodes = c.req.episodes;
  o.seed = seed;
  o.hyper = c.req.hyper;
  return o;
}

void save_nets(Ctx& c, const std::string& variant, std::uint64_t seed, const TrainResult& r) {
  for (std::size_t i = 0; i < r.nets.size(); ++i) {
    std::string name = "checkpoint_" + variant + "_seed" + std::to_string(seed);
    if (r.nets.size() > 1) name += "_uav" + std::to_string(i);
    name += ".qnet";
    const fs::path p = c.w.dir / name;
    save_checkpoint(r.nets[i], p);
    c.result.files.push_back(p);
  }
}

/// Trains one variant over every seed, writing a merged training CSV.
std::vector<TrainResult> train_variant(Ctx& c, const std::string& variant, Scheme scheme,
                                       const SimConfig& config) {
  std::vector<TrainResult> runs;
  auto out = c.w.open("training_" + variant + ".csv");
  bool header = true;
  for (auto seed : c.req.seeds) {
    runs.push_back(train(scheme, config, options_for(c, seed)));
    write_training_csv(out, variant, seed, runs.back().log, header);
    header = false;
    save_nets(c, variant, seed, runs.back());
  }
  c.result.variants.push_back(summarize_variant(variant, c.req.seeds, runs));
  return runs;
}

std::uint64_t eval_seed(std::uint64_t seed, int k) { return episode_seed(seed ^ 0xE7A1ULL, k + 1); }

double greedy_throughput(const TrainResult& r, std::uint64_t seed, int episodes, bool recluster) {
  auto policy = greedy_policy(r);
  Environment env(r.config, scheme_actions(r.scheme, r.config));
  env.set_reclustering(recluster);
  double sum = 0.0;
  for (int k = 0; k < episodes; ++k) sum += run_episode(env, *policy, eval_seed(seed, k)).throughput_bits(r.config.dt);
  return sum / episodes;
}

void scenario_noma_vs_oma(Ctx& c) {
  SimConfig noma = c.config;
  noma.access = AccessScheme::kNoma;
  SimConfig oma = c.config;
  oma.access = AccessScheme::kOma;
  train_variant(c, "noma", Scheme::kSdqn, noma);
  train_variant(c, "oma", Scheme::kSdqn, oma);
  const auto& v = c.result.variants;
  c.summary["noma_over_oma"] = v[0].median_final / v[1].median_final - 1.0;
}

void scenario_trajectory(Ctx& c) {
  auto traj = c.w.open("trajectory.csv");
  auto users = c.w.open("users.csv");
  auto clusters = c.w.open("clusters.csv");
  bool header = true;
  std::vector<TrainResult> runs;
  auto curves = c.w.open("training_sdqn.csv");
  for (auto seed : c.req.seeds) {
    // Snapshot the partially trained policy at the half-way episode.
    const int mid = std::max(1, c.req.episodes / 2);
    TrainOptions o = options_for(c, seed);
    o.snapshot_episodes = {mid};
    TrainResult r = train(Scheme::kSdqn, c.config, o);
    write_training_csv(curves, "sdqn", seed, r.log, header);
    for (const auto& [label, nets] : {std::pair<std::string, const std::vector<QNetwork>*>{
                                          "episode" + std::to_string(mid), &r.snapshots.at(0).second},
                                      {"episode" + std::to_string(c.req.episodes), &r.nets}}) {
      auto policy = greedy_policy(*nets);
      Environment env(r.config, scheme_actions(r.scheme, r.config));
      const EpisodeTrace trace = run_episode(env, *policy, eval_seed(seed, 0));
      write_trajectory_csv(traj, label, seed, trace, header);
      write_users_csv(users, label, seed, trace, header);
      write_clusters_csv(clusters, label, seed, trace, header);
      header = false;
    }
    save_nets(c, "sdqn", seed, r);
    runs.push_back(std::move(r));
  }
  c.result.variants.push_back(summarize_variant("sdqn", c.req.seeds, runs));
}

void scenario_reclustering(Ctx& c) {
  const auto runs = train_variant(c, "sdqn", Scheme::kSdqn, c.config);
  auto rates = c.w.open("rates.csv");
  auto sums = c.w.open("sum_rate.csv");
  auto clusters = c.w.open("clusters.csv");
  bool header = true;
  std::vector<double> with, without;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto seed = c.req.seeds[i];
    for (bool on : {true, false}) {
      const std::string label = on ? "recluster" : "static";
      auto policy = greedy_policy(runs[i]);
      Environment env(runs[i].config, scheme_actions(Scheme::kSdqn, runs[i].config));
      env.set_reclustering(on);
      const EpisodeTrace trace = run_episode(env, *policy, eval_seed(seed, 0));
      write_rates_csv(rates, label, seed, trace, header);
      write_sum_rate_csv(sums, label, seed, trace, header);
      write_clusters_csv(clusters, label, seed, trace, header);
      header = false;
    }
    with.push_back(greedy_throughput(runs[i], seed, c.req.eval_episodes, true));
    without.push_back(greedy_throughput(runs[i], seed, c.req.eval_episodes, false));
  }
  c.summary["eval_throughput_recluster_bits"] = with;
  c.summary["eval_throughput_static_bits"] = without;
  c.summary["recluster_gain"] = median(with) / median(without) - 1.0;
}

void scenario_sweep(Ctx& c) {
  auto out = c.w.open("sweep.csv");
  out << kSweepColumns << '\n';
  json grid = json::array();
  for (double p : c.req.sweep_powers_dbm) {
    for (double v : c.req.sweep_speeds) {
      SimConfig cfg = c.config;
      cfg.p_max_dbm = p;
      cfg.user_v_max = v;
      cfg.validate();
      std::vector<double> per_seed;
      for (auto seed : c.req.seeds) {
        const TrainResult r = train(Scheme::kSdqn, cfg, options_for(c, seed));
        const double t = greedy_throughput(r, seed, c.req.eval_episodes, true);
        out << num(p) << ',' << num(v) << ',' << seed << ',' << num(t) << '\n';
        per_seed.push_back(t);
      }
      grid.push_back({{"p_max_dbm", p}, {"user_v_max", v}, {"median_throughput_bits", median(per_seed)}});
    }
  }
  c.summary["sweep"] = grid;
}

void scenario_schemes(Ctx& c) {
  for (Scheme s : {Scheme::kSdqn, Scheme::kSdqn2d, Scheme::kMutual, Scheme::kPrivateDqn,
                   Scheme::kStaticCluster, Scheme::kCircular}) {
    train_variant(c, std::string(scheme_name(s)), s, c.config);
  }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"noma-vs-oma", "trajectory-snapshot", "reclustering",
                                                 "speed-power-sweep", "scheme-comparison"};
  return names;
}

bool is_scenario(const std::string& name) {
  const auto& n = scenario_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::string config_hash(const SimConfig& config) {
  const std::string body = canonical_config(config);
  const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SimConfig effective_config(const ScenarioRequest& request) {
  SimConfig c = request.base;
  for (const auto& [k, v] : request.overrides) apply_override(c, k, v);
  c.validate();
  return c;
}

ScenarioResult run_scenario(const ScenarioRequest& request) {
  if (!is_scenario(request.scenario)) throw UnknownScenarioError("unknown scenario '" + request.scenario + "'");
  if (request.seeds.empty()) throw ConfigError("at least one seed is required");
  if (request.episodes < 1) throw ConfigError("episodes must be >= 1");
  const SimConfig config = effective_config(request);
  ensure_writable(request.out_dir);

  ScenarioResult result;
  result.scenario = request.scenario;
  result.config_hash = config_hash(config);
  Ctx c{request, config, Writer{request.out_dir, &result.files}, result};

  if (request.scenario == "noma-vs-oma") scenario_noma_vs_oma(c);
  else if (request.scenario == "trajectory-snapshot") scenario_trajectory(c);
  else if (request.scenario == "reclustering") scenario_reclustering(c);
  else if (request.scenario == "speed-power-sweep") scenario_sweep(c);
  else scenario_schemes(c);

  json summary = c.summary;
  summary["scenario"] = request.scenario;
  summary["episodes"] = request.episodes;
  summary["variants"] = json::array();
  for (const auto& v : result.variants) summary["variants"].push_back(variant_json(v));
  {
    auto out = c.w.open("summary.json");
    out << summary.dump(2) << '\n';
  }

  json manifest;
  manifest["scenario"] = request.scenario;
  manifest["config_hash"] = result.config_hash;
  manifest["seeds"] = request.seeds;
  manifest["episodes"] = request.episodes;
  json ov = json::array();
  for (const auto& [k, v] : request.overrides) ov.push_back({{"key", k}, {"value", v}});
  manifest["overrides"] = ov;
  manifest["config"] = canonical_config(config);
  json outputs = json::array();
  for (const auto& f : result.files) outputs.push_back(f.filename().string());
  outputs.push_back("manifest.json");
  manifest["outputs"] = outputs;
  {
    auto out = c.w.open("manifest.json");
    out << manifest.dump(2) << '\n';
  }
  return result;
}

void write_training_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                        const std::vector<EpisodeLog>& log, bool header) {
  if (header) out << kTrainingColumns << '\n';
  for (const auto& e : log) {
    out << variant << ',' << seed << ',' << e.episode << ',' << num(e.mean_loss) << ',' << num(e.epsilon) << ','
        << num(e.throughput_bits) << ',' << num(e.mean_rate_bps) << '\n';
  }
}

void write_rates_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                     const EpisodeTrace& trace, bool header) {
  if (header) out << kRatesColumns << '\n';
  for (const auto& row : trace.rows) {
    for (const auto& dc : row.clusters) {
      for (std::size_t i = 0; i < dc.order.size(); ++i) {
        out << variant << ',' << seed << ',' << num(row.t) << ',' << dc.uav << ',' << dc.order[i] << ','
            << num(dc.equivalent_gain[i]) << ',' << num(dc.sinr[i]) << ',' << num(dc.rate_bps[i]) << '\n';
      }
    }
  }
}

void write_sum_rate_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                        const EpisodeTrace& trace, bool header) {
  if (header) out << kSumRateColumns << '\n';
  for (const auto& row : trace.rows) {
    out << variant << ',' << seed << ',' << num(row.t) << ',' << num(row.sum_rate_bps) << ',' << row.penalty << ','
        << (row.reclustered_after ? 1 : 0) << '\n';
  }
}

void write_clusters_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                        const EpisodeTrace& trace, bool header) {
  if (header) out << kClustersColumns << '\n';
  for (const auto& [t, serving] : trace.clusterings) {
    for (std::size_t k = 0; k < serving.size(); ++k) {
      out << variant << ',' << seed << ',' << num(t) << ',' << k << ',' << serving[k] << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                          const EpisodeTrace& trace, bool header) {
  if (header) out << kTrajectoryColumns << '\n';
  for (const auto& row : trace.rows) {
    for (std::size_t u = 0; u < row.uav_positions.size(); ++u) {
      const Vec3& p = row.uav_positions[u];
      out << variant << ',' << seed << ',' << num(row.t) << ',' << u << ',' << num(p.x) << ',' << num(p.y) << ','
          << num(p.z) << '\n';
    }
  }
}

void write_users_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                     const EpisodeTrace& trace, bool header) {
  if (header) out << kUsersColumns << '\n';
  for (const auto& row : trace.rows) {
    for (std::size_t k = 0; k < row.user_positions.size(); ++k) {
      const Vec2& p = row.user_positions[k];
      out << variant << ',' << seed << ',' << num(row.t) << ',' << k << ',' << num(p.x) << ',' << num(p.y) << '\n';
    }
  }
}

}  // namespace uavnoma
