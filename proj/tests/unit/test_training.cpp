#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavnoma/experiment.hpp"
#include "uavnoma/training.hpp"

using namespace uavnoma;
namespace fs = std::filesystem;

namespace {

HyperParams small_hyper() {
  HyperParams hp;
  hp.replay_capacity = 300;
  hp.batch_size = 16;
  hp.hidden_units = 8;
  hp.target_period = 50;
  return hp;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uavnoma_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (auto s : {Scheme::kSdqn, Scheme::kSdqn2d, Scheme::kMutual, Scheme::kPrivateDqn, Scheme::kStaticCluster,
                 Scheme::kCircular}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_THROWS(parse_scheme("dqn"));
}

TEST_CASE("circular baseline stays on its orbit") {
  SimConfig cfg;
  cfg.horizon = 120.0;
  cfg.recluster_interval = 0.0;
  Environment env(cfg, ActionSpace(3));
  CircularPolicy policy;
  const auto trace = run_episode(env, policy, 4);
  const auto centre = env.clusters().centroids;
  // After the approach leg every UAV is on the circle at the orbit altitude.
  const auto& last = trace.rows.back();
  for (int u = 0; u < 3; ++u) {
    const Vec3 p = last.uav_positions[static_cast<std::size_t>(u)];
    const double r = std::hypot(p.x - centre[static_cast<std::size_t>(u)].x, p.y - centre[static_cast<std::size_t>(u)].y);
    CHECK(std::abs(r - cfg.circle_radius) <= cfg.uav_speed * cfg.dt);
    CHECK(p.z == doctest::Approx(cfg.circle_height));
  }
}

TEST_CASE("sdqn2d keeps altitude and mutual uses pairs") {
  TrainOptions opt;
  opt.episodes = 2;
  opt.hyper = small_hyper();
  std::vector<EpisodeTrace> traces;
  opt.on_episode = [&](const EpisodeLog&, const EpisodeTrace& t) { traces.push_back(t); };
  train(Scheme::kSdqn2d, SimConfig{}, opt);
  for (const auto& t : traces) {
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      for (int u = 0; u < 3; ++u) {
        CHECK(t.rows[i].uav_positions[static_cast<std::size_t>(u)].z ==
              t.rows[0].uav_positions[static_cast<std::size_t>(u)].z);
      }
    }
  }
  traces.clear();
  const auto res = train(Scheme::kMutual, SimConfig{}, opt);
  CHECK(res.config.max_cluster_size == 2);
  for (const auto& t : traces) {
    for (const auto& row : t.rows) {
      for (const auto& c : row.clusters) CHECK(c.order.size() == 2);
    }
  }
}

TEST_CASE("private-DQN has one network per UAV; sharing trains U times per step") {
  TrainOptions opt;
  opt.episodes = 3;
  opt.hyper = small_hyper();
  opt.hyper.replay_capacity = 600;  // 540 shared experiences per episode
  const auto shared = train(Scheme::kSdqn, SimConfig{}, opt);
  const auto priv = train(Scheme::kPrivateDqn, SimConfig{}, opt);
  CHECK(shared.nets.size() == 1);
  CHECK(priv.nets.size() == 3);
  REQUIRE(shared.log.size() == 3);
  CHECK(std::isnan(shared.log[0].mean_loss));
  CHECK_FALSE(std::isnan(shared.log[2].mean_loss));
  CHECK(shared.log[0].epsilon == doctest::Approx(0.9));
  CHECK(shared.log[2].epsilon < shared.log[0].epsilon);
}

TEST_CASE("curve summary uses full smoothing windows") {
  std::vector<double> c(30, 1.0);
  c[0] = 50.0;  // a lucky first episode must not count as convergence
  for (int i = 20; i < 30; ++i) c[static_cast<std::size_t>(i)] = 10.0;
  const auto s = summarize_curve(c, 10, 5);
  CHECK(s.final_throughput == 10.0);
  CHECK(s.max_smoothed == doctest::Approx(10.0));
  CHECK(s.episodes_to_90 == 29);
  CHECK(smooth({1, 2, 3}, 2) == std::vector<double>{1.0, 1.5, 2.5});
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("config hash tracks the configuration") {
  SimConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 40);
  b.uav_speed = 6.0;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("scenario outputs follow the CSV contracts and are reproducible") {
  ScenarioRequest req;
  req.scenario = "reclustering";
  req.seeds = {1};
  req.episodes = 2;
  req.eval_episodes = 1;
  req.hyper = small_hyper();
  req.out_dir = scratch("recl_a");
  const auto res = run_scenario(req);
  CHECK(slurp(req.out_dir / "sum_rate.csv").rfind(std::string(kSumRateColumns) + "\n", 0) == 0);
  CHECK(slurp(req.out_dir / "rates.csv").rfind(std::string(kRatesColumns) + "\n", 0) == 0);
  CHECK(slurp(req.out_dir / "clusters.csv").rfind(std::string(kClustersColumns) + "\n", 0) == 0);
  CHECK(fs::exists(req.out_dir / "summary.json"));
  CHECK(fs::exists(req.out_dir / "manifest.json"));

  ScenarioRequest again = req;
  again.out_dir = scratch("recl_b");
  const auto res2 = run_scenario(again);
  REQUIRE(res.files.size() == res2.files.size());
  for (std::size_t i = 0; i < res.files.size(); ++i) {
    if (res.files[i].filename() == "manifest.json") continue;
    CHECK(slurp(res.files[i]) == slurp(res2.files[i]));
  }
  fs::remove_all(req.out_dir);
  fs::remove_all(again.out_dir);
}

TEST_CASE("scenario errors are raised before any work") {
  ScenarioRequest req;
  req.scenario = "no-such-scenario";
  req.out_dir = scratch("err");
  CHECK_THROWS_AS(run_scenario(req), UnknownScenarioError);
  req.scenario = "noma-vs-oma";
  req.overrides = {{"num_users", "20"}};
  CHECK_THROWS_AS(run_scenario(req), InfeasibleCapacityError);
  req.overrides = {{"bogus", "1"}};
  CHECK_THROWS_AS(run_scenario(req), ConfigError);
  req.overrides.clear();
  req.out_dir = "/proc/uavnoma-cannot-write";
  CHECK_THROWS_AS(run_scenario(req), OutputDirError);
}
