#include <benchmark/benchmark.h>

#include <random>

#include "uavnoma/agent.hpp"
#include "uavnoma/clustering.hpp"
#include "uavnoma/env.hpp"
#include "uavnoma/neuralnet.hpp"

using namespace uavnoma;

static void BM_Forward(benchmark::State& state) {
  QNetwork net({18, 70, 84}, 1);
  const std::vector<double> s(18, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(s));
}
BENCHMARK(BM_Forward);

static void BM_TrainStep(benchmark::State& state) {
  QNetwork net({18, 70, 84}, 1);
  AdamOptimizer opt(net);
  TrainingBatch b;
  b.states = Eigen::MatrixXd::Random(18, state.range(0));
  b.targets = Eigen::VectorXd::Random(state.range(0));
  for (int i = 0; i < state.range(0); ++i) b.actions.push_back(i % 84);
  for (auto _ : state) benchmark::DoNotOptimize(train_step(net, opt, b));
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128);

static void BM_EnvStep(benchmark::State& state) {
  SimConfig cfg;
  Environment env(cfg, ActionSpace(3));
  std::mt19937_64 rng(1);
  env.reset(1);
  for (auto _ : state) {
    if (env.done()) env.reset(rng());
    std::vector<int> a;
    for (int u = 0; u < 3; ++u) {
      const int n = env.cluster_size(u);
      a.push_back(env.action_space().encode(Movement::kHover, n == 0 ? 1 : n, 0));
    }
    benchmark::DoNotOptimize(env.step(a));
  }
}
BENCHMARK(BM_EnvStep);

static void BM_ClusterUsers(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0, 1000);
  std::vector<Vec2> users(static_cast<std::size_t>(state.range(0))), uavs(3);
  for (auto& p : users) p = {d(rng), d(rng)};
  for (auto& p : uavs) p = {d(rng), d(rng)};
  ClusteringConfig cfg;
  cfg.max_cluster_size = static_cast<int>((users.size() + 2) / 3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cluster_users(users, uavs, cfg, seed++));
}
BENCHMARK(BM_ClusterUsers)->Arg(6)->Arg(30);

static void BM_SelectAction(benchmark::State& state) {
  const ActionSpace space(3);
  const ActionMask m = space.mask(2);
  std::vector<double> q(84);
  std::mt19937_64 rng(3);
  for (auto& x : q) x = std::normal_distribution<double>()(rng);
  for (auto _ : state) benchmark::DoNotOptimize(select_action(q, m, 0.1, rng));
}
BENCHMARK(BM_SelectAction);
BENCHMARK_MAIN();
