#include "doctest.h"

#include <cmath>
#include <random>

#include "uavnoma/agent.hpp"

using namespace uavnoma;

TEST_CASE("action space layout") {
  const ActionSpace space(3);
  CHECK(space.size() == 84);
  CHECK(space.encode(Movement::kUp, 1, 0) == 0);
  CHECK(space.encode(Movement::kDown, 1, 0) == 4);
  CHECK(space.encode(Movement::kUp, 2, 0) == 28);
  CHECK(space.encode(Movement::kHover, 3, 3) == 83);
  const auto d = space.decode(28 + 4 * 2 + 3);
  CHECK(d.movement == Movement::kForward);
  CHECK(d.cluster_size == 2);
  CHECK(d.gear == 3);
  CHECK(d.fractions.size() == 2);
  CHECK(d.fractions[0] == 0.6);
  CHECK_THROWS(space.decode(84));
}

TEST_CASE("gear tables give the weakest user the largest share") {
  const auto gears = default_gear_tables();
  for (int n = 1; n <= 3; ++n) {
    CHECK(gears[static_cast<std::size_t>(n)].size() == 4);
    for (const auto& g : gears[static_cast<std::size_t>(n)]) {
      double s = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        s += g[i];
        if (i) CHECK(g[i] <= g[i - 1]);
      }
      CHECK(s == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("masks") {
  const ActionSpace space(3);
  auto count = [](const ActionMask& m) {
    int c = 0;
    for (auto v : m) c += v;
    return c;
  };
  CHECK(count(space.mask(2)) == 28);
  CHECK(space.mask(2)[28] == 1);
  CHECK(space.mask(2)[27] == 0);
  CHECK(count(space.mask(0)) == 7);
  const ActionSpace flat(3, default_gear_tables(), false);
  CHECK(count(flat.mask(3)) == 20);
  CHECK(flat.mask(3)[space.encode(Movement::kUp, 3, 0)] == 0);
  const ActionSpace mutual(std::vector<int>{2}, default_gear_tables(), true);
  CHECK(mutual.size() == 28);
  CHECK_THROWS(mutual.mask(3));
}

TEST_CASE("state layout") {
  Snapshot snap;
  snap.uav_positions = {{100, 200, 80}, {300, 400, 90}};
  snap.gains = GainMatrix(2, 3, 1e-10);
  snap.gains(0, 2) = 1e-8;
  snap.association = Association(2, std::vector<int>{0, 1, 0});
  snap.decoding_orders = {{0, 2}, {1}};
  StateScaling sc;
  const auto s = abstract_state(snap, 0, 3, sc);
  REQUIRE(static_cast<int>(s.size()) == state_size(2, 3, 3));
  CHECK(s.size() == 3 + 3 + 3 + 3);
  CHECK(s[0] == doctest::Approx(0.1));
  CHECK(s[3] == doctest::Approx(0.3));
  CHECK(s[6] == doctest::Approx(sc.scale_gain(1e-10)));
  CHECK(s[7] == doctest::Approx(sc.scale_gain(1e-8)));
  CHECK(s[8] == 0.0);
  CHECK(s[9] == doctest::Approx(sc.scale_gain(1e-10)));
  CHECK(s[10] == 0.0);
  CHECK(state_size(3, 6, 3) == 18);
}

TEST_CASE("epsilon-greedy") {
  const std::vector<double> q{5.0, 9.0, 9.0, 1.0};
  const ActionMask all{1, 1, 1, 1};
  const ActionMask m{1, 0, 1, 1};
  std::mt19937_64 rng(3);
  CHECK(select_action(q, all, 0.0, rng) == 1);
  CHECK(select_action(q, m, 0.0, rng) == 2);
  CHECK(masked_argmax(q, m) == 2);

  // Uniform over unmasked actions at epsilon 1: chi-square with 2 dof.
  std::vector<int> counts(4, 0);
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(select_action(q, m, 1.0, rng))];
  CHECK(counts[1] == 0);
  double chi2 = 0;
  for (int a : {0, 2, 3}) chi2 += std::pow(counts[static_cast<std::size_t>(a)] - n / 3.0, 2) / (n / 3.0);
  CHECK(chi2 < 13.8);  // p = 0.001
}

TEST_CASE("replay ring buffer") {
  ReplayMemory r(3);
  for (int i = 0; i < 5; ++i) r.push(Experience{{double(i)}, i, 0, {}, {}, false});
  CHECK(r.full());
  CHECK(r.size() == 3);
  std::vector<double> kept;
  for (std::size_t i = 0; i < 3; ++i) kept.push_back(r[i].state[0]);
  std::sort(kept.begin(), kept.end());
  CHECK(kept == std::vector<double>{2, 3, 4});
  std::mt19937_64 rng(1);
  for (auto i : r.sample_indices(100, rng)) CHECK(i < 3);
  CHECK_THROWS(ReplayMemory(0));
}

TEST_CASE("epsilon schedule") {
  EpsilonSchedule e;
  CHECK(e.value(0, 100) == doctest::Approx(0.9));
  CHECK(e.value(80, 100) == doctest::Approx(0.05));
  CHECK(e.value(99, 100) == doctest::Approx(0.05));
  double prev = 1.0;
  for (int i = 0; i < 100; ++i) {
    CHECK(e.value(i, 100) <= prev);
    prev = e.value(i, 100);
  }
}

TEST_CASE("td target") {
  QNetwork net({1, 1, 3}, 1);
  net.layers()[0].weights.setZero();
  net.layers()[0].bias.setConstant(1.0);
  net.layers()[1].weights.setZero();
  net.layers()[1].bias << 3.0, 7.0, 1.0;
  const std::vector<double> s{0.0};
  CHECK(td_target(2.0, s, net, {1, 0, 1}, 1.0) == 5.0);
  CHECK(td_target(2.0, s, net, {1, 1, 1}, 1.0) == 9.0);
  CHECK(td_target(2.0, s, net, {1, 1, 1}, 0.0) == 2.0);
  CHECK(td_target(2.0, s, net, {1, 1, 1}, 0.5, true) == 2.0);
}

TEST_CASE("train tick waits for a full replay and syncs the target") {
  HyperParams hp;
  hp.replay_capacity = 20;
  hp.batch_size = 8;
  hp.target_period = 1;
  DqnLearner learner(2, 3, hp, 5);
  const QNetwork before = learner.eval_net();
  for (int i = 0; i < 19; ++i) {
    learner.remember({{0.1 * i, 0.2}, i % 3, 1.0, {0.1, 0.1}, {1, 1, 1}, false});
    CHECK_FALSE(learner.tick().has_value());
  }
  CHECK(learner.eval_net() == before);
  learner.remember({{0.5, 0.5}, 0, 1.0, {0.1, 0.1}, {1, 1, 1}, true});
  CHECK(learner.tick().has_value());
  CHECK_FALSE(learner.eval_net() == before);
  CHECK(learner.target_net() == learner.eval_net());
}
