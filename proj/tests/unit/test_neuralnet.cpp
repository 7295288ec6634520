#include "doctest.h"

#include <filesystem>
#include <random>

#include "uavnoma/neuralnet.hpp"

using namespace uavnoma;

TEST_CASE("shapes and initialization range") {
  QNetwork net({18, 70, 84}, 1);
  CHECK(net.input_size() == 18);
  CHECK(net.output_size() == 84);
  CHECK(net.num_parameters() == 18 * 70 + 70 + 70 * 84 + 84);
  const double bound = 1.0 / std::sqrt(18.0);
  CHECK(net.layers()[0].weights.cwiseAbs().maxCoeff() <= bound);
  const std::vector<double> s(18, 0.5);
  CHECK(net.forward(s).size() == 84);
  CHECK_THROWS(net.forward(std::vector<double>(17, 0.0)));
  CHECK(QNetwork({18, 70, 84}, 1) == net);
}

TEST_CASE("batch forward agrees with single forward") {
  QNetwork net({4, 6, 3}, 2);
  Eigen::MatrixXd states = Eigen::MatrixXd::Random(4, 5);
  const Eigen::MatrixXd q = net.forward_batch(states);
  for (int c = 0; c < 5; ++c) {
    const Eigen::VectorXd col = states.col(c);
    const Eigen::VectorXd one = net.forward(std::span<const double>(col.data(), 4));
    CHECK((q.col(c) - one).norm() < 1e-12);
  }
}

TEST_CASE("loss only on taken actions") {
  QNetwork net({2, 3, 2}, 3);
  TrainingBatch b;
  b.states = Eigen::MatrixXd::Constant(2, 1, 0.3);
  b.actions = {1};
  const Eigen::VectorXd q = net.forward(std::vector<double>{0.3, 0.3});
  b.targets = Eigen::VectorXd::Constant(1, q(1) + 2.0);
  CHECK(batch_loss(net, b) == doctest::Approx(4.0));
}

TEST_CASE("training reduces loss on a fixed regression") {
  QNetwork net({3, 16, 2}, 4);
  AdamOptimizer opt(net, 1e-2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  TrainingBatch b;
  b.states.resize(3, 32);
  b.targets.resize(32);
  for (int c = 0; c < 32; ++c) {
    for (int r = 0; r < 3; ++r) b.states(r, c) = u(rng);
    b.actions.push_back(c % 2);
    b.targets(c) = b.states(0, c) - 2 * b.states(2, c);
  }
  const double first = train_step(net, opt, b);
  double last = first;
  for (int i = 0; i < 500; ++i) last = train_step(net, opt, b);
  CHECK(last < 0.05 * first);
  CHECK(opt.steps() == 501);
}

TEST_CASE("copy and checkpoint round trip") {
  QNetwork a({5, 7, 3}, 9), b({5, 7, 3}, 10);
  CHECK_FALSE(a == b);
  copy_params(a, b);
  CHECK(a == b);
  QNetwork c({5, 8, 3}, 1);
  CHECK_THROWS(copy_params(a, c));

  const auto path = std::filesystem::temp_directory_path() / "uavnoma_ckpt_test.qnet";
  save_checkpoint(a, path);
  const QNetwork back = load_checkpoint(path);
  CHECK(back == a);
  CHECK(back.flatten() == a.flatten());
  std::filesystem::remove(path);
  CHECK_THROWS(load_checkpoint(path));
}
