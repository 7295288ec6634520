#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace uavnoma {

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

/// Fully connected Q-function approximator: ReLU on hidden layers, identity on
/// the output layer (one output per concatenated action).
class QNetwork {
 public:
  QNetwork() = default;
  /// layer_sizes = {inputs, hidden..., outputs}. Weights and biases are drawn
  /// from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  QNetwork(std::vector<int> layer_sizes, std::uint64_t seed);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Eigen::VectorXd forward(std::span<const double> state) const;
  /// Column-per-sample batch evaluation.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& states) const;

  std::size_t num_parameters() const;
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  friend bool operator==(const QNetwork& a, const QNetwork& b);

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

/// Minibatch of (state, taken action, TD target) triples, one column per sample.
struct TrainingBatch {
  Eigen::MatrixXd states;
  std::vector<int> actions;
  Eigen::VectorXd targets;

  std::size_t size() const { return actions.size(); }
};

/// Mean over the batch of (y - Q(S, A))^2 on the taken action only. If `grads`
/// is non-null it receives dLoss/dparams with the network's layer shapes.
double batch_loss(const QNetwork& net, const TrainingBatch& batch,
                  std::vector<DenseLayer>* grads = nullptr);

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  explicit AdamOptimizer(const QNetwork& net, double learning_rate = 1e-3, double beta1 = 0.9,
                         double beta2 = 0.999, double epsilon = 1e-8);

  void apply(QNetwork& net, const std::vector<DenseLayer>& grads);
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr);
  long steps() const { return step_; }

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long step_ = 0;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
};

/// One optimizer update; returns the loss before the update.
double train_step(QNetwork& net, AdamOptimizer& optimizer, const TrainingBatch& batch);

/// Deep copy of all parameters; layer shapes must match.
void copy_params(const QNetwork& source, QNetwork& dest);

/// Plain-text checkpoint: "uavnoma-qnet 1", layer sizes, then every parameter
/// in hexfloat so a round trip is bit-exact.
void save_checkpoint(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace uavnoma
