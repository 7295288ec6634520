#include "uavnoma/neuralnet.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace uavnoma {

namespace {

constexpr const char* kCheckpointMagic = "uavnoma-qnet";
constexpr int kCheckpointVersion = 1;

}  // namespace

QNetwork::QNetwork(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs input and output layers");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const int fan_in = sizes_[i];
    const int fan_out = sizes_[i + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> init(-bound, bound);
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd(fan_out)};
    for (int c = 0; c < fan_in; ++c) {
      for (int r = 0; r < fan_out; ++r) layer.weights(r, c) = init(rng);
    }
    for (int r = 0; r < fan_out; ++r) layer.bias(r) = init(rng);
    layers_.push_back(std::move(layer));
  }
}

Eigen::VectorXd QNetwork::forward(std::span<const double> state) const {
  if (static_cast<int>(state.size()) != input_size()) {
    throw std::invalid_argument("state length does not match network input");
  }
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(state.data(), input_size());
  return forward_batch(x).col(0);
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& states) const {
  if (states.rows() != input_size()) throw std::invalid_argument("state length does not match network input");
  Eigen::MatrixXd a = states;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weights * a;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

std::size_t QNetwork::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

std::vector<double> QNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(num_parameters());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void QNetwork::unflatten(std::span<const double> params) {
  if (params.size() != num_parameters()) throw std::invalid_argument("parameter count mismatch");
  std::size_t at = 0;
  for (auto& l : layers_) {
    std::copy_n(params.data() + at, l.weights.size(), l.weights.data());
    at += static_cast<std::size_t>(l.weights.size());
    std::copy_n(params.data() + at, l.bias.size(), l.bias.data());
    at += static_cast<std::size_t>(l.bias.size());
  }
}

bool operator==(const QNetwork& a, const QNetwork& b) {
  return a.sizes_ == b.sizes_ && a.flatten() == b.flatten();
}

double batch_loss(const QNetwork& net, const TrainingBatch& batch, std::vector<DenseLayer>* grads) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw std::invalid_argument("empty training batch");
  if (batch.states.cols() != n || batch.targets.size() != n) {
    throw std::invalid_argument("batch components have inconsistent sizes");
  }
  const auto& layers = net.layers();
  // Forward pass keeping activations.
  std::vector<Eigen::MatrixXd> acts{batch.states};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::MatrixXd z = layers[i].weights * acts.back();
    z.colwise() += layers[i].bias;
    if (i + 1 < layers.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd& q = acts.back();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = batch.actions[static_cast<std::size_t>(j)];
    if (a < 0 || a >= q.rows()) throw std::out_of_range("batch action outside output layer");
    const double err = q(a, j) - batch.targets(j);
    loss += err * err;
    delta(a, j) = 2.0 * err / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (!grads) return loss;

  grads->resize(layers.size());
  for (std::size_t i = layers.size(); i-- > 0;) {
    (*grads)[i].weights = delta * acts[i].transpose();
    (*grads)[i].bias = delta.rowwise().sum();
    if (i > 0) {
      delta = layers[i].weights.transpose() * delta;
      delta = delta.cwiseProduct((acts[i].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

AdamOptimizer::AdamOptimizer(const QNetwork& net, double learning_rate, double beta1, double beta2,
                             double epsilon)
    : beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  set_learning_rate(learning_rate);
  for (const auto& l : net.layers()) {
    m_.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                  Eigen::VectorXd::Zero(l.bias.size())});
  }
  v_ = m_;
}

void AdamOptimizer::set_learning_rate(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  lr_ = lr;
}

void AdamOptimizer::apply(QNetwork& net, const std::vector<DenseLayer>& grads) {
  auto& layers = net.layers();
  if (grads.size() != layers.size() || m_.size() != layers.size()) {
    throw std::invalid_argument("optimizer state does not match network");
  }
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weights, m_[i].weights, v_[i].weights, grads[i].weights);
    update(layers[i].bias, m_[i].bias, v_[i].bias, grads[i].bias);
  }
}

double train_step(QNetwork& net, AdamOptimizer& optimizer, const TrainingBatch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("empty training batch");
  if (!batch.targets.allFinite()) throw std::invalid_argument("non-finite TD target");
  std::vector<DenseLayer> grads;
  const double loss = batch_loss(net, batch, &grads);
  optimizer.apply(net, grads);
  return loss;
}

void copy_params(const QNetwork& source, QNetwork& dest) {
  if (source.layer_sizes() != dest.layer_sizes()) {
    throw std::invalid_argument("cannot copy parameters between different topologies");
  }
  dest.layers() = source.layers();
}

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n' << net.layer_sizes().size();
  for (int s : net.layer_sizes()) out << ' ' << s;
  out << '\n' << std::hexfloat;
  for (double p : net.flatten()) out << p << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

QNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::string magic;
  int version = 0;
  std::size_t nlayers = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) {
    throw std::runtime_error("not a Q-network checkpoint: " + path.string());
  }
  if (version != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
  if (!(in >> nlayers) || nlayers < 2) throw std::runtime_error("corrupt checkpoint header");
  std::vector<int> sizes(nlayers);
  for (auto& s : sizes) {
    if (!(in >> s)) throw std::runtime_error("corrupt checkpoint header");
  }
  QNetwork net(sizes, 0);
  std::vector<double> params(net.num_parameters());
  std::string token;
  for (auto& p : params) {
    if (!(in >> token)) throw std::runtime_error("truncated checkpoint");
    p = std::strtod(token.c_str(), nullptr);
  }
  net.unflatten(params);
  return net;
}

}  // namespace uavnoma
