#include "wf/mlp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

// Random matrix with orthonormal rows/columns (whichever fit), scaled by gain.
Eigen::MatrixXd orthogonal_init(int rows, int cols, double gain, Rng& rng) {
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  Eigen::MatrixXd normal(big, small);
  for (int i = 0; i < big; ++i)
    for (int j = 0; j < small; ++j) normal(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  // sign-correct with the R diagonal so the distribution is unbiased
  const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (int j = 0; j < small; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (rows < cols) return gain * q.transpose();
  return gain * q;
}

}  // namespace

Mlp Mlp::create(int input, const std::vector<int>& hidden, int output, double output_gain,
                Rng& rng) {
  if (input < 1 || output < 1) throw std::invalid_argument("network dims must be positive");
  Mlp net;
  int in = input;
  const double hidden_gain = std::sqrt(2.0);
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden width must be positive");
    net.weights.push_back(orthogonal_init(h, in, hidden_gain, rng));
    net.biases.push_back(Eigen::VectorXd::Zero(h));
    in = h;
  }
  net.weights.push_back(orthogonal_init(output, in, output_gain, rng));
  net.biases.push_back(Eigen::VectorXd::Zero(output));
  return net;
}

void Mlp::validate() const {
  if (weights.empty() || weights.size() != biases.size())
    throw std::invalid_argument("inconsistent network container");
  for (int l = 0; l < num_layers(); ++l) {
    if (weights[l].rows() != biases[l].size())
      throw std::invalid_argument("bias shape does not match layer");
    if (l > 0 && weights[l].cols() != weights[l - 1].rows())
      throw std::invalid_argument("layer shapes do not chain");
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw std::invalid_argument("non-finite parameters");
  }
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& input) const {
  if (input.rows() != input_dim()) throw std::invalid_argument("input dim mismatch");
  Eigen::MatrixXd x = input;
  for (int l = 0; l < num_layers(); ++l) {
    x = (weights[l] * x).colwise() + biases[l];
    if (l + 1 < num_layers()) x = x.array().tanh().matrix();
  }
  return x;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  return forward_batch(input).col(0);
}

Eigen::MatrixXd forward_cached(const Mlp& net, const Eigen::MatrixXd& input,
                               ForwardCache& cache) {
  if (input.rows() != net.input_dim()) throw std::invalid_argument("input dim mismatch");
  cache.layer_inputs.clear();
  cache.layer_inputs.reserve(net.num_layers() + 1);
  cache.layer_inputs.push_back(input);
  for (int l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd x = (net.weights[l] * cache.layer_inputs.back()).colwise() + net.biases[l];
    if (l + 1 < net.num_layers()) x = x.array().tanh().matrix();
    cache.layer_inputs.push_back(std::move(x));
  }
  return cache.layer_inputs.back();
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
  MlpGrads grads;
  for (int l = 0; l < net.num_layers(); ++l) {
    grads.weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    grads.biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return grads;
}

void MlpGrads::accumulate(const MlpGrads& other) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
}

void MlpGrads::scale(double factor) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= factor;
    biases[l] *= factor;
  }
}

MlpGrads backward(const Mlp& net, const ForwardCache& cache,
                  const Eigen::MatrixXd& output_grad) {
  if (cache.layer_inputs.size() != static_cast<size_t>(net.num_layers()) + 1)
    throw std::logic_error("forward cache missing or stale");
  if (output_grad.rows() != net.output_dim() ||
      output_grad.cols() != cache.layer_inputs.front().cols())
    throw std::invalid_argument("output gradient shape mismatch");

  MlpGrads grads;
  grads.weights.resize(net.num_layers());
  grads.biases.resize(net.num_layers());
  Eigen::MatrixXd delta = output_grad;  // dLoss/d(pre-activation of layer l)
  for (int l = net.num_layers() - 1; l >= 0; --l) {
    grads.weights[l] = delta * cache.layer_inputs[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      // cache.layer_inputs[l] holds tanh outputs of the layer below
      const Eigen::ArrayXXd act = cache.layer_inputs[l].array();
      delta = ((net.weights[l].transpose() * delta).array() * (1.0 - act * act)).matrix();
    }
  }
  return grads;
}

RmsProp RmsProp::for_net(const Mlp& net, double lr, int extra_dim) {
  RmsProp opt;
  opt.learning_rate = lr;
  for (int l = 0; l < net.num_layers(); ++l) {
    opt.weight_acc.emplace_back(
        Eigen::ArrayXXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    opt.bias_acc.emplace_back(Eigen::ArrayXd::Zero(net.biases[l].size()));
  }
  opt.extra_acc = Eigen::ArrayXd::Zero(extra_dim);
  return opt;
}

void RmsProp::step(Mlp& net, const MlpGrads& grads) {
  if (grads.weights.size() != static_cast<size_t>(net.num_layers()))
    throw std::invalid_argument("gradient/parameter layer mismatch");
  for (int l = 0; l < net.num_layers(); ++l)
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite())
      throw std::invalid_argument("non-finite gradient, step rejected");
  for (int l = 0; l < net.num_layers(); ++l) {
    weight_acc[l] = decay * weight_acc[l] + (1.0 - decay) * grads.weights[l].array().square();
    net.weights[l].array() -=
        learning_rate * grads.weights[l].array() / (weight_acc[l].sqrt() + epsilon);
    bias_acc[l] = decay * bias_acc[l] + (1.0 - decay) * grads.biases[l].array().square();
    net.biases[l].array() -=
        learning_rate * grads.biases[l].array() / (bias_acc[l].sqrt() + epsilon);
  }
}

void RmsProp::step_extra(Eigen::VectorXd& param, const Eigen::VectorXd& grad) {
  if (!grad.allFinite()) throw std::invalid_argument("non-finite gradient, step rejected");
  if (param.size() != extra_acc.size() || grad.size() != param.size())
    throw std::invalid_argument("extra parameter shape mismatch");
  extra_acc = decay * extra_acc + (1.0 - decay) * grad.array().square();
  param.array() -= learning_rate * grad.array() / (extra_acc.sqrt() + epsilon);
}

GaussianPolicy GaussianPolicy::create(int obs, const std::vector<int>& hidden, int act,
                                      double output_gain, Rng& rng) {
  GaussianPolicy policy;
  policy.net = Mlp::create(obs, hidden, act, output_gain, rng);
  policy.log_std = Eigen::VectorXd::Zero(act);
  return policy;
}

GaussianPolicy::Sample GaussianPolicy::sample(const Eigen::VectorXd& obs, Rng& rng) const {
  const Eigen::VectorXd mu = mean(obs);
  const Eigen::VectorXd std = log_std.array().exp();
  Eigen::VectorXd z(mu.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
  Sample s;
  s.action = mu + std.cwiseProduct(z);
  s.log_prob = (-0.5 * z.array().square() - log_std.array() - 0.5 * kLog2Pi).sum();
  return s;
}

double GaussianPolicy::log_prob(const Eigen::VectorXd& action,
                                const Eigen::VectorXd& mean) const {
  const Eigen::ArrayXd z = (action - mean).array() / log_std.array().exp();
  return (-0.5 * z.square() - log_std.array() - 0.5 * kLog2Pi).sum();
}

double GaussianPolicy::entropy() const {
  return (0.5 + 0.5 * kLog2Pi + log_std.array()).sum();
}

}  // namespace wf
