#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wf/rng.hpp"

namespace wf {

/// Fully-connected network with tanh hidden layers and a linear output.
/// Samples are matrix columns throughout.
struct Mlp {
  std::vector<Eigen::MatrixXd> weights;  // out x in per layer
  std::vector<Eigen::VectorXd> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }

  /// Orthogonal init scaled by sqrt(2) on hidden layers and `output_gain`
  /// on the last layer, zero biases.
  static Mlp create(int input, const std::vector<int>& hidden, int output, double output_gain,
                    Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& input) const;

  void validate() const;
};

/// Activations recorded by forward_cached: layer_inputs[l] feeds layer l,
/// back() is the network output.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> layer_inputs;
};

Eigen::MatrixXd forward_cached(const Mlp& net, const Eigen::MatrixXd& input, ForwardCache& cache);

struct MlpGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpGrads zeros_like(const Mlp& net);
  void accumulate(const MlpGrads& other);
  void scale(double factor);
};

/// Exact reverse-mode gradients for the cached forward pass;
/// `output_grad` is dLoss/dOutput, one column per sample.
MlpGrads backward(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& output_grad);

/// RMSprop with decay on the squared-gradient accumulator.
struct RmsProp {
  double learning_rate = 5e-4;
  double decay = 0.99;
  double epsilon = 1e-5;
  std::vector<Eigen::ArrayXXd> weight_acc;
  std::vector<Eigen::ArrayXd> bias_acc;
  Eigen::ArrayXd extra_acc;  // for a free parameter vector (policy log-std)

  static RmsProp for_net(const Mlp& net, double lr, int extra_dim = 0);

  /// Applies one update; throws std::invalid_argument on non-finite
  /// gradients (the step is rejected).
  void step(Mlp& net, const MlpGrads& grads);
  void step_extra(Eigen::VectorXd& param, const Eigen::VectorXd& grad);
};

/// Diagonal-Gaussian policy: state-dependent mean from the network,
/// state-independent learned log standard deviation.
struct GaussianPolicy {
  Mlp net;
  Eigen::VectorXd log_std;

  int obs_dim() const { return net.input_dim(); }
  int act_dim() const { return net.output_dim(); }

  static GaussianPolicy create(int obs, const std::vector<int>& hidden, int act,
                               double output_gain, Rng& rng);

  struct Sample {
    Eigen::VectorXd action;  // raw, unsquashed
    double log_prob;
  };

  Eigen::VectorXd mean(const Eigen::VectorXd& obs) const { return net.forward(obs); }
  Sample sample(const Eigen::VectorXd& obs, Rng& rng) const;

  /// Log density of a raw action under the Gaussian with the given mean.
  double log_prob(const Eigen::VectorXd& action, const Eigen::VectorXd& mean) const;

  double entropy() const;
};

}  // namespace wf
