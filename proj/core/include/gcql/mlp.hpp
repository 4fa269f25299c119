#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gcql/rng.hpp"

namespace gcql {

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct MlpGrads {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
};

// Fully-connected stack with tanh hidden layers and a linear output. Batches
// are row-major (one example per row). Backprop is written out by hand so the
// gradients can be checked against finite differences exactly.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  // Xavier-uniform init; the output layer is additionally scaled by
  // final_gain so initial logits stay near zero.
  void init(Rng& rng, double final_gain = 0.5);

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  size_t num_layers() const { return W.size(); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;

  struct Tape {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer (post-activation of previous)
  };
  Eigen::MatrixXd forward_tape(const Eigen::MatrixXd& X, Tape& tape) const;
  // dlogits = dLoss/d(output logits), N x out.
  MlpGrads backward(const Tape& tape, const Eigen::MatrixXd& dlogits) const;

  MlpGrads zero_grads() const;
  size_t num_params() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);

  std::vector<int> sizes;
  std::vector<Eigen::MatrixXd> W;  // layer l: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> b;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  int64_t t = 0;
  MlpGrads m, v;

  void init(const Mlp& net, AdamConfig c = {});
};

// One adaptive-moment update. Throws NumericError naming the offending layer
// when a gradient is not finite.
void adam_step(Mlp& net, AdamState& opt, const MlpGrads& grads);

enum class LossKind { CrossEntropy, Squared };

double sigmoid(double z);

// Binary targets against sigmoid(logits). Mean loss over the batch is
// accumulated with compensated summation; dlogits (optional) receives
// dLoss/dz already divided by N.
double sigmoid_scalar_loss(const Eigen::VectorXd& logits, const Eigen::VectorXd& targets,
                           LossKind kind, Eigen::VectorXd* dlogits);

// Multiclass cross-entropy over row-wise softmax.
double softmax_ce_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                       Eigen::MatrixXd* dlogits);

// Mean squared error over all entries.
double mse_loss(const Eigen::MatrixXd& out, const Eigen::MatrixXd& targets,
                Eigen::MatrixXd* dout);

}  // namespace gcql
