#include "gcql/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace gcql {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes(std::move(layer_sizes)) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int s : sizes)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    W.emplace_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]));
    b.emplace_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
}

void Mlp::init(Rng& rng, double final_gain) {
  for (size_t l = 0; l < W.size(); ++l) {
    const double fan_in = static_cast<double>(sizes[l]);
    const double fan_out = static_cast<double>(sizes[l + 1]);
    double a = std::sqrt(6.0 / (fan_in + fan_out));
    if (l + 1 == W.size()) a *= final_gain;
    for (int i = 0; i < W[l].rows(); ++i)
      for (int j = 0; j < W[l].cols(); ++j) W[l](i, j) = rng.uniform(-a, a);
    b[l].setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
  if (X.cols() != input_dim())
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(X.cols()) +
                                " columns, expected " + std::to_string(input_dim()));
  if (!X.allFinite()) throw NumericError("Mlp::forward: non-finite input");
  Eigen::MatrixXd h = X;
  for (size_t l = 0; l < W.size(); ++l) {
    Eigen::MatrixXd z = (h * W[l].transpose()).rowwise() + b[l].transpose();
    if (l + 1 < W.size())
      h = z.array().tanh();
    else
      h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd Mlp::forward_tape(const Eigen::MatrixXd& X, Tape& tape) const {
  if (X.cols() != input_dim())
    throw std::invalid_argument("Mlp::forward_tape: input dimension mismatch");
  tape.inputs.clear();
  tape.inputs.reserve(W.size());
  Eigen::MatrixXd h = X;
  for (size_t l = 0; l < W.size(); ++l) {
    tape.inputs.push_back(h);
    Eigen::MatrixXd z = (h * W[l].transpose()).rowwise() + b[l].transpose();
    if (l + 1 < W.size())
      h = z.array().tanh();
    else
      h = std::move(z);
  }
  return h;
}

MlpGrads Mlp::backward(const Tape& tape, const Eigen::MatrixXd& dlogits) const {
  MlpGrads g = zero_grads();
  Eigen::MatrixXd dz = dlogits;  // gradient at the linear output of layer l
  for (size_t l = W.size(); l-- > 0;) {
    g.W[l] = dz.transpose() * tape.inputs[l];
    g.b[l] = dz.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd dh = dz * W[l];
      // tape.inputs[l] holds tanh(z_{l-1}); tanh' = 1 - tanh^2.
      dz = dh.array() * (1.0 - tape.inputs[l].array().square());
    }
  }
  return g;
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  for (size_t l = 0; l < W.size(); ++l) {
    g.W.emplace_back(Eigen::MatrixXd::Zero(W[l].rows(), W[l].cols()));
    g.b.emplace_back(Eigen::VectorXd::Zero(b[l].size()));
  }
  return g;
}

size_t Mlp::num_params() const {
  size_t n = 0;
  for (size_t l = 0; l < W.size(); ++l) n += static_cast<size_t>(W[l].size() + b[l].size());
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(num_params());
  for (size_t l = 0; l < W.size(); ++l) {
    for (int i = 0; i < W[l].rows(); ++i)
      for (int j = 0; j < W[l].cols(); ++j) out.push_back(W[l](i, j));
    for (int i = 0; i < b[l].size(); ++i) out.push_back(b[l](i));
  }
  return out;
}

void Mlp::unflatten(const std::vector<double>& flat) {
  if (flat.size() != num_params())
    throw std::invalid_argument("Mlp::unflatten: expected " + std::to_string(num_params()) +
                                " values, got " + std::to_string(flat.size()));
  size_t k = 0;
  for (size_t l = 0; l < W.size(); ++l) {
    for (int i = 0; i < W[l].rows(); ++i)
      for (int j = 0; j < W[l].cols(); ++j) W[l](i, j) = flat[k++];
    for (int i = 0; i < b[l].size(); ++i) b[l](i) = flat[k++];
  }
}

void AdamState::init(const Mlp& net, AdamConfig c) {
  cfg = c;
  t = 0;
  m = net.zero_grads();
  v = net.zero_grads();
}

void adam_step(Mlp& net, AdamState& opt, const MlpGrads& grads) {
  if (grads.W.size() != net.W.size())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  for (size_t l = 0; l < net.W.size(); ++l)
    if (!grads.W[l].allFinite() || !grads.b[l].allFinite())
      throw NumericError("adam_step: non-finite gradient in layer " + std::to_string(l));

  opt.t += 1;
  const double c1 = 1.0 - std::pow(opt.cfg.beta1, static_cast<double>(opt.t));
  const double c2 = 1.0 - std::pow(opt.cfg.beta2, static_cast<double>(opt.t));
  for (size_t l = 0; l < net.W.size(); ++l) {
    opt.m.W[l] = opt.cfg.beta1 * opt.m.W[l] + (1.0 - opt.cfg.beta1) * grads.W[l];
    opt.v.W[l] =
        opt.cfg.beta2 * opt.v.W[l].array() + (1.0 - opt.cfg.beta2) * grads.W[l].array().square();
    net.W[l].array() -= opt.cfg.lr * (opt.m.W[l].array() / c1) /
                        ((opt.v.W[l].array() / c2).sqrt() + opt.cfg.eps);
    opt.m.b[l] = opt.cfg.beta1 * opt.m.b[l] + (1.0 - opt.cfg.beta1) * grads.b[l];
    opt.v.b[l] =
        opt.cfg.beta2 * opt.v.b[l].array() + (1.0 - opt.cfg.beta2) * grads.b[l].array().square();
    net.b[l].array() -= opt.cfg.lr * (opt.m.b[l].array() / c1) /
                        ((opt.v.b[l].array() / c2).sqrt() + opt.cfg.eps);
  }
}

double sigmoid(double z) {
  double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  // Keep outputs strictly inside (0,1) even for extreme logits.
  return std::min(1.0 - 1e-12, std::max(1e-12, p));
}

namespace {
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }
}  // namespace

double sigmoid_scalar_loss(const Eigen::VectorXd& logits, const Eigen::VectorXd& targets,
                           LossKind kind, Eigen::VectorXd* dlogits) {
  const auto n = logits.size();
  if (n == 0) throw std::invalid_argument("sigmoid_scalar_loss: empty batch");
  if (targets.size() != n)
    throw std::invalid_argument("sigmoid_scalar_loss: target count mismatch");
  if (dlogits) dlogits->resize(n);
  double sum = 0.0, comp = 0.0;  // Kahan
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = logits(i);
    const double t = targets(i);
    if (t < 0.0 || t > 1.0)
      throw std::invalid_argument("sigmoid_scalar_loss: target outside [0,1]");
    double li, dz;
    if (kind == LossKind::CrossEntropy) {
      li = t * softplus(-z) + (1.0 - t) * softplus(z);
      dz = sigmoid(z) - t;
    } else {
      const double p = sigmoid(z);
      li = (p - t) * (p - t);
      dz = 2.0 * (p - t) * p * (1.0 - p);
    }
    const double y = li - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (dlogits) (*dlogits)(i) = dz / static_cast<double>(n);
  }
  return sum / static_cast<double>(n);
}

double softmax_ce_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                       Eigen::MatrixXd* dlogits) {
  const auto n = logits.rows();
  if (n == 0) throw std::invalid_argument("softmax_ce_loss: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("softmax_ce_loss: label count mismatch");
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= logits.cols()) throw std::invalid_argument("softmax_ce_loss: bad label");
    const double zmax = logits.row(i).maxCoeff();
    Eigen::ArrayXd ex = (logits.row(i).array() - zmax).exp();
    const double Z = ex.sum();
    const double li = -(logits(i, y) - zmax - std::log(Z));
    if (dlogits) {
      dlogits->row(i) = (ex / Z).matrix().transpose() / static_cast<double>(n);
      (*dlogits)(i, y) -= 1.0 / static_cast<double>(n);
    }
    const double yk = li - comp;
    const double s = sum + yk;
    comp = (s - sum) - yk;
    sum = s;
  }
  return sum / static_cast<double>(n);
}

double mse_loss(const Eigen::MatrixXd& out, const Eigen::MatrixXd& targets,
                Eigen::MatrixXd* dout) {
  if (out.rows() == 0) throw std::invalid_argument("mse_loss: empty batch");
  if (out.rows() != targets.rows() || out.cols() != targets.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  const double n = static_cast<double>(out.size());
  Eigen::MatrixXd diff = out - targets;
  if (dout) *dout = 2.0 * diff / n;
  return diff.array().square().sum() / n;
}

}  // namespace gcql
