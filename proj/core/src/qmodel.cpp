#include "gcql/qmodel.hpp"

#include <cstring>
#include <stdexcept>

namespace gcql {

InputCodec InputCodec::for_env(const EnvSpec& spec) {
  InputCodec c;
  c.state_kind = spec.state_repr;
  if (spec.tabular()) {
    c.state_slots = spec.state_count();
  } else {
    c.state_slots = 2;
  }
  c.action_kind = spec.actions.kind;
  c.action_slots = spec.actions.kind == ActionKind::Discrete
                       ? spec.actions.count
                       : static_cast<int>(spec.actions.bounds.dims());
  return c;
}

void InputCodec::encode_state(const State& s, double* dst) const {
  if (s.kind != state_kind)
    throw std::invalid_argument("InputCodec: state representation mismatch");
  std::memset(dst, 0, sizeof(double) * static_cast<size_t>(state_slots));
  if (state_kind == StateKind::Tabular) {
    if (s.index < 0 || s.index >= state_slots)
      throw std::invalid_argument("InputCodec: state index out of range");
    dst[s.index] = 1.0;
  } else {
    if (static_cast<int>(s.vec.size()) != state_slots)
      throw std::invalid_argument("InputCodec: state dimension mismatch");
    std::memcpy(dst, s.vec.data(), sizeof(double) * s.vec.size());
  }
}

void InputCodec::encode_goal(const Goal& g, double* dst) const {
  if (g.null_goal) {
    std::memset(dst, 0, sizeof(double) * static_cast<size_t>(state_slots));
    return;
  }
  encode_state(g.target, dst);
}

void InputCodec::encode_action(const Action& a, double* dst) const {
  if (a.kind != action_kind)
    throw std::invalid_argument("InputCodec: action representation mismatch");
  std::memset(dst, 0, sizeof(double) * static_cast<size_t>(action_slots));
  if (action_kind == ActionKind::Discrete) {
    if (a.id < 0 || a.id >= action_slots)
      throw std::invalid_argument("InputCodec: action id out of range");
    dst[a.id] = 1.0;
  } else {
    if (static_cast<int>(a.vec.size()) != action_slots)
      throw std::invalid_argument("InputCodec: action dimension mismatch");
    std::memcpy(dst, a.vec.data(), sizeof(double) * a.vec.size());
  }
}

Eigen::VectorXd InputCodec::encode(const State& s, const Goal& g, const Action& a) const {
  Eigen::VectorXd x(input_dim());
  encode_state(s, x.data());
  encode_goal(g, x.data() + state_slots);
  encode_action(a, x.data() + 2 * state_slots);
  return x;
}

void InputCodec::encode_row(const State& s, const Goal& g, const Action& a,
                            Eigen::Ref<Eigen::MatrixXd> X, Eigen::Index row) const {
  Eigen::VectorXd x = encode(s, g, a);
  X.row(row) = x.transpose();
}

Eigen::VectorXd InputCodec::encode_sg(const State& s, const Goal& g) const {
  Eigen::VectorXd x(sg_dim());
  encode_state(s, x.data());
  encode_goal(g, x.data() + state_slots);
  return x;
}

void InputCodec::encode_sg_row(const State& s, const Goal& g, Eigen::Ref<Eigen::MatrixXd> X,
                               Eigen::Index row) const {
  Eigen::VectorXd x = encode_sg(s, g);
  X.row(row) = x.transpose();
}

namespace {
std::vector<int> full_sizes(const InputCodec& codec, const QModelConfig& cfg) {
  std::vector<int> sizes{codec.input_dim()};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);
  return sizes;
}
}  // namespace

QModel::QModel(InputCodec codec, QModelConfig cfg, Rng& init_rng)
    : codec_(codec), cfg_(std::move(cfg)), net_(full_sizes(codec, cfg_)) {
  if (cfg_.init_output_prior <= 0.0 || cfg_.init_output_prior >= 1.0)
    throw std::invalid_argument("QModel: init_output_prior must lie in (0,1)");
  net_.init(init_rng);
  net_.b.back().setConstant(std::log(cfg_.init_output_prior / (1.0 - cfg_.init_output_prior)));
  target_ = net_;
  opt_.init(net_, cfg_.adam);
}

double QModel::q(const State& s, const Goal& g, const Action& a) const {
  return sigmoid(net_.forward(codec_.encode(s, g, a).transpose())(0, 0));
}

double QModel::q_target(const State& s, const Goal& g, const Action& a) const {
  return sigmoid(target_.forward(codec_.encode(s, g, a).transpose())(0, 0));
}

Eigen::VectorXd QModel::q_batch(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd z = net_.forward(X).col(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
  return z;
}

Eigen::VectorXd QModel::q_target_batch(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd z = target_.forward(X).col(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
  return z;
}

void QModel::sync_target_if_due() {
  if (cfg_.target_sync_period > 0 && step % cfg_.target_sync_period == 0) target_ = net_;
}

Checkpoint QModel::to_checkpoint() const {
  Checkpoint c;
  c.kind = "qnet";
  for (int s : net_.sizes) c.dims.push_back(s);
  c.step = step;
  c.data = net_.flatten();
  return c;
}

QModel QModel::from_checkpoint(const Checkpoint& c, InputCodec codec, QModelConfig cfg) {
  if (c.kind != "qnet")
    throw std::invalid_argument("QModel::from_checkpoint: kind '" + c.kind + "' is not qnet");
  if (c.dims.size() < 2) throw std::invalid_argument("QModel::from_checkpoint: bad dims");
  cfg.hidden.assign(c.dims.begin() + 1, c.dims.end() - 1);
  Rng dummy(0);
  QModel m(codec, cfg, dummy);
  if (m.net_.input_dim() != c.dims.front())
    throw std::invalid_argument("QModel::from_checkpoint: input dim mismatch (codec gives " +
                                std::to_string(m.net_.input_dim()) + ", checkpoint has " +
                                std::to_string(c.dims.front()) + ")");
  m.net_.unflatten(c.data);
  m.target_ = m.net_;
  m.step = c.step;
  return m;
}

}  // namespace gcql
