#pragma once

#include <Eigen/Core>
#include <vector>

#include "gcql/env.hpp"
#include "gcql/mlp.hpp"
#include "gcql/serialize.hpp"
#include "gcql/types.hpp"

namespace gcql {

// Encodes (state, goal, action) into one flat network input row. Tabular
// states and discrete actions are one-hot; continuous values pass through.
// The null goal encodes as all zeros.
struct InputCodec {
  StateKind state_kind = StateKind::Tabular;
  int state_slots = 0;
  ActionKind action_kind = ActionKind::Discrete;
  int action_slots = 0;

  static InputCodec for_env(const EnvSpec& spec);

  int input_dim() const { return 2 * state_slots + action_slots; }
  int sg_dim() const { return 2 * state_slots; }

  void encode_state(const State& s, double* dst) const;
  void encode_goal(const Goal& g, double* dst) const;
  void encode_action(const Action& a, double* dst) const;
  Eigen::VectorXd encode(const State& s, const Goal& g, const Action& a) const;
  void encode_row(const State& s, const Goal& g, const Action& a,
                  Eigen::Ref<Eigen::MatrixXd> X, Eigen::Index row) const;
  // State+goal only, for policy networks.
  Eigen::VectorXd encode_sg(const State& s, const Goal& g) const;
  void encode_sg_row(const State& s, const Goal& g, Eigen::Ref<Eigen::MatrixXd> X,
                     Eigen::Index row) const;
};

struct QModelConfig {
  std::vector<int> hidden = {64, 64};
  AdamConfig adam = {};
  int target_sync_period = 200;
  LossKind loss = LossKind::CrossEntropy;
  // Fresh-net outputs concentrate near this reach probability. 0.5 is the
  // unbiased default; small values make bootstraps start pessimistic, which
  // keeps long Bellman chains from feeding on their own optimism.
  double init_output_prior = 0.5;
};

// The goal-conditioned Q-function: an online net, its lagged target copy,
// and the optimizer state. Outputs are squashed to (0,1).
class QModel {
 public:
  QModel(InputCodec codec, QModelConfig cfg, Rng& init_rng);

  double q(const State& s, const Goal& g, const Action& a) const;
  double q_target(const State& s, const Goal& g, const Action& a) const;
  Eigen::VectorXd q_batch(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd q_target_batch(const Eigen::MatrixXd& X) const;

  // Hard-copies the online net into the target every sync_period steps.
  void sync_target_if_due();
  void force_sync() { target_ = net_; }

  const InputCodec& codec() const { return codec_; }
  const QModelConfig& config() const { return cfg_; }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  const Mlp& target() const { return target_; }
  AdamState& opt() { return opt_; }
  int64_t step = 0;

  Checkpoint to_checkpoint() const;
  static QModel from_checkpoint(const Checkpoint& c, InputCodec codec, QModelConfig cfg = {});

 private:
  InputCodec codec_;
  QModelConfig cfg_;
  Mlp net_;
  Mlp target_;
  AdamState opt_;
};

}  // namespace gcql
