#pragma once

#include "gcql/learner.hpp"
#include "gcql/mlp.hpp"

namespace gcql {

enum class BaselineKind { GCBC, HerNoReg, HerRandNegGoal };

// Goal-conditioned behavioral cloning: the same relabeled sub-sequences as
// the Q-learner (positives only), trained as supervised action prediction on
// concat(state, goal). Discrete actions use multiclass cross-entropy,
// continuous ones squared error.
struct PolicyModel {
  InputCodec codec;
  Mlp net;

  Action act(const State& s, const Goal& g) const;
};

struct GcbcConfig {
  std::vector<int> hidden = {64, 64};
  AdamConfig adam = {};
  int batch_size = 64;
  int gradient_steps = 3000;
  int cuts_per_trajectory = 4;
  size_t buffer_capacity = 50000;
  int warmup_extracts = 200;
  int metrics_every = 50;
  uint64_t seed = 1;
};

struct GcbcResult {
  PolicyModel policy;
  std::vector<MetricsRow> metrics;  // loss_pos carries the imitation loss
};

GcbcResult gcbc_train(const Dataset& d, const EnvSpec& spec, const GcbcConfig& cfg);

// Hindsight-relabeling Q-learning baselines: the identical trainer with
// negative-action sampling disabled (HerNoReg) or replaced by zero-target
// random dataset goals at the same rate (HerRandNegGoal).
TrainResult her_train(const Dataset& d, const EnvSpec& spec, TrainConfig cfg,
                      BaselineKind kind, const EvalHook& eval_hook = {});

}  // namespace gcql
