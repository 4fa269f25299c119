#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gcql/actionopt.hpp"
#include "gcql/env.hpp"
#include "gcql/qmodel.hpp"
#include "gcql/relabel.hpp"

namespace gcql {

// What gets trained toward target 0 alongside each relabeled transition:
// softmax-sampled unseen actions (the full method), nothing (plain hindsight
// relabeling), or the same transition under a random dataset goal.
enum class NegMode { ActionSoftmax, None, RandomGoal };

struct TrainConfig {
  int batch_size = 64;
  int gradient_steps = 5000;
  double gamma = 0.9;
  double eps = 0.05;  // goal-equality tolerance for TD targets and eval
  NegMode neg_mode = NegMode::ActionSoftmax;
  NegSampleConfig neg;
  RelabelConfig relabel;
  QModelConfig model;
  CemConfig cem;
  size_t buffer_capacity = 50000;
  int warmup_extracts = 200;  // trajectory visits before the first gradient step
  int metrics_every = 50;
  int eval_every = 0;  // 0 = no eval during training
  uint64_t seed = 1;
};

struct StepStats {
  double loss_pos = 0.0;
  double loss_neg = 0.0;
  double mean_q_pos = 0.0;
  double mean_q_neg = 0.0;
  int n_pos = 0;
  int n_neg = 0;
};

struct MetricsRow {
  int64_t step = 0;
  double loss_pos = 0.0;
  double loss_neg = 0.0;
  double mean_q_pos = 0.0;
  double mean_q_neg = 0.0;
  size_t buffer_size = 0;
  std::optional<double> eval_success;
};

// TD target for a relabeled example, in [0,1]:
//   PositiveTerminal -> 1
//   Intermediate / ChainTerminal -> 1 if the next state attains the goal,
//     else gamma * Q_target(next_state, greedy action, goal); a chain value
//     frozen at extract time is used verbatim instead.
//   TaskReward -> reward, plus gamma * max_a Q_target(next, a, null goal)
//     when the episode continues.
// NegativeAction examples never come through here (their target is 0 by
// construction); passing one is a contract violation.
double compute_td_target(const RelabeledExample& ex, const QModel& model,
                         const ActionSpace& space, const TrainConfig& cfg, Rng& rng);

// One optimization step: sample a batch, compute targets, draw one negative
// per relabeled example per cfg.neg_mode, regress the combined batch, and
// advance the target-network schedule.
StepStats train_step(QModel& model, const ReplayBuffer& buffer, const ActionSpace& space,
                     const StatePool* pool, const TrainConfig& cfg, Rng& rng);

using EvalHook = std::function<double(const QModel&, int64_t step)>;

struct TrainResult {
  QModel model;
  std::vector<MetricsRow> metrics;
};

// Full offline loop: repeatedly relabel sampled trajectories into the replay
// buffer and take gradient steps. Deterministic given cfg.seed.
TrainResult train_offline(const Dataset& d, const EnvSpec& spec, const TrainConfig& cfg,
                          const EvalHook& eval_hook = {});

struct AuxConfig {
  double xi = 0.1;  // mix-in probability, must be < 0.5
  TaskSpec task;
};

struct TaskTrainConfig {
  TrainConfig base;
  double explore_eps = 0.1;
  int steps_per_insertion = 4;
  int max_insertions = 4000;
  int eval_every_insertions = 25;
  int eval_episodes = 50;
  double success_target = 0.8;
};

struct TaskTrainResult {
  QModel model;
  std::vector<MetricsRow> metrics;
  // First gradient step / environment-episode count at which greedy eval
  // success reached the target; -1 when never reached.
  int64_t steps_to_target = -1;
  int64_t episodes_to_target = -1;
  int64_t env_episodes = 0;
};

// Reward-driven training with the goal input fixed to all zeros. Each
// insertion event adds either an online task episode or (with probability xi
// each) a goal-relabeled trajectory or an unseen-action zero-reward
// trajectory drawn from `aux_data`. xi = 0 reduces to plain task training.
TaskTrainResult train_task(const EnvSpec& spec, const TaskSpec& task, const Dataset* aux_data,
                           const AuxConfig& aux, const TaskTrainConfig& cfg,
                           const QModel* init = nullptr);

// train_task with xi > 0; kept as a named entry point for the experiment
// harness.
TaskTrainResult train_aux_mixin(const Dataset& d, const EnvSpec& spec, const AuxConfig& aux,
                                const TaskTrainConfig& cfg);

struct PretrainFinetuneResult {
  std::vector<MetricsRow> pretrain_metrics;
  TaskTrainResult finetune;
};

// Phase 1: offline goal-conditioned pre-training on d. Phase 2: task-reward
// fine-tuning from the phase-1 weights with the goal zeroed.
PretrainFinetuneResult pretrain_finetune(const Dataset& d, const EnvSpec& spec,
                                         const TaskSpec& task, const TrainConfig& pretrain_cfg,
                                         const TaskTrainConfig& finetune_cfg);

}  // namespace gcql
