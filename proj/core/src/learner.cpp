#include "gcql/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gcql/oracle.hpp"

namespace gcql {

double compute_td_target(const RelabeledExample& ex, const QModel& model,
                         const ActionSpace& space, const TrainConfig& cfg, Rng& rng) {
  switch (ex.label) {
    case LabelKind::NegativeAction:
      throw std::logic_error(
          "compute_td_target: negative-action examples carry a fixed 0 target");
    case LabelKind::PositiveTerminal:
      return 1.0;
    case LabelKind::ChainTerminal:
      if (ex.has_stored_value) return std::clamp(ex.reward, 0.0, 1.0);
      [[fallthrough]];
    case LabelKind::Intermediate: {
      if (goal_reached(ex.next_state, ex.goal, cfg.eps)) return 1.0;
      auto [a, v] = argmax_action(model, NetSide::Target, ex.next_state, ex.goal, space,
                                  cfg.cem, rng);
      (void)a;
      return cfg.gamma * v;
    }
    case LabelKind::TaskReward: {
      if (ex.terminal) return ex.reward;
      auto [a, v] = argmax_action(model, NetSide::Target, ex.next_state, ex.goal, space,
                                  cfg.cem, rng);
      (void)a;
      return ex.reward + cfg.gamma * v;
    }
  }
  throw std::logic_error("compute_td_target: unhandled label");
}

namespace {

bool needs_bootstrap(const RelabeledExample& ex, double eps) {
  switch (ex.label) {
    case LabelKind::PositiveTerminal:
    case LabelKind::NegativeAction:
      return false;
    case LabelKind::ChainTerminal:
      if (ex.has_stored_value) return false;
      return !goal_reached(ex.next_state, ex.goal, eps);
    case LabelKind::Intermediate:
      return !goal_reached(ex.next_state, ex.goal, eps);
    case LabelKind::TaskReward:
      return !ex.terminal;
  }
  return false;
}

double immediate_target(const RelabeledExample& ex, double eps) {
  switch (ex.label) {
    case LabelKind::PositiveTerminal:
      return 1.0;
    case LabelKind::NegativeAction:
      return 0.0;
    case LabelKind::ChainTerminal:
      if (ex.has_stored_value) return std::clamp(ex.reward, 0.0, 1.0);
      return goal_reached(ex.next_state, ex.goal, eps) ? 1.0 : 0.0;
    case LabelKind::Intermediate:
      return goal_reached(ex.next_state, ex.goal, eps) ? 1.0 : 0.0;
    case LabelKind::TaskReward:
      return ex.reward;
  }
  return 0.0;
}

}  // namespace

StepStats train_step(QModel& model, const ReplayBuffer& buffer, const ActionSpace& space,
                     const StatePool* pool, const TrainConfig& cfg, Rng& rng) {
  auto batch = buffer.sample(static_cast<size_t>(cfg.batch_size), rng);
  const size_t n = batch.size();
  const InputCodec& codec = model.codec();

  // Targets. Discrete bootstraps are batched through one target-net forward.
  std::vector<double> targets(n);
  for (size_t i = 0; i < n; ++i) targets[i] = immediate_target(batch[i], cfg.eps);
  std::vector<size_t> boot;
  for (size_t i = 0; i < n; ++i)
    if (needs_bootstrap(batch[i], cfg.eps)) boot.push_back(i);
  if (!boot.empty()) {
    if (space.kind == ActionKind::Discrete) {
      const int A = space.count;
      Eigen::MatrixXd X(static_cast<Eigen::Index>(boot.size()) * A, codec.input_dim());
      for (size_t j = 0; j < boot.size(); ++j) {
        const auto& ex = batch[boot[j]];
        for (int a = 0; a < A; ++a)
          codec.encode_row(ex.next_state, ex.goal, Action::discrete(a), X,
                           static_cast<Eigen::Index>(j * A + a));
      }
      Eigen::VectorXd q = model.q_target_batch(X);
      for (size_t j = 0; j < boot.size(); ++j) {
        double best = q(static_cast<Eigen::Index>(j * A));
        for (int a = 1; a < A; ++a)
          best = std::max(best, q(static_cast<Eigen::Index>(j * A + a)));
        targets[boot[j]] += cfg.gamma * best;
      }
    } else {
      for (size_t j : boot) targets[j] = compute_td_target(batch[j], model, space, cfg, rng);
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (targets[i] < 0.0 || targets[i] > 1.0)
      throw std::logic_error("train_step: TD target " + std::to_string(targets[i]) +
                             " outside [0,1] at step " + std::to_string(model.step + 1));

  // One conservative negative per relabeled (non-task) example.
  std::vector<size_t> relabeled;
  for (size_t i = 0; i < n; ++i) {
    LabelKind l = batch[i].label;
    if (l == LabelKind::PositiveTerminal || l == LabelKind::Intermediate ||
        l == LabelKind::ChainTerminal)
      relabeled.push_back(i);
  }
  std::vector<RelabeledExample> negatives;
  if (cfg.neg_mode == NegMode::ActionSoftmax && !relabeled.empty()) {
    if (space.kind == ActionKind::Discrete) {
      const int A = space.count;
      if (A < 2) throw std::invalid_argument("train_step: need >= 2 actions for negatives");
      Eigen::MatrixXd X(static_cast<Eigen::Index>(relabeled.size()) * (A - 1),
                        codec.input_dim());
      std::vector<std::vector<int>> cand_ids(relabeled.size());
      Eigen::Index row = 0;
      for (size_t j = 0; j < relabeled.size(); ++j) {
        const auto& ex = batch[relabeled[j]];
        int s_cell = -1, g_cell = -1;
        if (cfg.neg.evidence) {
          s_cell = cfg.neg.evidence->spec.cell_of(ex.state);
          g_cell = ex.goal.null_goal ? -1 : cfg.neg.evidence->spec.cell_of(ex.goal.target);
        }
        for (int a = 0; a < A; ++a) {
          if (a == ex.action.id) continue;
          if (cfg.neg.evidence && g_cell >= 0 && cfg.neg.evidence->vetoes(s_cell, a, g_cell))
            continue;
          cand_ids[j].push_back(a);
          codec.encode_row(ex.state, ex.goal, Action::discrete(a), X, row++);
        }
      }
      Eigen::VectorXd q = model.q_batch(X.topRows(row));
      row = 0;
      for (size_t j = 0; j < relabeled.size(); ++j) {
        if (cand_ids[j].empty()) continue;  // every alternative is evidenced
        std::vector<double> qv(cand_ids[j].size());
        for (size_t k = 0; k < qv.size(); ++k) qv[k] = q(row++);
        auto w = softmax_weights(qv, cfg.neg.temperature);
        const auto& ex = batch[relabeled[j]];
        RelabeledExample neg;
        neg.state = ex.state;
        neg.action = Action::discrete(cand_ids[j][rng.categorical(w)]);
        neg.next_state = ex.next_state;
        neg.goal = ex.goal;
        neg.label = LabelKind::NegativeAction;
        neg.terminal = true;
        negatives.push_back(std::move(neg));
      }
    } else {
      for (size_t j : relabeled) {
        const auto& ex = batch[j];
        RelabeledExample neg;
        neg.state = ex.state;
        neg.action =
            sample_negative_action(model, ex.state, ex.goal, ex.action, space, cfg.neg, rng);
        neg.next_state = ex.next_state;
        neg.goal = ex.goal;
        neg.label = LabelKind::NegativeAction;
        neg.terminal = true;
        negatives.push_back(std::move(neg));
      }
    }
  } else if (cfg.neg_mode == NegMode::RandomGoal && !relabeled.empty()) {
    if (!pool) throw std::invalid_argument("train_step: random-goal negatives need a pool");
    for (size_t j : relabeled) {
      const auto& ex = batch[j];
      RelabeledExample neg;
      neg.state = ex.state;
      neg.action = ex.action;
      neg.next_state = ex.next_state;
      neg.goal = Goal::of(pool->states[rng.uniform_index(pool->states.size())]);
      neg.label = LabelKind::NegativeAction;
      neg.terminal = true;
      negatives.push_back(std::move(neg));
    }
  }

  // Stats split the batch into the target-regression segment and the
  // zero-target segment (buffer-resident negatives count as the latter).
  std::vector<size_t> pos_seg, zero_seg;
  for (size_t i = 0; i < n; ++i)
    (batch[i].label == LabelKind::NegativeAction ? zero_seg : pos_seg).push_back(i);

  const size_t n_pos = pos_seg.size();
  const size_t n_zero = zero_seg.size() + negatives.size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n_pos + n_zero), codec.input_dim());
  Eigen::VectorXd y_pos(static_cast<Eigen::Index>(n_pos));
  Eigen::Index row = 0;
  for (size_t i : pos_seg) {
    codec.encode_row(batch[i].state, batch[i].goal, batch[i].action, X, row);
    y_pos(row) = targets[i];
    ++row;
  }
  for (size_t i : zero_seg) {
    codec.encode_row(batch[i].state, batch[i].goal, batch[i].action, X, row++);
  }
  for (const auto& neg : negatives) {
    codec.encode_row(neg.state, neg.goal, neg.action, X, row++);
  }

  Mlp::Tape tape;
  Eigen::VectorXd z = model.net().forward_tape(X, tape).col(0);
  Eigen::VectorXd dlogits = Eigen::VectorXd::Zero(z.size());
  StepStats stats;
  stats.n_pos = static_cast<int>(n_pos);
  stats.n_neg = static_cast<int>(n_zero);
  if (n_pos > 0) {
    Eigen::VectorXd d;
    stats.loss_pos = sigmoid_scalar_loss(z.head(static_cast<Eigen::Index>(n_pos)), y_pos,
                                         model.config().loss, &d);
    dlogits.head(static_cast<Eigen::Index>(n_pos)) = d;
    double acc = 0.0;
    for (size_t i = 0; i < n_pos; ++i) acc += sigmoid(z(static_cast<Eigen::Index>(i)));
    stats.mean_q_pos = acc / static_cast<double>(n_pos);
  }
  if (n_zero > 0) {
    Eigen::VectorXd d;
    Eigen::VectorXd zeros = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_zero));
    stats.loss_neg = sigmoid_scalar_loss(z.tail(static_cast<Eigen::Index>(n_zero)), zeros,
                                         model.config().loss, &d);
    dlogits.tail(static_cast<Eigen::Index>(n_zero)) = d;
    double acc = 0.0;
    for (size_t i = 0; i < n_zero; ++i)
      acc += sigmoid(z(static_cast<Eigen::Index>(n_pos + i)));
    stats.mean_q_neg = acc / static_cast<double>(n_zero);
  }

  try {
    MlpGrads grads = model.net().backward(tape, dlogits);
    adam_step(model.net(), model.opt(), grads);
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " (training step " +
                       std::to_string(model.step + 1) + ")");
  }
  model.step += 1;
  model.sync_target_if_due();
  return stats;
}

TrainResult train_offline(const Dataset& d, const EnvSpec& spec, const TrainConfig& cfg,
                          const EvalHook& eval_hook) {
  if (d.trajectories.empty()) throw std::invalid_argument("train_offline: empty dataset");
  const StatePool pool = StatePool::from(d);
  const ActionSpace space = spec.actions;
  Rng init_rng = Rng::stream(cfg.seed, "init");
  QModel model(InputCodec::for_env(spec), cfg.model, init_rng);
  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng extract_rng = Rng::stream(cfg.seed, "extract");
  Rng train_rng = Rng::stream(cfg.seed, "train");

  auto visit = [&](int count) {
    for (int k = 0; k < count; ++k) {
      const Trajectory& tau = d.trajectories[extract_rng.uniform_index(d.trajectories.size())];
      for (auto& ex : extract_examples(tau, pool, cfg.relabel, &model, space, cfg.gamma,
                                       cfg.eps, extract_rng))
        buffer.push(std::move(ex));
    }
  };
  visit(cfg.warmup_extracts);
  while (buffer.size() < static_cast<size_t>(cfg.batch_size)) visit(1);

  TrainResult result{std::move(model), {}};
  for (int step = 1; step <= cfg.gradient_steps; ++step) {
    visit(1);
    StepStats st = train_step(result.model, buffer, space, &pool, cfg, train_rng);
    const bool metrics_due = cfg.metrics_every > 0 && step % cfg.metrics_every == 0;
    const bool eval_due = cfg.eval_every > 0 && eval_hook && step % cfg.eval_every == 0;
    if (metrics_due || eval_due || step == cfg.gradient_steps) {
      MetricsRow row;
      row.step = step;
      row.loss_pos = st.loss_pos;
      row.loss_neg = st.loss_neg;
      row.mean_q_pos = st.mean_q_pos;
      row.mean_q_neg = st.mean_q_neg;
      row.buffer_size = buffer.size();
      if (eval_due) row.eval_success = eval_hook(result.model, step);
      result.metrics.push_back(row);
    }
  }
  return result;
}

namespace {

// Greedy task policy with epsilon exploration, goal fixed to all zeros.
Action task_action(const QModel& model, const State& s, const Goal& null_goal,
                   const ActionSpace& space, const CemConfig& cem, double explore_eps,
                   Rng& rng) {
  if (explore_eps > 0.0 && rng.uniform() < explore_eps) {
    if (space.kind == ActionKind::Discrete) return Action::discrete(rng.uniform_int(space.count));
    std::vector<double> v(space.bounds.dims());
    for (size_t d = 0; d < v.size(); ++d)
      v[d] = rng.uniform(space.bounds.lo[d], space.bounds.hi[d]);
    return Action::continuous(std::move(v));
  }
  return argmax_action(model, NetSide::Online, s, null_goal, space, cem, rng).first;
}

double eval_task_success(const QModel& model, const EnvSpec& spec, const TaskSpec& task,
                         const CemConfig& cem, int episodes, Rng& rng) {
  const Goal null_goal = Goal::null(spec.state_repr);
  int hits = 0;
  for (int e = 0; e < episodes; ++e) {
    State s = env_reset(spec, rng.next_u64());
    if (task.in_region(spec, s)) {
      ++hits;
      continue;
    }
    for (int t = 0; t < spec.horizon; ++t) {
      Action a = argmax_action(model, NetSide::Online, s, null_goal, spec.actions, cem, rng).first;
      State next = env_step(spec, s, a);
      if (task.in_region(spec, next)) {
        ++hits;
        break;
      }
      s = next;
    }
  }
  return static_cast<double>(hits) / episodes;
}

}  // namespace

TaskTrainResult train_task(const EnvSpec& spec, const TaskSpec& task, const Dataset* aux_data,
                           const AuxConfig& aux, const TaskTrainConfig& cfg,
                           const QModel* init) {
  if (aux.xi < 0.0 || aux.xi >= 0.5)
    throw std::invalid_argument("train_task: mix-in probability must lie in [0, 0.5)");
  if (aux.xi > 0.0 && !aux_data)
    throw std::invalid_argument("train_task: mix-in requires a relabeling dataset");

  const ActionSpace space = spec.actions;
  const Goal null_goal = Goal::null(spec.state_repr);
  Rng init_rng = Rng::stream(cfg.base.seed, "task-init");
  QModel model = init ? *init : QModel(InputCodec::for_env(spec), cfg.base.model, init_rng);
  model.step = 0;
  model.force_sync();
  ReplayBuffer buffer(cfg.base.buffer_capacity);
  Rng mix_rng = Rng::stream(cfg.base.seed, "task-mix");
  Rng ep_rng = Rng::stream(cfg.base.seed, "task-episode");
  Rng train_rng = Rng::stream(cfg.base.seed, "task-train");
  Rng eval_rng = Rng::stream(cfg.base.seed, "task-eval");

  std::optional<StatePool> pool;
  if (aux_data) pool = StatePool::from(*aux_data);

  TaskTrainResult result{std::move(model), {}, -1, -1, 0};
  for (int ins = 1; ins <= cfg.max_insertions; ++ins) {
    const double u = mix_rng.uniform();
    if (aux.xi > 0.0 && u < aux.xi) {
      // Goal-relabeled trajectories from the offline dataset.
      const Trajectory& tau =
          aux_data->trajectories[mix_rng.uniform_index(aux_data->trajectories.size())];
      for (auto& ex : extract_examples(tau, *pool, cfg.base.relabel, &result.model, space,
                                       cfg.base.gamma, cfg.base.eps, mix_rng))
        buffer.push(std::move(ex));
    } else if (aux.xi > 0.0 && u < 2.0 * aux.xi) {
      // Relabeled trajectories with the action swapped for an unseen one and
      // the reward zeroed.
      const Trajectory& tau =
          aux_data->trajectories[mix_rng.uniform_index(aux_data->trajectories.size())];
      for (auto& ex : extract_examples(tau, *pool, cfg.base.relabel, &result.model, space,
                                       cfg.base.gamma, cfg.base.eps, mix_rng)) {
        RelabeledExample neg = ex;
        neg.action = sample_negative_action(result.model, ex.state, ex.goal, ex.action, space,
                                            cfg.base.neg, mix_rng);
        neg.label = LabelKind::NegativeAction;
        neg.terminal = true;
        neg.reward = 0.0;
        neg.has_stored_value = false;
        buffer.push(std::move(neg));
      }
    } else {
      // Online task episode with the original sparse reward and a null goal.
      result.env_episodes += 1;
      State s = env_reset(spec, ep_rng.next_u64());
      for (int t = 0; t < spec.horizon; ++t) {
        Action a = task_action(result.model, s, null_goal, space, cfg.base.cem,
                               cfg.explore_eps, ep_rng);
        State next = env_step(spec, s, a);
        double r = task_reward(task, spec, s, a, next);
        RelabeledExample ex;
        ex.state = s;
        ex.action = a;
        ex.next_state = next;
        ex.goal = null_goal;
        ex.label = LabelKind::TaskReward;
        ex.reward = r;
        ex.terminal = r > 0.0;
        buffer.push(std::move(ex));
        if (r > 0.0) break;
        s = next;
      }
    }

    if (buffer.size() < static_cast<size_t>(cfg.base.batch_size)) continue;
    StepStats st;
    for (int k = 0; k < cfg.steps_per_insertion; ++k)
      st = train_step(result.model, buffer, space, pool ? &*pool : nullptr, cfg.base,
                      train_rng);

    if (cfg.eval_every_insertions > 0 && ins % cfg.eval_every_insertions == 0) {
      double success =
          eval_task_success(result.model, spec, task, cfg.base.cem, cfg.eval_episodes, eval_rng);
      MetricsRow row;
      row.step = result.model.step;
      row.loss_pos = st.loss_pos;
      row.loss_neg = st.loss_neg;
      row.mean_q_pos = st.mean_q_pos;
      row.mean_q_neg = st.mean_q_neg;
      row.buffer_size = buffer.size();
      row.eval_success = success;
      result.metrics.push_back(row);
      if (success >= cfg.success_target && result.steps_to_target < 0) {
        result.steps_to_target = result.model.step;
        result.episodes_to_target = result.env_episodes;
        break;
      }
    }
  }
  return result;
}

TaskTrainResult train_aux_mixin(const Dataset& d, const EnvSpec& spec, const AuxConfig& aux,
                                const TaskTrainConfig& cfg) {
  return train_task(spec, aux.task, &d, aux, cfg, nullptr);
}

PretrainFinetuneResult pretrain_finetune(const Dataset& d, const EnvSpec& spec,
                                         const TaskSpec& task, const TrainConfig& pretrain_cfg,
                                         const TaskTrainConfig& finetune_cfg) {
  TrainResult pre = train_offline(d, spec, pretrain_cfg);
  AuxConfig no_aux;
  no_aux.xi = 0.0;
  no_aux.task = task;
  TaskTrainResult fin = train_task(spec, task, nullptr, no_aux, finetune_cfg, &pre.model);
  return PretrainFinetuneResult{std::move(pre.metrics), std::move(fin)};
}

}  // namespace gcql
