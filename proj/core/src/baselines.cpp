#include "gcql/baselines.hpp"

#include <stdexcept>

namespace gcql {

Action PolicyModel::act(const State& s, const Goal& g) const {
  Eigen::MatrixXd out = net.forward(codec.encode_sg(s, g).transpose());
  if (codec.action_kind == ActionKind::Discrete) {
    int best = 0;
    for (int a = 1; a < out.cols(); ++a)
      if (out(0, a) > out(0, best)) best = a;
    return Action::discrete(best);
  }
  std::vector<double> v(static_cast<size_t>(out.cols()));
  for (int d = 0; d < out.cols(); ++d) v[static_cast<size_t>(d)] = out(0, d);
  return Action::continuous(std::move(v));
}

GcbcResult gcbc_train(const Dataset& d, const EnvSpec& spec, const GcbcConfig& cfg) {
  if (d.trajectories.empty()) throw std::invalid_argument("gcbc_train: empty dataset");
  const StatePool pool = StatePool::from(d);
  const ActionSpace space = spec.actions;
  InputCodec codec = InputCodec::for_env(spec);
  const int out_dim = space.kind == ActionKind::Discrete
                          ? space.count
                          : static_cast<int>(space.bounds.dims());
  std::vector<int> sizes{codec.sg_dim()};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(out_dim);

  Rng init_rng = Rng::stream(cfg.seed, "gcbc-init");
  PolicyModel policy{codec, Mlp(sizes)};
  policy.net.init(init_rng, 1.0);
  AdamState opt;
  opt.init(policy.net, cfg.adam);

  RelabelConfig relabel;
  relabel.chain_enabled = false;  // imitation uses within-trajectory goals only
  relabel.cuts_per_trajectory = cfg.cuts_per_trajectory;

  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng extract_rng = Rng::stream(cfg.seed, "gcbc-extract");
  Rng train_rng = Rng::stream(cfg.seed, "gcbc-train");
  auto visit = [&](int count) {
    for (int k = 0; k < count; ++k) {
      const Trajectory& tau = d.trajectories[extract_rng.uniform_index(d.trajectories.size())];
      for (auto& ex : extract_examples(tau, pool, relabel, nullptr, space, spec.gamma, 0.05,
                                       extract_rng))
        buffer.push(std::move(ex));
    }
  };
  visit(cfg.warmup_extracts);
  while (buffer.size() < static_cast<size_t>(cfg.batch_size)) visit(1);

  GcbcResult result{std::move(policy), {}};
  for (int step = 1; step <= cfg.gradient_steps; ++step) {
    visit(1);
    auto batch = buffer.sample(static_cast<size_t>(cfg.batch_size), train_rng);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(batch.size()), codec.sg_dim());
    std::vector<int> labels(batch.size());
    Eigen::MatrixXd action_targets(static_cast<Eigen::Index>(batch.size()), out_dim);
    for (size_t i = 0; i < batch.size(); ++i) {
      codec.encode_sg_row(batch[i].state, batch[i].goal, X, static_cast<Eigen::Index>(i));
      if (space.kind == ActionKind::Discrete) {
        labels[i] = batch[i].action.id;
      } else {
        for (int dd = 0; dd < out_dim; ++dd)
          action_targets(static_cast<Eigen::Index>(i), dd) =
              batch[i].action.vec[static_cast<size_t>(dd)];
      }
    }
    Mlp::Tape tape;
    Eigen::MatrixXd out = result.policy.net.forward_tape(X, tape);
    Eigen::MatrixXd dout;
    double loss = space.kind == ActionKind::Discrete
                      ? softmax_ce_loss(out, labels, &dout)
                      : mse_loss(out, action_targets, &dout);
    MlpGrads grads = result.policy.net.backward(tape, dout);
    adam_step(result.policy.net, opt, grads);
    if ((cfg.metrics_every > 0 && step % cfg.metrics_every == 0) ||
        step == cfg.gradient_steps) {
      MetricsRow row;
      row.step = step;
      row.loss_pos = loss;
      row.buffer_size = buffer.size();
      result.metrics.push_back(row);
    }
  }
  return result;
}

TrainResult her_train(const Dataset& d, const EnvSpec& spec, TrainConfig cfg, BaselineKind kind,
                      const EvalHook& eval_hook) {
  switch (kind) {
    case BaselineKind::HerNoReg:
      cfg.neg_mode = NegMode::None;
      break;
    case BaselineKind::HerRandNegGoal:
      cfg.neg_mode = NegMode::RandomGoal;
      break;
    case BaselineKind::GCBC:
      throw std::invalid_argument("her_train: GCBC has its own trainer");
  }
  // Plain hindsight relabeling: goals stay within the trajectory.
  cfg.relabel.chain_enabled = false;
  return train_offline(d, spec, cfg, eval_hook);
}

}  // namespace gcql
