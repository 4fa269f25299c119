#include "gcql/relabel.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

#include "gcql/actionopt.hpp"

namespace gcql {

StatePool StatePool::from(const Dataset& d) {
  StatePool p;
  for (const auto& tau : d.trajectories)
    for (const auto& s : tau.states) p.states.push_back(s);
  if (p.states.empty()) throw std::invalid_argument("StatePool: dataset has no states");
  return p;
}

bool StatePool::contains(const State& s) const {
  return std::find(states.begin(), states.end(), s) != states.end();
}

Goal sample_goal(const StatePool& pool, GoalSamplerMode mode, const QModel* model,
                 const State& s, const Action& a, double temperature, Rng& rng) {
  if (pool.states.empty()) throw std::invalid_argument("sample_goal: empty pool");
  if (mode == GoalSamplerMode::UniformDataset)
    return Goal::of(pool.states[rng.uniform_index(pool.states.size())]);
  if (!model)
    throw std::invalid_argument("sample_goal: q-skewed mode requires a Q-function");
  constexpr size_t kCandidates = 32;
  std::vector<const State*> cands(kCandidates);
  std::vector<double> q(kCandidates);
  const InputCodec& codec = model->codec();
  Eigen::MatrixXd X(kCandidates, codec.input_dim());
  for (size_t i = 0; i < kCandidates; ++i) {
    cands[i] = &pool.states[rng.uniform_index(pool.states.size())];
    codec.encode_row(s, Goal::of(*cands[i]), a, X, static_cast<Eigen::Index>(i));
  }
  Eigen::VectorXd qv = model->q_batch(X);
  std::vector<double> qs(qv.data(), qv.data() + qv.size());
  auto w = softmax_weights(qs, temperature);
  return Goal::of(*cands[rng.categorical(w)]);
}

namespace {

// Frozen chain bootstrap: 1 on goal attainment, else the discounted greedy
// target value at the cut state, evaluated with the online net now.
double chain_value_now(const QModel& model, const State& cut_state, const Goal& g,
                       const ActionSpace& space, double gamma, double eps) {
  if (goal_reached(cut_state, g, eps)) return 1.0;
  if (space.kind != ActionKind::Discrete)
    throw std::invalid_argument("chain_value_at_extract needs a discrete action space");
  const InputCodec& codec = model.codec();
  Eigen::MatrixXd X(space.count, codec.input_dim());
  for (int a = 0; a < space.count; ++a) codec.encode_row(cut_state, g, Action::discrete(a), X, a);
  return gamma * model.q_batch(X).maxCoeff();
}

}  // namespace

std::vector<RelabeledExample> extract_examples(const Trajectory& tau, const StatePool& pool,
                                               const RelabelConfig& cfg, const QModel* model,
                                               const ActionSpace& space, double gamma,
                                               double eps, Rng& rng) {
  std::vector<RelabeledExample> out;
  if (tau.states.size() < 2) {
    std::cerr << "extract_examples: warning: skipping trajectory with "
              << tau.states.size() << " state(s)\n";
    return out;
  }
  if (cfg.cuts_per_trajectory < 1)
    throw std::invalid_argument("extract_examples: cuts_per_trajectory must be >= 1");
  if (cfg.goal_sampler == GoalSamplerMode::QSkewed && !model)
    throw std::invalid_argument("extract_examples: q-skewed sampling requires a Q-function");

  const int T = static_cast<int>(tau.actions.size());
  for (int cut = 0; cut < cfg.cuts_per_trajectory; ++cut) {
    const int i = 1 + rng.uniform_int(T);
    const Goal gpos = Goal::of(tau.states[static_cast<size_t>(i)]);
    for (int t = 0; t < i; ++t) {
      RelabeledExample ex;
      ex.state = tau.states[static_cast<size_t>(t)];
      ex.action = tau.actions[static_cast<size_t>(t)];
      ex.next_state = tau.states[static_cast<size_t>(t) + 1];
      ex.goal = gpos;
      if (t == i - 1) {
        ex.label = LabelKind::PositiveTerminal;
        ex.terminal = true;
      } else {
        ex.label = LabelKind::Intermediate;
      }
      out.push_back(std::move(ex));
    }
    if (!cfg.chain_enabled) continue;
    for (int c = 0; c < cfg.chain_goals_per_trajectory; ++c) {
      const Goal grand =
          sample_goal(pool, cfg.goal_sampler, model, tau.states[static_cast<size_t>(i) - 1],
                      tau.actions[static_cast<size_t>(i) - 1], cfg.skew_temperature, rng);
      const int first_t = cfg.chain_intermediates ? 0 : i - 1;
      for (int t = first_t; t < i; ++t) {
        RelabeledExample ex;
        ex.state = tau.states[static_cast<size_t>(t)];
        ex.action = tau.actions[static_cast<size_t>(t)];
        ex.next_state = tau.states[static_cast<size_t>(t) + 1];
        ex.goal = grand;
        if (t == i - 1) {
          ex.label = LabelKind::ChainTerminal;
          ex.terminal = true;
          if (cfg.chain_value_at_extract) {
            if (!model)
              throw std::invalid_argument(
                  "extract_examples: chain_value_at_extract requires a Q-function");
            ex.reward = chain_value_now(*model, ex.next_state, grand, space, gamma, eps);
            ex.has_stored_value = true;
          }
        } else {
          ex.label = LabelKind::Intermediate;
        }
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  ring_.reserve(capacity_);
}

void ReplayBuffer::push(RelabeledExample ex) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(ex));
  } else {
    ring_[head_] = std::move(ex);
    head_ = (head_ + 1) % capacity_;
  }
  ++pushed_;
}

std::vector<RelabeledExample> ReplayBuffer::sample(size_t n, Rng& rng) const {
  if (ring_.empty()) throw std::runtime_error("ReplayBuffer::sample: buffer is empty");
  std::vector<RelabeledExample> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(ring_[rng.uniform_index(ring_.size())]);
  return out;
}

const RelabeledExample& ReplayBuffer::sample_one(Rng& rng) const {
  if (ring_.empty()) throw std::runtime_error("ReplayBuffer::sample_one: buffer is empty");
  return ring_[rng.uniform_index(ring_.size())];
}

}  // namespace gcql
