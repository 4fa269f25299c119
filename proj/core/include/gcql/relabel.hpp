#pragma once

#include <optional>
#include <vector>

#include "gcql/qmodel.hpp"
#include "gcql/rng.hpp"
#include "gcql/types.hpp"

namespace gcql {

enum class GoalSamplerMode { UniformDataset, QSkewed };

struct RelabelConfig {
  bool chain_enabled = true;
  int chain_goals_per_trajectory = 1;
  GoalSamplerMode goal_sampler = GoalSamplerMode::UniformDataset;
  double skew_temperature = 1.0;
  int cuts_per_trajectory = 4;
  // Emit intermediate transitions for chain goals so value can propagate
  // backward along the sub-sequence, not just at the chaining point.
  bool chain_intermediates = true;
  // Freeze the chain bootstrap value at extraction time instead of resolving
  // it against the lagged target when targets are computed.
  bool chain_value_at_extract = false;
};

// Flattened multiset of every state occurrence in a dataset; goal samplers
// draw from it so chain goals are always dataset members.
struct StatePool {
  std::vector<State> states;

  static StatePool from(const Dataset& d);
  bool contains(const State& s) const;
};

// Draws a goal from the pool. Uniform mode weights every occurrence equally;
// q-skewed mode softmax-weights a 32-candidate batch by Q(s, a, candidate).
Goal sample_goal(const StatePool& pool, GoalSamplerMode mode, const QModel* model,
                 const State& s, const Action& a, double temperature, Rng& rng);

// Cuts the trajectory cfg.cuts_per_trajectory times at uniform i in {1..T},
// relabels each prefix with its final state as a positive goal, and (when
// chaining is on) with sampled dataset goals anchored at the cut. `model` is
// required for q-skewed goal sampling and for chain_value_at_extract;
// `gamma`/`eps` feed the frozen chain bootstrap in the latter mode.
// Trajectories shorter than one transition are skipped with a warning.
std::vector<RelabeledExample> extract_examples(const Trajectory& tau, const StatePool& pool,
                                               const RelabelConfig& cfg, const QModel* model,
                                               const ActionSpace& space, double gamma,
                                               double eps, Rng& rng);

// Fixed-capacity FIFO ring; sampling is uniform with replacement over the
// current contents.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void push(RelabeledExample ex);
  std::vector<RelabeledExample> sample(size_t n, Rng& rng) const;
  const RelabeledExample& sample_one(Rng& rng) const;

  size_t size() const { return ring_.size(); }
  size_t capacity() const { return capacity_; }
  uint64_t total_pushed() const { return pushed_; }
  const RelabeledExample& at(size_t i) const { return ring_[i]; }

 private:
  size_t capacity_;
  size_t head_ = 0;  // next eviction slot once full
  uint64_t pushed_ = 0;
  std::vector<RelabeledExample> ring_;
};

}  // namespace gcql
