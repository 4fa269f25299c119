#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "gcql/qmodel.hpp"
#include "gcql/rng.hpp"
#include "gcql/types.hpp"

namespace gcql {

struct CemConfig {
  int iterations = 2;
  int samples = 64;
  double elite_fraction = 0.10;
  std::vector<double> initial_stddev;  // per dimension; empty = 0.3 * range
  double variance_floor = 1e-3;

  int elite_count() const {
    return std::max(1, static_cast<int>(std::ceil(elite_fraction * samples)));
  }
};

// Dataset evidence for tabular envs: which (state, action) pairs were
// demonstrated and which goals are reachable from each cell through
// demonstrated transitions (transitively, so pathways may span episodes).
// A negative candidate is vetoed when taking it is demonstrated AND the
// data shows a pathway from its successor to the goal - there is evidence
// of reaching the goal, so the conservative assumption does not apply.
struct EvidenceSet {
  EnvSpec spec;
  int n_states = 0;
  int n_actions = 0;
  std::vector<bool> action_seen;  // s * n_actions + a
  std::vector<bool> reach;        // s * n_states + g over the dataset graph

  static EvidenceSet from_dataset(const Dataset& d, const EnvSpec& spec);
  bool vetoes(int s_cell, int action_id, int g_cell) const;
};

struct NegSampleConfig {
  int candidate_count = 64;
  // Fraction of the per-dimension action range; discrete spaces exclude the
  // exact seen action instead.
  double min_action_distance = 0.10;
  double temperature = 1.0;
  // Optional exact filter: never emit a negative for an evidenced
  // (state, action, goal) triple. Tabular only.
  const EvidenceSet* evidence = nullptr;
};

// Cross-entropy search for the maximizer of f over a box. Samples a clipped
// diagonal Gaussian (initial mean = box center), refits mean and stddev on
// the top elite fraction each round, and returns the best sample seen.
std::vector<double> cem_argmax(const std::function<double(const std::vector<double>&)>& f,
                               const ActionBounds& bounds, const CemConfig& cfg, Rng& rng);

enum class NetSide { Online, Target };

// Greedy action: exact enumeration for discrete spaces (ties to the lowest
// id), CEM for continuous ones. Returns the action and its Q-value.
std::pair<Action, double> argmax_action(const QModel& model, NetSide side, const State& s,
                                        const Goal& g, const ActionSpace& space,
                                        const CemConfig& cem, Rng& rng);

// Conservative negative: candidate actions far enough from the seen one,
// one of them drawn from the softmax of their Q-values. Discrete spaces
// enumerate the distinct non-seen actions; continuous spaces draw
// `candidate_count` uniform samples and retry once with twice as many if
// the distance filter rejects them all.
Action sample_negative_action(const QModel& model, const State& s, const Goal& g,
                              const Action& seen, const ActionSpace& space,
                              const NegSampleConfig& cfg, Rng& rng);

// Same draw, but returns nullopt instead of throwing when the filters leave
// no candidate (the trainer then simply emits no negative for that example).
std::optional<Action> try_sample_negative_action(const QModel& model, const State& s,
                                                 const Goal& g, const Action& seen,
                                                 const ActionSpace& space,
                                                 const NegSampleConfig& cfg, Rng& rng);

// Softmax probabilities over candidate Q-values at temperature tau.
std::vector<double> softmax_weights(const std::vector<double>& q_values, double temperature);

}  // namespace gcql
