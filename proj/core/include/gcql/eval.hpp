#pragma once

#include <functional>
#include <vector>

#include "gcql/baselines.hpp"
#include "gcql/env.hpp"
#include "gcql/oracle.hpp"
#include "gcql/qmodel.hpp"

namespace gcql {

struct EvalReport {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  double stderr_value = 0.0;
  std::vector<bool> outcomes;       // per goal
  std::vector<int> steps_to_goal;   // per goal, -1 on failure
  std::vector<int> steps_histogram; // indexed by step count, successes only
};

using Policy = std::function<Action(const State& s, const Goal& g, Rng& rng)>;

// Rolls one episode per goal from the environment's start distribution and
// acts greedily with the supplied policy. Pure evaluation: nothing here can
// touch a replay buffer or parameters. Deterministic given seed.
EvalReport eval_policy(const Policy& policy, const EnvSpec& spec, const std::vector<Goal>& goals,
                       double eps, int T, uint64_t seed);

// Same rollout loop with explicit (start, goal) pairs, for cross-boundary
// probes where the start distribution matters.
EvalReport eval_pairs(const Policy& policy, const EnvSpec& spec,
                      const std::vector<std::pair<State, Goal>>& pairs, double eps, int T,
                      uint64_t seed);

Policy greedy_q_policy(const QModel& model, const ActionSpace& space, const CemConfig& cem);
Policy gcbc_policy(const PolicyModel& model);
Policy oracle_greedy_policy(const TabularQ& q, const EnvSpec& spec);
Policy uniform_random_policy(const EnvSpec& spec);

// Evaluation goals drawn from fresh env states (held-out) or from dataset
// states (held-in).
std::vector<Goal> fresh_goals(const EnvSpec& spec, int n, uint64_t seed);
std::vector<Goal> dataset_goals(const Dataset& d, int n, uint64_t seed);

// Mean action-value spread max_a Q - min_a Q over all free (state, goal)
// pairs of a tabular env; the collapse diagnostic.
double action_discrimination_spread(const QModel& model, const EnvSpec& spec);

}  // namespace gcql
