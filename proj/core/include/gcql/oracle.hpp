#pragma once

#include <optional>
#include <vector>

#include "gcql/env.hpp"
#include "gcql/types.hpp"

namespace gcql {

// Exact goal-conditioned optimal Q for a tabular environment, dense over
// (state, action, goal). Under deterministic dynamics Q*(s,a,g) = gamma^(k-1)
// where k counts the steps of the optimal path that starts with a.
struct TabularQ {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.9;
  std::vector<double> q;  // indexed (s * n_actions + a) * n_states + g

  double at(int s, int a, int g) const {
    return q[static_cast<size_t>(s * n_actions + a) * n_states + g];
  }
  double& at(int s, int a, int g) {
    return q[static_cast<size_t>(s * n_actions + a) * n_states + g];
  }
  double value(int s, int g) const {
    double best = 0.0;
    for (int a = 0; a < n_actions; ++a) best = std::max(best, at(s, a, g));
    return best;
  }
  // Greedy action, ties broken by lowest id.
  int greedy(int s, int g) const {
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
      if (at(s, a, g) > at(s, best, g)) best = a;
    return best;
  }
};

// Successor table and all-pairs BFS distances for a tabular env, computed
// once per env id and cached.
struct GridTables {
  int n_states = 0;
  int n_actions = 0;
  std::vector<int> next;  // s * n_actions + a
  std::vector<int> dist;  // s * n_states + g, -1 when unreachable

  int successor(int s, int a) const { return next[static_cast<size_t>(s) * n_actions + a]; }
  int distance(int s, int g) const { return dist[static_cast<size_t>(s) * n_states + g]; }

  static const GridTables& of(const EnvSpec& spec);
};

// Finite-horizon value iteration on the deterministic tabular MDP:
//   Q(s,a,g) = [step(s,a)=g] + [step(s,a)!=g] * gamma * max_a' Q(step(s,a),a',g)
// iterated up to `spec.horizon` backups or until the sup-norm change drops
// below tol.
TabularQ value_iteration_goal(const EnvSpec& spec, double gamma, double tol = 1e-12);

// Minimal number of actions from s to g; nullopt when unreachable.
std::optional<int> bfs_steps(const EnvSpec& spec, int s_cell, int g_cell);

// Monte-Carlo estimate of the probability that a uniform-random policy
// reaches g from s within T steps.
double random_walk_success(const EnvSpec& spec, const State& s, const State& g, int T,
                           int n_samples, uint64_t seed);

}  // namespace gcql
