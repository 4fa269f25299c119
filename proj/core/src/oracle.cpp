#include "gcql/oracle.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gcql {

const GridTables& GridTables::of(const EnvSpec& spec) {
  if (!spec.tabular()) throw std::invalid_argument("GridTables: tabular env required");
  static std::mutex mu;
  static std::map<std::string, GridTables> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(spec.id);
  if (it != cache.end()) return it->second;

  GridTables t;
  const int S = t.n_states = spec.state_count();
  const int A = t.n_actions = spec.actions.count;
  t.next.assign(static_cast<size_t>(S) * A, -1);
  EnvSpec idx_spec = spec;
  idx_spec.state_repr = StateKind::Tabular;
  for (int s = 0; s < S; ++s) {
    if (spec.is_wall(s)) continue;
    for (int a = 0; a < A; ++a)
      t.next[static_cast<size_t>(s) * A + a] =
          idx_spec.cell_of(env_step(idx_spec, State::tabular(s), Action::discrete(a)));
  }
  t.dist.assign(static_cast<size_t>(S) * S, -1);
  for (int src = 0; src < S; ++src) {
    if (spec.is_wall(src)) continue;
    auto* d = &t.dist[static_cast<size_t>(src) * S];
    d[src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      int c = queue.front();
      queue.pop_front();
      for (int a = 0; a < A; ++a) {
        int n = t.next[static_cast<size_t>(c) * A + a];
        if (n >= 0 && d[n] < 0) {
          d[n] = d[c] + 1;
          queue.push_back(n);
        }
      }
    }
  }
  return cache.emplace(spec.id, std::move(t)).first->second;
}

TabularQ value_iteration_goal(const EnvSpec& spec, double gamma, double tol) {
  if (!spec.tabular()) throw std::invalid_argument("value_iteration_goal: tabular env required");
  if (tol <= 0.0) throw std::invalid_argument("value_iteration_goal: tol must be positive");
  const GridTables& t = GridTables::of(spec);
  const int S = t.n_states;
  const int A = t.n_actions;

  TabularQ out;
  out.n_states = S;
  out.n_actions = A;
  out.gamma = gamma;
  out.q.assign(static_cast<size_t>(S) * A * S, 0.0);

  std::vector<double> v(static_cast<size_t>(S) * S, 0.0);  // max_a Q, indexed s*S+g
  for (int sweep = 0; sweep < spec.horizon; ++sweep) {
    double delta = 0.0;
    for (int s = 0; s < S; ++s) {
      if (spec.is_wall(s)) continue;
      for (int g = 0; g < S; ++g) {
        if (spec.is_wall(g)) continue;
        for (int a = 0; a < A; ++a) {
          int ns = t.successor(s, a);
          double q = ns == g ? 1.0 : gamma * v[static_cast<size_t>(ns) * S + g];
          double& slot = out.at(s, a, g);
          delta = std::max(delta, std::fabs(q - slot));
          slot = q;
        }
      }
    }
    for (int s = 0; s < S; ++s)
      for (int g = 0; g < S; ++g) {
        double best = 0.0;
        for (int a = 0; a < A; ++a) best = std::max(best, out.at(s, a, g));
        v[static_cast<size_t>(s) * S + g] = best;
      }
    if (delta < tol) break;
  }
  return out;
}

std::optional<int> bfs_steps(const EnvSpec& spec, int s_cell, int g_cell) {
  const GridTables& t = GridTables::of(spec);
  if (s_cell < 0 || s_cell >= t.n_states || g_cell < 0 || g_cell >= t.n_states)
    throw std::invalid_argument("bfs_steps: cell out of range");
  int d = t.distance(s_cell, g_cell);
  if (d < 0) return std::nullopt;
  return d;
}

double random_walk_success(const EnvSpec& spec, const State& s, const State& g, int T,
                           int n_samples, uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("random_walk_success: n_samples must be >= 1");
  Rng rng = Rng::stream(seed, "random-walk");
  int hits = 0;
  const Goal goal = Goal::of(g);
  for (int i = 0; i < n_samples; ++i) {
    State cur = s;
    if (goal_reached(cur, goal, 0.05)) {
      ++hits;
      continue;
    }
    for (int t = 0; t < T; ++t) {
      Action a;
      if (spec.actions.kind == ActionKind::Discrete) {
        a = Action::discrete(rng.uniform_int(spec.actions.count));
      } else {
        std::vector<double> v(spec.actions.bounds.dims());
        for (size_t d = 0; d < v.size(); ++d)
          v[d] = rng.uniform(spec.actions.bounds.lo[d], spec.actions.bounds.hi[d]);
        a = Action::continuous(std::move(v));
      }
      cur = env_step(spec, cur, a);
      if (goal_reached(cur, goal, 0.05)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / n_samples;
}

}  // namespace gcql
