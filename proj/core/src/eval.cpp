#include "gcql/eval.hpp"

#include <cmath>

namespace gcql {

namespace {

EvalReport run_rollouts(const Policy& policy, const EnvSpec& spec,
                        const std::vector<std::pair<State, Goal>>& pairs, double eps, int T,
                        uint64_t seed) {
  EvalReport report;
  report.episodes = static_cast<int>(pairs.size());
  report.steps_histogram.assign(static_cast<size_t>(T) + 1, 0);
  Rng rng = Rng::stream(seed, "eval");
  for (const auto& [start, goal] : pairs) {
    State s = start;
    int steps = -1;
    if (goal_reached(s, goal, eps)) {
      steps = 0;
    } else {
      for (int t = 0; t < T; ++t) {
        Action a = policy(s, goal, rng);
        s = env_step(spec, s, a);
        if (goal_reached(s, goal, eps)) {
          steps = t + 1;
          break;
        }
      }
    }
    report.outcomes.push_back(steps >= 0);
    report.steps_to_goal.push_back(steps);
    if (steps >= 0) {
      ++report.successes;
      ++report.steps_histogram[static_cast<size_t>(steps)];
    }
  }
  if (report.episodes > 0) {
    double p = static_cast<double>(report.successes) / report.episodes;
    report.success_rate = p;
    report.stderr_value = std::sqrt(p * (1.0 - p) / report.episodes);
  }
  return report;
}

}  // namespace

EvalReport eval_policy(const Policy& policy, const EnvSpec& spec, const std::vector<Goal>& goals,
                       double eps, int T, uint64_t seed) {
  std::vector<std::pair<State, Goal>> pairs;
  pairs.reserve(goals.size());
  for (size_t i = 0; i < goals.size(); ++i)
    pairs.emplace_back(env_reset(spec, seed * 0x9e3779b9u + i), goals[i]);
  return run_rollouts(policy, spec, pairs, eps, T, seed);
}

EvalReport eval_pairs(const Policy& policy, const EnvSpec& spec,
                      const std::vector<std::pair<State, Goal>>& pairs, double eps, int T,
                      uint64_t seed) {
  return run_rollouts(policy, spec, pairs, eps, T, seed);
}

Policy greedy_q_policy(const QModel& model, const ActionSpace& space, const CemConfig& cem) {
  return [&model, space, cem](const State& s, const Goal& g, Rng& rng) {
    return argmax_action(model, NetSide::Online, s, g, space, cem, rng).first;
  };
}

Policy gcbc_policy(const PolicyModel& model) {
  return [&model](const State& s, const Goal& g, Rng&) { return model.act(s, g); };
}

Policy oracle_greedy_policy(const TabularQ& q, const EnvSpec& spec) {
  return [&q, &spec](const State& s, const Goal& g, Rng&) {
    return Action::discrete(q.greedy(spec.cell_of(s), spec.cell_of(g.target)));
  };
}

Policy uniform_random_policy(const EnvSpec& spec) {
  ActionSpace space = spec.actions;
  return [space](const State&, const Goal&, Rng& rng) {
    if (space.kind == ActionKind::Discrete)
      return Action::discrete(rng.uniform_int(space.count));
    std::vector<double> v(space.bounds.dims());
    for (size_t d = 0; d < v.size(); ++d)
      v[d] = rng.uniform(space.bounds.lo[d], space.bounds.hi[d]);
    return Action::continuous(std::move(v));
  };
}

std::vector<Goal> fresh_goals(const EnvSpec& spec, int n, uint64_t seed) {
  Rng rng = Rng::stream(seed, "fresh-goals");
  std::vector<Goal> out;
  out.reserve(static_cast<size_t>(n));
  if (spec.tabular()) {
    auto free = spec.free_cells();
    for (int i = 0; i < n; ++i)
      out.push_back(Goal::of(spec.make_state(free[rng.uniform_index(free.size())])));
  } else {
    for (int i = 0; i < n; ++i) {
      std::vector<double> p;
      do {
        p = {rng.uniform(spec.bounds.x0, spec.bounds.x1),
             rng.uniform(spec.bounds.y0, spec.bounds.y1)};
      } while (std::any_of(spec.obstacles.begin(), spec.obstacles.end(),
                           [&](const Rect& r) { return r.contains(p[0], p[1]); }));
      out.push_back(Goal::of(State::continuous(std::move(p))));
    }
  }
  return out;
}

std::vector<Goal> dataset_goals(const Dataset& d, int n, uint64_t seed) {
  Rng rng = Rng::stream(seed, "dataset-goals");
  std::vector<State> pool;
  for (const auto& tau : d.trajectories)
    for (const auto& s : tau.states) pool.push_back(s);
  std::vector<Goal> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(Goal::of(pool[rng.uniform_index(pool.size())]));
  return out;
}

double action_discrimination_spread(const QModel& model, const EnvSpec& spec) {
  if (!spec.tabular())
    throw std::invalid_argument("action_discrimination_spread: tabular env required");
  const InputCodec& codec = model.codec();
  auto free = spec.free_cells();
  const int A = spec.actions.count;
  double total = 0.0;
  size_t pairs = 0;
  Eigen::MatrixXd X(A, codec.input_dim());
  for (int s : free) {
    for (int g : free) {
      State st = spec.make_state(s);
      Goal go = Goal::of(spec.make_state(g));
      for (int a = 0; a < A; ++a) codec.encode_row(st, go, Action::discrete(a), X, a);
      Eigen::VectorXd q = model.q_batch(X);
      total += q.maxCoeff() - q.minCoeff();
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace gcql
