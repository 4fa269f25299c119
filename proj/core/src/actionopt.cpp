#include "gcql/actionopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gcql/oracle.hpp"

namespace gcql {

EvidenceSet EvidenceSet::from_dataset(const Dataset& d, const EnvSpec& env) {
  if (!env.tabular()) throw std::invalid_argument("EvidenceSet: tabular env required");
  EvidenceSet e;
  e.spec = env;
  const int S = e.n_states = env.state_count();
  const int A = e.n_actions = env.actions.count;
  e.action_seen.assign(static_cast<size_t>(S) * A, false);
  std::vector<std::vector<int>> edges(static_cast<size_t>(S));
  for (const auto& tau : d.trajectories) {
    for (size_t t = 0; t < tau.actions.size(); ++t) {
      int from = env.cell_of(tau.states[t]);
      int to = env.cell_of(tau.states[t + 1]);
      e.action_seen[static_cast<size_t>(from) * A + tau.actions[t].id] = true;
      edges[static_cast<size_t>(from)].push_back(to);
    }
  }
  e.reach.assign(static_cast<size_t>(S) * S, false);
  std::vector<int> stack;
  for (int src = 0; src < S; ++src) {
    const size_t base = static_cast<size_t>(src) * S;
    e.reach[base + static_cast<size_t>(src)] = true;
    stack.assign(1, src);
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      for (int n : edges[static_cast<size_t>(c)]) {
        if (!e.reach[base + static_cast<size_t>(n)]) {
          e.reach[base + static_cast<size_t>(n)] = true;
          stack.push_back(n);
        }
      }
    }
  }
  return e;
}

bool EvidenceSet::vetoes(int s_cell, int action_id, int g_cell) const {
  if (!action_seen[static_cast<size_t>(s_cell) * n_actions + action_id]) return false;
  int next = GridTables::of(spec).successor(s_cell, action_id);
  return reach[static_cast<size_t>(next) * n_states + g_cell];
}

std::vector<double> softmax_weights(const std::vector<double>& q_values, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("softmax_weights: temperature must be > 0");
  double zmax = *std::max_element(q_values.begin(), q_values.end());
  std::vector<double> w(q_values.size());
  double total = 0.0;
  for (size_t i = 0; i < q_values.size(); ++i) {
    w[i] = std::exp((q_values[i] - zmax) / temperature);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> cem_argmax(const std::function<double(const std::vector<double>&)>& f,
                               const ActionBounds& bounds, const CemConfig& cfg, Rng& rng) {
  const size_t dims = bounds.dims();
  if (dims == 0) throw std::invalid_argument("cem_argmax: empty bounds");
  if (cfg.iterations < 1) throw std::invalid_argument("cem_argmax: iterations must be >= 1");
  for (size_t d = 0; d < dims; ++d)
    if (!std::isfinite(bounds.lo[d]) || !std::isfinite(bounds.hi[d]) ||
        bounds.lo[d] >= bounds.hi[d])
      throw std::invalid_argument("cem_argmax: bounds must be finite with lo < hi");

  std::vector<double> mean(dims), stddev(dims);
  for (size_t d = 0; d < dims; ++d) {
    mean[d] = 0.5 * (bounds.lo[d] + bounds.hi[d]);
    stddev[d] = cfg.initial_stddev.empty() ? 0.3 * (bounds.hi[d] - bounds.lo[d])
                                           : cfg.initial_stddev[d];
    if (stddev[d] <= 0.0) throw std::invalid_argument("cem_argmax: stddev must be positive");
  }

  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  const int n_elite = cfg.elite_count();
  std::vector<std::vector<double>> samples(static_cast<size_t>(cfg.samples));
  std::vector<double> values(static_cast<size_t>(cfg.samples));
  std::vector<int> order(static_cast<size_t>(cfg.samples));

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < cfg.samples; ++i) {
      auto& x = samples[static_cast<size_t>(i)];
      x.resize(dims);
      for (size_t d = 0; d < dims; ++d)
        x[d] = std::clamp(rng.normal(mean[d], stddev[d]), bounds.lo[d], bounds.hi[d]);
      values[static_cast<size_t>(i)] = f(x);
      if (values[static_cast<size_t>(i)] > best_value) {
        best_value = values[static_cast<size_t>(i)];
        best = x;
      }
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[static_cast<size_t>(a)] >
                                                values[static_cast<size_t>(b)]; });
    for (size_t d = 0; d < dims; ++d) {
      double m = 0.0;
      for (int e = 0; e < n_elite; ++e) m += samples[static_cast<size_t>(order[e])][d];
      m /= n_elite;
      double var = 0.0;
      for (int e = 0; e < n_elite; ++e) {
        double diff = samples[static_cast<size_t>(order[e])][d] - m;
        var += diff * diff;
      }
      var /= n_elite;
      mean[d] = m;
      stddev[d] = std::sqrt(std::max(var, cfg.variance_floor));
    }
  }
  return best;
}

std::pair<Action, double> argmax_action(const QModel& model, NetSide side, const State& s,
                                        const Goal& g, const ActionSpace& space,
                                        const CemConfig& cem, Rng& rng) {
  if (space.kind == ActionKind::Discrete) {
    if (space.count < 1) throw std::invalid_argument("argmax_action: empty action space");
    const InputCodec& codec = model.codec();
    Eigen::MatrixXd X(space.count, codec.input_dim());
    for (int a = 0; a < space.count; ++a)
      codec.encode_row(s, g, Action::discrete(a), X, a);
    Eigen::VectorXd q = side == NetSide::Online ? model.q_batch(X) : model.q_target_batch(X);
    int best = 0;
    for (int a = 1; a < space.count; ++a)
      if (q(a) > q(best)) best = a;
    return {Action::discrete(best), q(best)};
  }
  auto f = [&](const std::vector<double>& v) {
    Action a = Action::continuous(v);
    return side == NetSide::Online ? model.q(s, g, a) : model.q_target(s, g, a);
  };
  std::vector<double> v = cem_argmax(f, space.bounds, cem, rng);
  double value = f(v);
  return {Action::continuous(std::move(v)), value};
}

namespace {

bool far_enough(const Action& cand, const Action& seen, const ActionBounds& bounds,
                double min_dist) {
  // Scaled max-norm: the candidate is kept when some dimension differs by at
  // least min_dist of that dimension's range.
  for (size_t d = 0; d < bounds.dims(); ++d) {
    double range = bounds.hi[d] - bounds.lo[d];
    if (std::fabs(cand.vec[d] - seen.vec[d]) >= min_dist * range) return true;
  }
  return false;
}

}  // namespace

std::optional<Action> try_sample_negative_action(const QModel& model, const State& s,
                                                 const Goal& g, const Action& seen,
                                                 const ActionSpace& space,
                                                 const NegSampleConfig& cfg, Rng& rng) {
  if (cfg.candidate_count < 2)
    throw std::invalid_argument("sample_negative_action: need at least 2 candidates");
  const InputCodec& codec = model.codec();

  if (space.kind == ActionKind::Discrete) {
    int s_cell = -1, g_cell = -1;
    if (cfg.evidence) {
      s_cell = cfg.evidence->spec.cell_of(s);
      g_cell = g.null_goal ? -1 : cfg.evidence->spec.cell_of(g.target);
    }
    std::vector<Action> cands;
    for (int a = 0; a < space.count; ++a) {
      if (a == seen.id) continue;
      if (cfg.evidence && g_cell >= 0 && cfg.evidence->vetoes(s_cell, a, g_cell)) continue;
      cands.push_back(Action::discrete(a));
    }
    if (cands.empty()) return std::nullopt;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(cands.size()), codec.input_dim());
    for (size_t i = 0; i < cands.size(); ++i)
      codec.encode_row(s, g, cands[i], X, static_cast<Eigen::Index>(i));
    Eigen::VectorXd q = model.q_batch(X);
    std::vector<double> qv(q.data(), q.data() + q.size());
    auto w = softmax_weights(qv, cfg.temperature);
    return cands[rng.categorical(w)];
  }

  for (int attempt = 0; attempt < 2; ++attempt) {
    const int n = cfg.candidate_count << attempt;
    std::vector<Action> cands;
    cands.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(space.bounds.dims());
      for (size_t d = 0; d < v.size(); ++d)
        v[d] = rng.uniform(space.bounds.lo[d], space.bounds.hi[d]);
      Action cand = Action::continuous(std::move(v));
      if (far_enough(cand, seen, space.bounds, cfg.min_action_distance))
        cands.push_back(std::move(cand));
    }
    if (cands.empty()) continue;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(cands.size()), codec.input_dim());
    for (size_t i = 0; i < cands.size(); ++i)
      codec.encode_row(s, g, cands[i], X, static_cast<Eigen::Index>(i));
    Eigen::VectorXd q = model.q_batch(X);
    std::vector<double> qv(q.data(), q.data() + q.size());
    auto w = softmax_weights(qv, cfg.temperature);
    return cands[rng.categorical(w)];
  }
  return std::nullopt;
}

Action sample_negative_action(const QModel& model, const State& s, const Goal& g,
                              const Action& seen, const ActionSpace& space,
                              const NegSampleConfig& cfg, Rng& rng) {
  auto a = try_sample_negative_action(model, s, g, seen, space, cfg, rng);
  if (!a)
    throw std::runtime_error(
        "sample_negative_action: every candidate was filtered out (distance or evidence)");
  return *a;
}

}  // namespace gcql
