#include "gcql/env.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "gcql/oracle.hpp"

namespace gcql {

namespace {
constexpr int kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4;
constexpr int kNumDiscreteActions = 5;
constexpr double kContinuousReachEps = 0.05;
}  // namespace

EnvSpec EnvSpec::line_world(int n_cells, int horizon, double gamma) {
  if (n_cells < 2) throw std::invalid_argument("line_world: need at least 2 cells");
  EnvSpec s;
  s.id = "line-" + std::to_string(n_cells);
  s.kind = EnvKind::LineWorld;
  s.line_cells = n_cells;
  s.width = n_cells;
  s.height = 1;
  s.horizon = horizon;
  s.gamma = gamma;
  s.actions = ActionSpace{ActionKind::Discrete, kNumDiscreteActions, {}};
  return s;
}

EnvSpec EnvSpec::four_rooms(int horizon, double gamma) {
  EnvSpec s;
  s.id = "four-rooms-7x7";
  s.kind = EnvKind::FourRooms;
  s.width = 7;
  s.height = 7;
  // Cross walls on row 3 and column 3 with one door per wall segment.
  s.door_cells = {s.cell_at(3, 1), s.cell_at(1, 3), s.cell_at(3, 5), s.cell_at(5, 3)};
  s.horizon = horizon;
  s.gamma = gamma;
  s.actions = ActionSpace{ActionKind::Discrete, kNumDiscreteActions, {}};
  return s;
}

EnvSpec EnvSpec::point_mass(int horizon, double gamma) {
  EnvSpec s;
  s.id = "point-mass";
  s.kind = EnvKind::PointMass;
  s.horizon = horizon;
  s.gamma = gamma;
  s.state_repr = StateKind::Continuous;
  s.step_scale = 0.2;
  s.obstacles = {{0.4, 0.35, 0.6, 0.65}};
  ActionBounds b;
  b.lo = {-s.step_scale, -s.step_scale};
  b.hi = {s.step_scale, s.step_scale};
  s.actions = ActionSpace{ActionKind::Continuous, 0, b};
  return s;
}

EnvSpec EnvSpec::by_id(const std::string& id) {
  if (id.rfind("line-", 0) == 0) {
    int n = std::stoi(id.substr(5));
    return line_world(n);
  }
  if (id == "four-rooms-7x7") return four_rooms();
  if (id == "point-mass") return point_mass();
  throw std::invalid_argument("unknown env id '" + id + "'");
}

int EnvSpec::state_count() const {
  switch (kind) {
    case EnvKind::LineWorld: return line_cells;
    case EnvKind::FourRooms: return width * height;
    case EnvKind::PointMass: return 0;
  }
  return 0;
}

bool EnvSpec::is_wall(int cell) const {
  if (kind != EnvKind::FourRooms) return false;
  int r = cell / width, c = cell % width;
  if (r != 3 && c != 3) return false;
  return std::find(door_cells.begin(), door_cells.end(), cell) == door_cells.end();
}

std::vector<int> EnvSpec::free_cells() const {
  std::vector<int> out;
  for (int c = 0; c < state_count(); ++c)
    if (!is_wall(c)) out.push_back(c);
  return out;
}

State EnvSpec::make_state(int cell) const {
  if (!tabular()) throw std::invalid_argument("make_state: not a tabular env");
  if (cell < 0 || cell >= state_count() || is_wall(cell))
    throw std::invalid_argument("make_state: invalid cell " + std::to_string(cell));
  if (state_repr == StateKind::GridImage) {
    std::vector<double> occ(static_cast<size_t>(state_count()), 0.0);
    occ[static_cast<size_t>(cell)] = 1.0;
    return State::grid_image(std::move(occ));
  }
  return State::tabular(cell);
}

int EnvSpec::cell_of(const State& s) const {
  if (s.kind == StateKind::Tabular) return s.index;
  if (s.kind == StateKind::GridImage) {
    for (size_t i = 0; i < s.vec.size(); ++i)
      if (s.vec[i] != 0.0) return static_cast<int>(i);
    throw std::invalid_argument("cell_of: empty occupancy grid");
  }
  throw std::invalid_argument("cell_of: continuous state has no cell");
}

bool TaskSpec::in_region(const EnvSpec& spec, const State& s) const {
  if (spec.tabular()) {
    int c = spec.cell_of(s);
    return std::find(region_cells.begin(), region_cells.end(), c) != region_cells.end();
  }
  return region_rect.contains(s.vec[0], s.vec[1]);
}

std::vector<TaskSpec> default_tasks(const EnvSpec& spec) {
  std::vector<TaskSpec> tasks;
  switch (spec.kind) {
    case EnvKind::LineWorld:
      tasks.push_back({spec.id, {spec.line_cells - 1}, {}});
      tasks.push_back({spec.id, {0}, {}});
      break;
    case EnvKind::FourRooms:
      // One target deep inside each room.
      tasks.push_back({spec.id, {spec.cell_at(1, 1)}, {}});
      tasks.push_back({spec.id, {spec.cell_at(1, 5)}, {}});
      tasks.push_back({spec.id, {spec.cell_at(5, 1)}, {}});
      tasks.push_back({spec.id, {spec.cell_at(5, 5)}, {}});
      break;
    case EnvKind::PointMass:
      tasks.push_back({spec.id, {}, {0.8, 0.8, 1.0, 1.0}});
      tasks.push_back({spec.id, {}, {0.0, 0.0, 0.2, 0.2}});
      break;
  }
  return tasks;
}

State env_reset(const EnvSpec& spec, uint64_t seed) {
  Rng rng = Rng::stream(seed, "env-reset");
  switch (spec.kind) {
    case EnvKind::LineWorld:
      return spec.make_state(0);
    case EnvKind::FourRooms: {
      auto free = spec.free_cells();
      return spec.make_state(free[rng.uniform_index(free.size())]);
    }
    case EnvKind::PointMass: {
      std::vector<double> p;
      do {
        p = {rng.uniform(spec.bounds.x0, spec.bounds.x1),
             rng.uniform(spec.bounds.y0, spec.bounds.y1)};
      } while (std::any_of(spec.obstacles.begin(), spec.obstacles.end(),
                           [&](const Rect& r) { return r.contains(p[0], p[1]); }));
      return State::continuous(std::move(p));
    }
  }
  throw std::logic_error("env_reset: unhandled env kind");
}

namespace {

int tabular_step_cell(const EnvSpec& spec, int cell, int action_id) {
  if (action_id < 0 || action_id >= kNumDiscreteActions)
    throw std::domain_error("env_step: invalid action id " + std::to_string(action_id));
  int r = cell / spec.width, c = cell % spec.width;
  int nr = r, nc = c;
  switch (action_id) {
    case kUp: nr = r - 1; break;
    case kDown: nr = r + 1; break;
    case kLeft: nc = c - 1; break;
    case kRight: nc = c + 1; break;
    case kStay: break;
    default: break;
  }
  if (nr < 0 || nr >= spec.height || nc < 0 || nc >= spec.width) return cell;
  int next = nr * spec.width + nc;
  if (spec.is_wall(next)) return cell;
  return next;
}

}  // namespace

State env_step(const EnvSpec& spec, const State& s, const Action& a) {
  if (spec.tabular()) {
    if (a.kind != ActionKind::Discrete)
      throw std::domain_error("env_step: tabular env expects a discrete action");
    return spec.make_state(tabular_step_cell(spec, spec.cell_of(s), a.id));
  }
  if (a.kind != ActionKind::Continuous || a.vec.size() != 2)
    throw std::domain_error("env_step: point-mass expects a 2-d continuous action");
  for (size_t d = 0; d < 2; ++d)
    if (a.vec[d] < spec.actions.bounds.lo[d] - 1e-12 ||
        a.vec[d] > spec.actions.bounds.hi[d] + 1e-12)
      throw std::domain_error("env_step: action component out of bounds");
  double x = std::clamp(s.vec[0] + a.vec[0], spec.bounds.x0, spec.bounds.x1);
  double y = std::clamp(s.vec[1] + a.vec[1], spec.bounds.y0, spec.bounds.y1);
  for (const Rect& r : spec.obstacles)
    if (r.contains(x, y)) return s;  // blocked
  return State::continuous({x, y});
}

ActionSpace action_space(const EnvSpec& spec) { return spec.actions; }

std::vector<Action> all_discrete_actions(const ActionSpace& space) {
  if (space.kind != ActionKind::Discrete)
    throw std::invalid_argument("all_discrete_actions: not a discrete space");
  std::vector<Action> out;
  out.reserve(static_cast<size_t>(space.count));
  for (int i = 0; i < space.count; ++i) out.push_back(Action::discrete(i));
  return out;
}

namespace {

Action random_action(const EnvSpec& spec, Rng& rng) {
  if (spec.actions.kind == ActionKind::Discrete)
    return Action::discrete(rng.uniform_int(spec.actions.count));
  std::vector<double> v(spec.actions.bounds.dims());
  for (size_t d = 0; d < v.size(); ++d)
    v[d] = rng.uniform(spec.actions.bounds.lo[d], spec.actions.bounds.hi[d]);
  return Action::continuous(std::move(v));
}

// Lowest-id action minimizing the BFS distance of the successor to g.
// Returns nullopt when g is unreachable.
std::optional<Action> canonical_action(const EnvSpec& spec, int cell, int goal_cell) {
  const GridTables& t = GridTables::of(spec);
  int best_a = -1;
  int best_d = -1;
  for (int a = 0; a < kNumDiscreteActions; ++a) {
    int d = t.distance(t.successor(cell, a), goal_cell);
    if (d < 0) return std::nullopt;
    if (best_a < 0 || d < best_d) {
      best_a = a;
      best_d = d;
    }
  }
  return Action::discrete(best_a);
}

}  // namespace

Action scripted_policy(const EnvSpec& spec, const State& s, const State& g, double competence,
                       Rng& rng) {
  if (competence < 0.0 || competence > 1.0)
    throw std::invalid_argument("scripted_policy: competence must lie in [0, 1]");
  const bool act_greedy = rng.uniform() < competence;
  if (!act_greedy) return random_action(spec, rng);
  if (spec.tabular()) {
    auto a = canonical_action(spec, spec.cell_of(s), spec.cell_of(g));
    if (!a) return random_action(spec, rng);  // unreachable goal
    return *a;
  }
  std::vector<double> v(2);
  for (size_t d = 0; d < 2; ++d)
    v[d] = std::clamp(g.vec[d] - s.vec[d], spec.actions.bounds.lo[d], spec.actions.bounds.hi[d]);
  return Action::continuous(std::move(v));
}

namespace {

State sample_free_state(const EnvSpec& spec, Rng& rng) {
  if (spec.tabular()) {
    auto free = spec.free_cells();
    return spec.make_state(free[rng.uniform_index(free.size())]);
  }
  std::vector<double> p;
  do {
    p = {rng.uniform(spec.bounds.x0, spec.bounds.x1),
         rng.uniform(spec.bounds.y0, spec.bounds.y1)};
  } while (std::any_of(spec.obstacles.begin(), spec.obstacles.end(),
                       [&](const Rect& r) { return r.contains(p[0], p[1]); }));
  return State::continuous(std::move(p));
}

}  // namespace

Dataset generate_dataset(const EnvSpec& spec, const std::vector<MixComponent>& mix,
                         int n_episodes, uint64_t seed, DataMode mode,
                         const std::vector<TaskSpec>& tasks_in) {
  if (n_episodes < 1) throw std::invalid_argument("generate_dataset: n_episodes must be >= 1");
  double total = 0.0;
  for (const auto& m : mix) total += m.fraction;
  if (mix.empty() || std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("generate_dataset: mix fractions must sum to 1");

  std::vector<TaskSpec> tasks = tasks_in.empty() ? default_tasks(spec) : tasks_in;
  Rng rng = Rng::stream(seed, "gen-data");

  // Coverage mode enumerates every (start, goal) pair with a fully competent
  // policy so every optimal (s, a, g) triple is demonstrated.
  std::vector<std::pair<State, State>> coverage_pairs;
  if (mode == DataMode::Coverage) {
    if (!spec.tabular())
      throw std::invalid_argument("generate_dataset: coverage mode is tabular-only");
    for (int s : spec.free_cells())
      for (int g : spec.free_cells())
        coverage_pairs.emplace_back(spec.make_state(s), spec.make_state(g));
    n_episodes = std::max(n_episodes, static_cast<int>(coverage_pairs.size()));
  }

  Dataset d;
  d.env_id = spec.id;
  d.trajectories.reserve(static_cast<size_t>(n_episodes));
  for (int e = 0; e < n_episodes; ++e) {
    double competence = 1.0;
    if (mode != DataMode::Coverage) {
      double u = rng.uniform(), acc = 0.0;
      for (const auto& m : mix) {
        acc += m.fraction;
        if (u < acc) {
          competence = m.competence;
          break;
        }
      }
    }
    State s;
    State goal;
    if (mode == DataMode::Coverage) {
      auto& pr = coverage_pairs[static_cast<size_t>(e) % coverage_pairs.size()];
      s = pr.first;
      goal = pr.second;
    } else {
      s = sample_free_state(spec, rng);
      goal = sample_free_state(spec, rng);
      if (mode == DataMode::Task) {
        const TaskSpec& task = tasks[rng.uniform_index(tasks.size())];
        if (spec.tabular()) {
          goal = spec.make_state(
              task.region_cells[rng.uniform_index(task.region_cells.size())]);
        } else {
          goal = State::continuous({rng.uniform(task.region_rect.x0, task.region_rect.x1),
                                    rng.uniform(task.region_rect.y0, task.region_rect.y1)});
        }
      }
    }

    Trajectory tau;
    tau.env_id = spec.id;
    tau.competence = competence;
    tau.states.push_back(s);
    for (int t = 0; t < spec.horizon; ++t) {
      Action a = scripted_policy(spec, tau.states.back(), goal, competence, rng);
      State next = env_step(spec, tau.states.back(), a);
      tau.actions.push_back(a);
      tau.states.push_back(next);
      if (goal_reached(next, Goal::of(goal), kContinuousReachEps)) break;
    }
    d.trajectories.push_back(std::move(tau));
  }
  return d;
}

Dataset split_episodes(const Dataset& d, const EnvSpec& spec, const SplitRule& rule,
                       uint64_t seed) {
  if (!spec.tabular())
    throw std::invalid_argument("split_episodes: waypoint rule needs a tabular env");
  Dataset out;
  out.env_id = d.env_id;
  out.schema_version = d.schema_version;
  size_t matched = 0;
  for (const auto& tau : d.trajectories) {
    int cut = -1;
    for (size_t i = 1; i + 1 < tau.states.size(); ++i) {
      int cell = spec.cell_of(tau.states[i]);
      if (std::find(rule.waypoint_cells.begin(), rule.waypoint_cells.end(), cell) !=
          rule.waypoint_cells.end()) {
        cut = static_cast<int>(i);
        break;
      }
    }
    if (cut < 0) {
      out.trajectories.push_back(tau);
      continue;
    }
    ++matched;
    Trajectory head, tail;
    head.env_id = tail.env_id = tau.env_id;
    head.competence = tail.competence = tau.competence;
    head.states.assign(tau.states.begin(), tau.states.begin() + cut + 1);
    head.actions.assign(tau.actions.begin(), tau.actions.begin() + cut);
    tail.states.assign(tau.states.begin() + cut, tau.states.end());
    tail.actions.assign(tau.actions.begin() + cut, tau.actions.end());
    out.trajectories.push_back(std::move(head));
    out.trajectories.push_back(std::move(tail));
  }
  if (matched == 0)
    std::cerr << "split_episodes: warning: waypoint rule matched no trajectory\n";
  Rng rng = Rng::stream(seed, "split-shuffle");
  for (size_t i = out.trajectories.size(); i > 1; --i)
    std::swap(out.trajectories[i - 1], out.trajectories[rng.uniform_index(i)]);
  return out;
}

double task_reward(const TaskSpec& task, const EnvSpec& spec, const State& /*s*/,
                   const Action& /*a*/, const State& next) {
  return task.in_region(spec, next) ? 1.0 : 0.0;
}

}  // namespace gcql
