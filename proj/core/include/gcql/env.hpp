#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcql/rng.hpp"
#include "gcql/types.hpp"

namespace gcql {

enum class EnvKind { LineWorld, FourRooms, PointMass };
enum class DataMode { Goal, Task, Coverage };

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

// Deterministic desk-scale MDP. Tabular kinds index cells row-major; the
// discrete action set is {up, down, left, right, stay} and blocked moves
// leave the agent in place. PointMass actions are bounded displacements
// clipped to the unit box.
struct EnvSpec {
  std::string id;
  EnvKind kind = EnvKind::LineWorld;
  int horizon = 10;
  double gamma = 0.9;
  ActionSpace actions;
  StateKind state_repr = StateKind::Tabular;

  // LineWorld
  int line_cells = 5;
  // FourRooms
  int width = 7, height = 7;
  std::vector<int> door_cells;
  // PointMass
  Rect bounds{0, 0, 1, 1};
  std::vector<Rect> obstacles;
  double step_scale = 0.2;

  static EnvSpec line_world(int n_cells, int horizon = 10, double gamma = 0.9);
  static EnvSpec four_rooms(int horizon = 40, double gamma = 0.9);
  static EnvSpec point_mass(int horizon = 30, double gamma = 0.9);
  // Parses "line-<n>", "four-rooms-7x7", "point-mass".
  static EnvSpec by_id(const std::string& id);

  bool tabular() const { return kind != EnvKind::PointMass; }
  int state_count() const;
  bool is_wall(int cell) const;
  std::vector<int> free_cells() const;
  int cell_at(int row, int col) const { return row * width + col; }

  // Converts between the canonical tabular index and the configured state
  // representation (Tabular index or GridImage one-hot occupancy).
  State make_state(int cell) const;
  int cell_of(const State& s) const;
};

struct TaskSpec {
  std::string env_id;
  std::vector<int> region_cells;  // tabular envs
  Rect region_rect;               // point-mass
  bool in_region(const EnvSpec& spec, const State& s) const;
};

// Built-in reward-driven tasks used for task-mode data generation.
std::vector<TaskSpec> default_tasks(const EnvSpec& spec);

// Start state from the documented initial distribution (LineWorld: fixed
// cell 0; FourRooms: uniform free cell; PointMass: uniform in bounds).
State env_reset(const EnvSpec& spec, uint64_t seed);

// Deterministic dynamics; walls and obstacles block (agent stays).
State env_step(const EnvSpec& spec, const State& s, const Action& a);

// With probability `competence` the shortest-path action toward g (tabular:
// BFS, ties broken by lowest action id; continuous: clipped straight line),
// otherwise a uniformly random action. Unreachable tabular goals fall back
// to a random action.
Action scripted_policy(const EnvSpec& spec, const State& s, const State& g, double competence,
                       Rng& rng);

struct MixComponent {
  double competence = 1.0;
  double fraction = 1.0;
};

Dataset generate_dataset(const EnvSpec& spec, const std::vector<MixComponent>& mix,
                         int n_episodes, uint64_t seed, DataMode mode = DataMode::Task,
                         const std::vector<TaskSpec>& tasks = {});

struct SplitRule {
  std::vector<int> waypoint_cells;  // cut at the first interior visit of any of these
};

// Cuts each matching trajectory in two at its waypoint (the cut state is
// shared as end of the first part and start of the second) and shuffles the
// result. Trajectories never visiting a waypoint pass through unchanged.
Dataset split_episodes(const Dataset& d, const EnvSpec& spec, const SplitRule& rule,
                       uint64_t seed);

double task_reward(const TaskSpec& task, const EnvSpec& spec, const State& s, const Action& a,
                   const State& next);

ActionSpace action_space(const EnvSpec& spec);
std::vector<Action> all_discrete_actions(const ActionSpace& space);

}  // namespace gcql
