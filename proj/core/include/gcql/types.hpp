#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gcql {

enum class StateKind : uint8_t { Tabular = 0, Continuous = 1, GridImage = 2 };

// A state in one of three representations: a cell index, a real coordinate
// vector, or a flattened 0/1 occupancy grid.
struct State {
  StateKind kind = StateKind::Tabular;
  int index = -1;            // Tabular
  std::vector<double> vec;   // Continuous coords or GridImage occupancy

  int dim() const { return kind == StateKind::Tabular ? 1 : static_cast<int>(vec.size()); }

  static State tabular(int cell) {
    State s;
    s.kind = StateKind::Tabular;
    s.index = cell;
    return s;
  }
  static State continuous(std::vector<double> coords) {
    State s;
    s.kind = StateKind::Continuous;
    s.vec = std::move(coords);
    return s;
  }
  static State grid_image(std::vector<double> occupancy) {
    State s;
    s.kind = StateKind::GridImage;
    s.vec = std::move(occupancy);
    return s;
  }

  bool operator==(const State&) const = default;
};

// Goal shares the state representation. The null goal is the all-zero
// encoding used when conditioning on a plain task reward instead of a goal.
struct Goal {
  State target;
  bool null_goal = false;

  static Goal of(State s) { return Goal{std::move(s), false}; }
  static Goal null(StateKind kind) {
    Goal g;
    g.target.kind = kind;
    g.target.index = -1;
    g.null_goal = true;
    return g;
  }

  bool operator==(const Goal&) const = default;
};

enum class ActionKind : uint8_t { Discrete = 0, Continuous = 1 };

struct Action {
  ActionKind kind = ActionKind::Discrete;
  int id = -1;               // Discrete
  std::vector<double> vec;   // Continuous

  static Action discrete(int id) {
    Action a;
    a.kind = ActionKind::Discrete;
    a.id = id;
    return a;
  }
  static Action continuous(std::vector<double> v) {
    Action a;
    a.kind = ActionKind::Continuous;
    a.vec = std::move(v);
    return a;
  }

  bool operator==(const Action&) const = default;
};

// Per-dimension [lo, hi] bounds for continuous actions.
struct ActionBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  size_t dims() const { return lo.size(); }
  bool operator==(const ActionBounds&) const = default;
};

struct ActionSpace {
  ActionKind kind = ActionKind::Discrete;
  int count = 0;        // Discrete
  ActionBounds bounds;  // Continuous

  bool operator==(const ActionSpace&) const = default;
};

struct Trajectory {
  std::vector<State> states;    // length T+1
  std::vector<Action> actions;  // length T
  std::string env_id;
  double competence = 0.0;      // source-policy competence in [0, 1]

  size_t num_transitions() const { return actions.size(); }
  bool operator==(const Trajectory&) const = default;
};

enum class LabelKind : uint8_t {
  PositiveTerminal = 0,
  Intermediate = 1,
  ChainTerminal = 2,
  NegativeAction = 3,
  TaskReward = 4,
};

// A transition tagged with a goal and a label describing how its training
// target is produced.
struct RelabeledExample {
  State state;
  Action action;
  State next_state;
  Goal goal;
  LabelKind label = LabelKind::Intermediate;
  bool terminal = false;
  // TaskReward: the env reward. ChainTerminal under value-at-extract mode:
  // the frozen bootstrap value. Unused otherwise.
  double reward = 0.0;
  bool has_stored_value = false;

  bool operator==(const RelabeledExample&) const = default;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  std::string env_id;
  int schema_version = 1;

  size_t num_transitions() const {
    size_t n = 0;
    for (const auto& t : trajectories) n += t.num_transitions();
    return n;
  }
  bool operator==(const Dataset&) const = default;
};

// True when s counts as having reached g. Tabular and grid states compare
// exactly; continuous states compare by max-norm distance against eps.
// A null goal is never reached. Mismatched representations are an error.
bool goal_reached(const State& s, const Goal& g, double eps);

const char* label_kind_name(LabelKind k);

}  // namespace gcql
