#include "gcql/types.hpp"

#include <cmath>
#include <stdexcept>

namespace gcql {

bool goal_reached(const State& s, const Goal& g, double eps) {
  if (eps < 0.0) throw std::invalid_argument("goal_reached: eps must be non-negative");
  if (g.null_goal) return false;
  const State& t = g.target;
  if (s.kind != t.kind)
    throw std::invalid_argument("goal_reached: state and goal have different representations");
  switch (s.kind) {
    case StateKind::Tabular:
      return s.index == t.index;
    case StateKind::GridImage:
      if (s.vec.size() != t.vec.size())
        throw std::invalid_argument("goal_reached: grid dimension mismatch");
      return s.vec == t.vec;
    case StateKind::Continuous: {
      if (s.vec.size() != t.vec.size())
        throw std::invalid_argument("goal_reached: coordinate dimension mismatch");
      double d = 0.0;
      for (size_t i = 0; i < s.vec.size(); ++i) d = std::max(d, std::fabs(s.vec[i] - t.vec[i]));
      return d <= eps;
    }
  }
  return false;
}

const char* label_kind_name(LabelKind k) {
  switch (k) {
    case LabelKind::PositiveTerminal: return "positive-terminal";
    case LabelKind::Intermediate: return "intermediate";
    case LabelKind::ChainTerminal: return "chain-terminal";
    case LabelKind::NegativeAction: return "negative-action";
    case LabelKind::TaskReward: return "task-reward";
  }
  return "unknown";
}

}  // namespace gcql
