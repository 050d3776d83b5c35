#pragma once

// Lexicographic multi-objective selection over repeated searches.

#include <cstddef>
#include <optional>

#include "cbc/csp.hpp"

namespace cbc {

/// Compared lexicographically in member order.
struct ObjectiveVector {
  double f1 = 0.0;  // satisfied-request ratio
  double f2 = 0.0;  // suitability product of running behaviors
  double f3 = 0.0;  // inactive ratio over tasks without start_on_request
  double f4 = 0.0;  // 1 / (1 + changes)

  friend auto operator<=>(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// Behavior activations plus deactivations needed to go from `from` to `to`
/// (a behavior switch counts twice).
std::size_t change_count(const Assignment& from, const Assignment& to);

ObjectiveVector objective_vector(const Catalog& catalog, const Assignment& candidate, const CoordinatorState& state);

struct Solution {
  Assignment assignment;
  ObjectiveVector objectives;
};

struct SolveStats {
  std::size_t solutions = 0;
  std::size_t nodes = 0;
  std::size_t performance_nogoods = 0;
  bool exhausted = false;
  bool timed_out = false;
};

/// Repeats `search` up to config.max_solutions times, forbidding each
/// solution found, and keeps the best by objective vector (earliest wins exact
/// ties). The time budget covers all repeats.
std::optional<Solution> solve_optimal(const DomainTable& table, const ConstraintSet& constraints,
                                      const CoordinatorState& state, const SolverConfig& config,
                                      SolveStats* stats = nullptr);

}  // namespace cbc
