#pragma once

// Single coordination step from a state snapshot, as used by `cbc solve`.

#include <optional>
#include <string>
#include <string_view>

#include "cbc/coordinator.hpp"

namespace cbc {

/// State snapshot YAML:
///   situation: {key: value, ...}
///   current: {Task: Behavior, ...}        # omitted tasks are inactive
///   requests: [{task: Task, priority: 2}]
/// Throws ParseError or UnknownNameError.
CoordinatorState parse_state(std::string_view yaml, const Catalog& catalog, const SolverConfig& config);

struct OneShotResult {
  ActivationDelta delta;
  Assignment assignment;
  std::optional<ObjectiveVector> objectives;
  bool oracle_checked = false;
  std::optional<std::string> oracle_mismatch;
};

/// Handles one trigger. With `oracle`, every solve of the step is compared
/// against enumerate_optimal (solves above the cap are skipped).
OneShotResult solve_once(const Catalog& catalog, CoordinatorState state, const Trigger& trigger, bool oracle);

/// Values per task, the objective vector and the delta, for display.
std::string render_one_shot(const Catalog& catalog, const OneShotResult& result);

}  // namespace cbc
