#pragma once

// Scenario replay through the coordinator with a scripted harness, trace
// rendering and the oracle cross-check.

#include <optional>
#include <string>
#include <vector>

#include "cbc/coordinator.hpp"
#include "cbc/oracle.hpp"

namespace cbc {

struct TraceLine {
  SimTime time{0};
  std::string behavior;  // "-" for a request that could not be served
  std::string task;
  Priority priority = 0;
  bool activation = true;
  bool success = true;
  std::string cause;
  bool reactive = false;
};

std::vector<TraceLine> trace_lines(const Catalog& catalog, const ActivationDelta& delta);

/// Aligned columns: time, T, P, S, behavior, task, cause.
std::string render_text(const std::vector<TraceLine>& trace);
/// One JSON object per line with the same facts as render_text.
std::string render_jsonl(const std::vector<TraceLine>& trace);

/// Compares one solve against the oracle over the same domains. Returns a
/// description of the mismatch, or nullopt when consistent. A strictly better
/// oracle vector only counts when the solver exhausted its search space.
/// Throws LimitError when the domain product exceeds `cap`.
std::optional<std::string> oracle_mismatch(const Catalog& catalog, const SolveRecord& record,
                                           double cap = kDefaultOracleCap);

struct ReplayOptions {
  SolverConfig config;
  bool oracle = false;
  double oracle_cap = kDefaultOracleCap;
};

struct ReplaySummary {
  std::size_t activations = 0;
  std::size_t deactivations = 0;
  std::size_t failures = 0;
  std::size_t solves = 0;
  double t_mean_ms = 0.0;
  double t_min_ms = 0.0;
  double t_max_ms = 0.0;
  std::size_t oracle_checked = 0;
  std::size_t oracle_skipped = 0;
  std::vector<std::string> oracle_mismatches;
  /// Cycles after which the committed assignment failed check_assignment or
  /// the harness disagreed with it. Empty in a correct run.
  std::vector<std::string> consistency_violations;
};

struct ReplayResult {
  std::vector<ActivationDelta> deltas;
  std::vector<TraceLine> trace;
  ReplaySummary summary;
  Assignment final_assignment;
};

/// Replays the script from time 0 until scenario.end_time, or the last
/// scripted event plus the reactive delay.
ReplayResult replay_scenario(const Catalog& catalog, const Scenario& scenario, const ReplayOptions& options);

std::string render_summary(const ReplaySummary& summary);

}  // namespace cbc
