#pragma once

// The executive loop: request bookkeeping, domain initialization with
// priority escalation, optimal solve, activation deltas and the delayed
// reactive-start queue.

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbc/csp.hpp"
#include "cbc/harness.hpp"
#include "cbc/optimizer.hpp"

namespace cbc {

struct DeltaEntry {
  BehaviorIndex behavior;
  Priority priority = 0;
  bool success = true;
  /// Set on deactivations: the termination cause, or INTERRUPTED when the
  /// coordinator stopped the behavior itself.
  std::optional<TerminationCause> cause;
};

struct RequestFailure {
  TaskIndex task;
  Priority priority;
};

struct ActivationDelta {
  SimTime at{0};
  std::string trigger;  // human-readable description of the event
  bool reactive = false;
  /// False when no consistent configuration existed for the event.
  bool solved = true;
  std::vector<DeltaEntry> deactivations;
  std::vector<DeltaEntry> activations;
  std::vector<RequestFailure> failed_requests;

  bool empty() const { return deactivations.empty() && activations.empty() && failed_requests.empty(); }
};

/// Deactivations ordered dependents first, activations ordered required tasks
/// first. `restarted` names a task whose behavior stopped on its own and is
/// chosen again: it gets both a deactivation and an activation.
ActivationDelta diff_assignments(const Catalog& catalog, const Assignment& from, const Assignment& to,
                                 std::optional<TaskIndex> restarted = std::nullopt);

/// T_i for every task: the reactive-start tasks incompatible with it.
std::vector<std::vector<TaskIndex>> reactive_incompatibility_sets(const Catalog& catalog);

/// Finished tasks enqueue their T_i members at now + delay (replacing older
/// entries), then started tasks remove theirs.
void update_reactive_queue(std::vector<ReactiveEntry>& queue, const std::vector<std::vector<TaskIndex>>& sets,
                           const std::vector<TaskIndex>& started, const std::vector<TaskIndex>& finished,
                           SimTime now, SimTime delay);

/// Everything a solve saw and produced, for oracle cross-checks.
struct SolveRecord {
  const DomainTable& table;
  const CoordinatorState& state;
  const SolverConfig& config;
  const std::optional<Solution>& solution;
  const SolveStats& stats;
  std::chrono::nanoseconds elapsed;
};

class Coordinator {
 public:
  using SolveObserver = std::function<void(const SolveRecord&)>;

  /// `state.current` must be consistent with the catalog. The catalog must
  /// outlive the coordinator.
  Coordinator(const Catalog& catalog, CoordinatorState state);

  const Catalog& catalog() const { return *catalog_; }
  const CoordinatorState& state() const { return state_; }
  CoordinatorState& state() { return state_; }
  const ConstraintSet& constraints() const { return constraints_; }

  /// Drives activate/deactivate calls on a harness sharing state().situation.
  void attach(BehaviorHarness* harness) { harness_ = harness; }
  void set_solve_observer(SolveObserver observer) { observer_ = std::move(observer); }

  /// Enqueues every reactive-start task at clock + delay.
  void bootstrap();

  /// One event, at the current clock.
  ActivationDelta handle_event(const Trigger& event);

  /// Polls timeouts on the attached harness, handles `events` in order, then
  /// starts the due reactive tasks.
  std::vector<ActivationDelta> run_cycle(const std::vector<Trigger>& events, SimTime now);

  /// Retries with priority floors 0, 1, ... up to the highest live priority
  /// and returns the first success with its floor.
  std::optional<std::pair<Solution, Priority>> solve_with_escalation(const Trigger& event);

  /// Objective vector of the last successful solve.
  const std::optional<ObjectiveVector>& last_objectives() const { return last_objectives_; }
  /// Wall-clock duration of every solve_optimal call, in order.
  const std::vector<std::chrono::nanoseconds>& solve_times() const { return solve_times_; }
  /// Earliest due time in the reactive queue, if any.
  std::optional<SimTime> next_reactive_due() const;

 private:
  std::optional<Solution> solve_at(const Trigger& event, Priority floor);
  ActivationDelta handle(const Trigger& event, bool reactive);
  ActivationDelta commit(const Trigger& event, const Assignment& next, Priority event_priority, bool solved);
  Assignment safety_fallback(TaskIndex failed) const;
  void apply_to_harness(const ActivationDelta& delta);

  const Catalog* catalog_;
  ConstraintSet constraints_;
  CoordinatorState state_;
  std::vector<std::vector<TaskIndex>> reactive_sets_;
  BehaviorHarness* harness_ = nullptr;
  SolveObserver observer_;
  std::optional<ObjectiveVector> last_objectives_;
  std::vector<std::chrono::nanoseconds> solve_times_;
  // live request priority per task when the current event arrived
  std::vector<std::optional<Priority>> prior_priority_;
};

}  // namespace cbc
