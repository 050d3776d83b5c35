#pragma once

// Scripted stand-in for the behavior execution managers: activation
// lifecycle, timeout monitor, and scenario scripts.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cbc/catalog.hpp"
#include "cbc/model.hpp"

namespace cbc {

struct ManagedBehavior {
  BehaviorIndex behavior;
  bool active = false;
  SimTime activation_time{0};
  std::optional<std::chrono::milliseconds> timeout;
};

/// A termination observed by the harness (scripted, timeout, situation change
/// or coordinator interruption).
struct TerminationRecord {
  SimTime at;
  BehaviorIndex behavior;
  TerminationCause cause;
};

struct StartTask {
  TaskIndex task;
  Priority priority = 0;
};
struct StopTask {
  TaskIndex task;
};
struct FinishBehavior {
  BehaviorIndex behavior;
  TerminationCause cause;
};
struct SetSituation {
  std::string key;
  std::string value;
};

struct ScenarioEvent {
  SimTime at{0};
  std::variant<StartTask, StopTask, FinishBehavior, SetSituation> kind;
};

struct Scenario {
  std::map<std::string, std::string> initial_situation;
  std::vector<ScenarioEvent> script;  // sorted by time, stable
  std::optional<SimTime> end_time;
};

/// Reads scenario YAML and resolves every name against the catalog. Throws
/// ParseError or UnknownNameError.
Scenario parse_scenario(std::string_view yaml, const Catalog& catalog);

class BehaviorHarness {
 public:
  /// The store is shared with the coordinator state and must outlive the
  /// harness.
  BehaviorHarness(const Catalog& catalog, SituationStore& situation);

  /// Throws HarnessError when already active or when the situation
  /// conditions fail.
  void activate(BehaviorIndex b, SimTime now);
  /// Coordinator-issued stop, logged as INTERRUPTED. Throws HarnessError when
  /// not active.
  void deactivate(BehaviorIndex b, SimTime now);

  bool is_active(BehaviorIndex b) const { return managed_[b].active; }
  const ManagedBehavior& managed(BehaviorIndex b) const { return managed_[b]; }
  std::vector<BehaviorIndex> active_behaviors() const;

  /// TIME_OUT for every active behavior whose elapsed time strictly exceeds
  /// its timeout; each such behavior becomes inactive.
  std::vector<Trigger> poll_timeouts(SimTime now);
  /// Earliest instant at which poll_timeouts would fire, if any.
  std::optional<SimTime> next_timeout() const;

  /// Applies one scripted event and returns the coordinator triggers it
  /// produces. set_situation also terminates, with SITUATION_CHANGE, every
  /// active behavior whose conditions stop holding.
  std::vector<Trigger> apply_scenario_event(const ScenarioEvent& event, SimTime now);

  const std::vector<TerminationRecord>& terminations() const { return terminations_; }
  const SituationStore& situation() const { return *situation_; }

 private:
  void terminate(BehaviorIndex b, TerminationCause cause, SimTime now);

  const Catalog* catalog_;
  SituationStore* situation_;
  std::vector<ManagedBehavior> managed_;
  std::vector<TerminationRecord> terminations_;
};

}  // namespace cbc
