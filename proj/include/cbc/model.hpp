#pragma once

// Core value types shared by the solver, the optimizer and the coordinator.

#include <bit>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cbc/catalog.hpp"

namespace cbc {

/// Simulated mission time. The coordinator never reads the wall clock for
/// decisions.
using SimTime = std::chrono::milliseconds;
using Priority = std::uint32_t;

/// A task's value: the inactive marker or one of its candidate behaviors.
class Value {
 public:
  constexpr Value() = default;

  static constexpr Value inactive() { return Value(); }
  static constexpr Value of(BehaviorIndex b) { return Value(static_cast<std::int32_t>(b)); }

  constexpr bool is_inactive() const { return raw_ < 0; }
  constexpr bool is_behavior() const { return raw_ >= 0; }
  constexpr BehaviorIndex behavior() const { return static_cast<BehaviorIndex>(raw_); }

  friend constexpr auto operator<=>(Value, Value) = default;

 private:
  constexpr explicit Value(std::int32_t raw) : raw_(raw) {}
  std::int32_t raw_ = -1;
};

/// One value per task.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t task_count) : values_(task_count) {}

  std::size_t size() const { return values_.size(); }
  Value& operator[](TaskIndex t) { return values_[t]; }
  Value operator[](TaskIndex t) const { return values_[t]; }
  bool running(TaskIndex t) const { return values_[t].is_behavior(); }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  /// Active behaviors in task order.
  std::vector<BehaviorIndex> active_behaviors() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Value> values_;
};

/// Renders "Task=Behavior" pairs (inactive tasks as "Task=-").
std::string describe(const Catalog& catalog, const Assignment& assignment);

/// Current valid domain of every task, stored as a bitmask per task: bit 0 is
/// the inactive value, bit k+1 the k-th candidate of the task.
class DomainTable {
 public:
  using Mask = std::uint64_t;

  DomainTable() = default;
  /// All domains empty.
  explicit DomainTable(const Catalog& catalog);

  /// Every domain = {inactive} plus all candidates.
  static DomainTable full(const Catalog& catalog);

  const Catalog& catalog() const { return *catalog_; }
  std::size_t task_count() const { return masks_.size(); }

  Mask mask(TaskIndex t) const { return masks_[t]; }
  void set_mask(TaskIndex t, Mask m) { masks_[t] = m; }

  Mask bit(Value v) const { return v.is_inactive() ? Mask{1} : Mask{1} << (catalog_->candidate_slot(v.behavior()) + 1); }
  Value value_at(TaskIndex t, unsigned slot) const {
    return slot == 0 ? Value::inactive() : Value::of(catalog_->candidates(t)[slot - 1]);
  }

  bool contains(TaskIndex t, Value v) const { return (masks_[t] & bit(v)) != 0; }
  bool contains_inactive(TaskIndex t) const { return (masks_[t] & 1u) != 0; }
  bool has_behavior(TaskIndex t) const { return (masks_[t] >> 1) != 0; }
  std::size_t size(TaskIndex t) const { return static_cast<std::size_t>(std::popcount(masks_[t])); }
  bool empty(TaskIndex t) const { return masks_[t] == 0; }
  bool singleton(TaskIndex t) const { return std::has_single_bit(masks_[t]); }

  /// Returns true when the value was present.
  bool remove(TaskIndex t, Value v);
  void insert(TaskIndex t, Value v) { masks_[t] |= bit(v); }
  void assign(TaskIndex t, Value v) { masks_[t] = bit(v); }
  void clear(TaskIndex t) { masks_[t] = 0; }

  /// Values in slot order (inactive first, then candidates in declaration
  /// order).
  std::vector<Value> values(TaskIndex t) const;
  /// The only value of a singleton domain.
  Value single_value(TaskIndex t) const;

  /// Product of the domain sizes (the search-space size), as a double since
  /// it overflows integers quickly.
  double product() const;

  friend bool operator==(const DomainTable& a, const DomainTable& b) { return a.masks_ == b.masks_; }

 private:
  const Catalog* catalog_ = nullptr;
  std::vector<Mask> masks_;
};

/// Key/value world model used to evaluate behavior situation conditions.
class SituationStore {
 public:
  struct Mutation {
    SimTime at;
    std::string key;
    std::string value;
  };

  SituationStore() = default;
  explicit SituationStore(std::map<std::string, std::string> initial) : values_(std::move(initial)) {}

  std::optional<std::string> get(std::string_view key) const;
  void set(std::string key, std::string value, SimTime at);

  /// True iff every condition matches the stored value. An empty list always
  /// holds; a missing key never matches.
  bool holds(const std::vector<SituationCondition>& conditions) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::vector<Mutation>& log() const { return log_; }

 private:
  std::map<std::string, std::string> values_;
  std::vector<Mutation> log_;
};

enum class TerminationCause {
  goal_achieved,
  time_out,
  wrong_progress,
  situation_change,
  process_failure,
  interrupted,
};

std::string_view to_string(TerminationCause cause);
/// Accepts the upper-case wire names (GOAL_ACHIEVED, ...), case-insensitive.
std::optional<TerminationCause> parse_termination_cause(std::string_view text);
bool is_failure(TerminationCause cause);

struct StartRequest {
  TaskIndex task;
  Priority priority = 0;
};

struct StopRequest {
  TaskIndex task;
};

struct BehaviorFinished {
  BehaviorIndex behavior;
  TerminationCause cause;
};

/// An event that triggers one coordination cycle.
using Trigger = std::variant<StartRequest, StopRequest, BehaviorFinished>;

/// Task whose domain the trigger initializes explicitly.
TaskIndex trigger_task(const Catalog& catalog, const Trigger& trigger);
std::string describe(const Catalog& catalog, const Trigger& trigger);

struct SolverConfig {
  std::size_t max_solutions = 10;
  std::chrono::microseconds max_search_time{50'000};
  std::uint64_t seed = 0;
  SimTime reactive_delay{500};
};

struct RequestRecord {
  TaskIndex task;
  Priority priority = 0;
  std::uint64_t sequence = 0;
  bool active = true;
  /// Issued by the reactive-start queue rather than by a client.
  bool reactive = false;
};

struct ReactiveEntry {
  TaskIndex task;
  SimTime due;

  friend bool operator==(const ReactiveEntry&, const ReactiveEntry&) = default;
};

struct CoordinatorState {
  Assignment current;
  std::vector<RequestRecord> requests;
  std::vector<ReactiveEntry> reactive_queue;
  SituationStore situation;
  SimTime clock{0};
  SolverConfig config;
  std::uint64_t next_sequence = 0;
  std::uint64_t solve_counter = 0;

  /// The live request record of a task, if any.
  const RequestRecord* live_request(TaskIndex t) const;
  RequestRecord* live_request(TaskIndex t);
  /// Highest live request priority (0 when there are none).
  Priority max_live_priority() const;
  std::size_t live_request_count() const;
};

/// Initial state: all tasks inactive, no requests.
CoordinatorState make_state(const Catalog& catalog, SolverConfig config = {}, SituationStore situation = {});

}  // namespace cbc
