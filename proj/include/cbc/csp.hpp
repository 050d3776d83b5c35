#pragma once

// Constraint-satisfaction core: domain initialization, GAC3 propagation,
// value ordering, deferred performance checks with no-goods, and the
// depth-first backtracking search.

#include <chrono>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cbc/catalog.hpp"
#include "cbc/model.hpp"

namespace cbc {

/// Absolute tolerance of every performance comparison (perf >= k - tol).
inline constexpr double kPerformanceTolerance = 1e-9;

using Rng = std::mt19937_64;
using Deadline = std::chrono::steady_clock::time_point;

/// S(x): candidates of a task whose situation conditions all hold.
std::vector<BehaviorIndex> situation_feasible_set(const Catalog& catalog, TaskIndex task,
                                                  const SituationStore& situation);

/// Builds the initial domains for one coordination cycle: trigger rules,
/// start-on-request pruning, grouping by connected component, and removal of
/// the inactive value from running tasks protected by their request priority.
///
/// Running tasks whose live request priority is strictly greater than the
/// threshold lose the inactive value. The threshold is the request priority
/// for a StartRequest and `priority_floor` otherwise.
DomainTable initialize_domains(const Catalog& catalog, const CoordinatorState& state, const Trigger& trigger,
                               Priority priority_floor);

struct Constraint {
  enum class Kind {
    incompatible,     // (first = none) or (second = none)
    requirement,      // (first = behavior) -> (second != none and perf(second) >= k)
    min_performance,  // first running -> perf(first) >= k
  };

  Kind kind;
  TaskIndex first;
  TaskIndex second;  // unused for min_performance
  BehaviorIndex behavior = 0;
  double threshold = 0.0;

  /// True when the constraint carries a performance bound that can only be
  /// checked exactly on a complete assignment.
  bool has_performance_bound() const { return threshold > 0.0; }
};

/// The catalog's constraints with per-task incidence lists.
class ConstraintSet {
 public:
  explicit ConstraintSet(const Catalog& catalog);

  const Catalog& catalog() const { return *catalog_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<std::size_t>& incident(TaskIndex t) const { return incident_[t]; }

 private:
  const Catalog* catalog_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Removes the values of `variable` that have no support under `constraint`.
/// Performance bounds are approximated by each task's own suitability, which
/// never underestimates the exact performance.
bool revise_arc(const Constraint& constraint, TaskIndex variable, DomainTable& table);

/// GAC3 to fixpoint. Returns false iff some domain becomes empty.
bool propagate(DomainTable& table, const ConstraintSet& constraints);
/// Same, seeded only with the arcs affected by a change of `changed`.
bool propagate_from(DomainTable& table, const ConstraintSet& constraints, TaskIndex changed);

/// Branching order for a task's domain. Ties between equally suitable
/// behaviors are broken with draws from `rng`.
std::vector<Value> order_values(TaskIndex task, const DomainTable& table, const CoordinatorState& state, Rng& rng);

/// R_i: tasks required directly or transitively by the behaviors chosen in
/// the assignment, starting from `task`. Excludes `task`, sorted ascending.
std::vector<TaskIndex> required_set(const Catalog& catalog, const Assignment& assignment, TaskIndex task);

/// Suitability of the task's behavior times the suitabilities of every task
/// in its required set; an inactive required task contributes 0. The task
/// must be running.
double task_performance(const Catalog& catalog, const Assignment& assignment, TaskIndex task);

/// Largest suitability among the behavior values of the domain; 0 when the
/// domain holds no behavior.
double performance_upper_bound(const DomainTable& table, TaskIndex task);

/// A forbidden partial assignment, literals sorted by task.
struct NoGood {
  std::vector<std::pair<TaskIndex, Value>> literals;

  friend bool operator==(const NoGood&, const NoGood&) = default;
};

/// No-good over the dependent task of a violated performance constraint and
/// its required set.
NoGood make_nogood(const Catalog& catalog, const Assignment& assignment, const Constraint& violated);
/// No-good forbidding exactly this complete assignment.
NoGood solution_nogood(const Assignment& assignment);

/// Partial no-goods are matched by linear subset scan; complete ones (one
/// literal per task) by hashing.
class NoGoodStore {
 public:
  explicit NoGoodStore(std::size_t task_count) : task_count_(task_count) {}

  /// Returns false when an identical no-good is already stored.
  bool add(NoGood nogood);
  std::size_t size() const { return partial_.size() + complete_.size(); }
  const std::vector<NoGood>& partial() const { return partial_; }

  /// True when the singleton domains of the table already match some partial
  /// no-good.
  bool excludes_partial(const DomainTable& table) const;
  bool excludes(const Assignment& assignment) const;

 private:
  struct Hash {
    std::size_t operator()(const std::vector<Value>& values) const;
  };

  std::size_t task_count_;
  std::vector<NoGood> partial_;
  std::unordered_set<std::vector<Value>, Hash> complete_;
};

/// Performance constraints violated by a complete assignment under the exact
/// performance equation.
std::vector<Constraint> performance_violations(const ConstraintSet& constraints, const Assignment& assignment);

struct SearchStats {
  std::size_t nodes = 0;
  std::size_t performance_nogoods = 0;
  bool timed_out = false;
};

/// Shared context for the searches of one solver invocation.
struct SearchContext {
  const ConstraintSet& constraints;
  const CoordinatorState& state;
  Rng& rng;
  Deadline deadline;
};

/// Depth-first backtracking with random variable choice, heuristic value
/// order, propagation after every branch and deferred performance checks.
/// Returns the first complete assignment that satisfies every constraint and
/// extends no stored no-good; nullopt when the space is exhausted or the
/// deadline passes (stats->timed_out tells which).
std::optional<Assignment> search(const DomainTable& table, SearchContext& context, NoGoodStore& nogoods,
                                 SearchStats* stats = nullptr);

/// Independent checker: every violated compatibility, requirement,
/// performance, situation and candidacy condition, as readable messages.
std::vector<std::string> check_assignment(const Assignment& assignment, const Catalog& catalog,
                                          const SituationStore& situation);

}  // namespace cbc
