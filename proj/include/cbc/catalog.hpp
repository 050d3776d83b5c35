#pragma once

// Behavior catalog: tasks, the behaviors that can perform them, their
// suitabilities, and the compatibility / requirement / performance
// constraints between them.

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbc {

using TaskIndex = std::size_t;
using BehaviorIndex = std::size_t;

/// Largest number of candidate behaviors a single task may have; domains are
/// stored as 64-bit masks with slot 0 reserved for the inactive value.
inline constexpr std::size_t kMaxCandidatesPerTask = 63;

struct SituationCondition {
  std::string key;
  std::string value;

  friend bool operator==(const SituationCondition&, const SituationCondition&) = default;
};

struct RequirementSpec {
  std::string task;
  double min_performance = 0.0;

  friend bool operator==(const RequirementSpec&, const RequirementSpec&) = default;
};

struct TaskSpec {
  std::string name;
  bool start_on_request = false;
  bool reactive_start = false;
  std::optional<double> min_performance;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct BehaviorSpec {
  std::string name;
  std::string task;
  double suitability = 1.0;
  std::vector<RequirementSpec> requirements;
  std::optional<std::chrono::milliseconds> timeout;
  std::vector<SituationCondition> situation;

  friend bool operator==(const BehaviorSpec&, const BehaviorSpec&) = default;
};

/// Two tasks that may not run at the same time. Stored with task_a < task_b
/// (by name) once parsed.
struct CompatibilityConstraint {
  std::string task_a;
  std::string task_b;

  friend bool operator==(const CompatibilityConstraint&, const CompatibilityConstraint&) = default;
};

/// Catalog as written in the file, before indexing.
struct CatalogSpec {
  std::vector<TaskSpec> tasks;
  std::vector<BehaviorSpec> behaviors;
  std::vector<CompatibilityConstraint> incompatibilities;

  friend bool operator==(const CatalogSpec&, const CatalogSpec&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Parses catalog YAML into its raw form. Throws ParseError on syntax errors,
/// unknown fields and ill-typed values. Does not check references or ranges.
CatalogSpec parse_catalog_spec(std::string_view yaml);

/// Lists every invariant violation of a raw catalog. Empty iff the catalog can
/// be indexed.
ValidationReport validate_catalog(const CatalogSpec& spec);

/// Emits YAML that parse_catalog_spec reads back to an equal CatalogSpec.
std::string serialize_catalog(const CatalogSpec& spec);

/// Immutable, indexed catalog. Construction validates; all accessors are
/// const and safe for concurrent readers.
class Catalog {
 public:
  struct Requirement {
    TaskIndex task;
    double min_performance;
  };

  /// Throws CatalogError listing every violation.
  explicit Catalog(CatalogSpec spec);

  const CatalogSpec& spec() const { return spec_; }

  std::size_t task_count() const { return spec_.tasks.size(); }
  std::size_t behavior_count() const { return spec_.behaviors.size(); }

  const TaskSpec& task(TaskIndex t) const { return spec_.tasks[t]; }
  const BehaviorSpec& behavior(BehaviorIndex b) const { return spec_.behaviors[b]; }
  const std::string& task_name(TaskIndex t) const { return spec_.tasks[t].name; }
  const std::string& behavior_name(BehaviorIndex b) const { return spec_.behaviors[b].name; }

  std::optional<TaskIndex> find_task(std::string_view name) const;
  std::optional<BehaviorIndex> find_behavior(std::string_view name) const;
  /// Throw UnknownNameError when absent.
  TaskIndex task_index(std::string_view name) const;
  BehaviorIndex behavior_index(std::string_view name) const;

  TaskIndex task_of(BehaviorIndex b) const { return behavior_task_[b]; }
  double suitability(BehaviorIndex b) const { return spec_.behaviors[b].suitability; }
  /// Position of b among the candidates of its task.
  std::size_t candidate_slot(BehaviorIndex b) const { return candidate_slot_[b]; }

  /// Candidate behaviors of a task in declaration order (the domain minus the
  /// inactive value).
  std::span<const BehaviorIndex> candidates(TaskIndex t) const { return candidates_[t]; }
  std::span<const Requirement> requirements(BehaviorIndex b) const { return requirements_[b]; }

  /// Incompatibility pairs normalized to (lower index, higher index).
  std::span<const std::pair<TaskIndex, TaskIndex>> incompatibilities() const { return incompatible_pairs_; }
  std::span<const TaskIndex> incompatible_with(TaskIndex t) const { return incompatible_with_[t]; }

  /// Connected component id of a task in the static constraint graph.
  std::size_t component_of(TaskIndex t) const { return component_[t]; }
  std::size_t component_count() const { return component_count_; }

  /// Position in a topological order of the requirement graph in which every
  /// dependent task comes before the tasks it requires.
  std::size_t topo_rank(TaskIndex t) const { return topo_rank_[t]; }

 private:
  CatalogSpec spec_;
  std::vector<TaskIndex> behavior_task_;
  std::vector<std::size_t> candidate_slot_;
  std::vector<std::vector<BehaviorIndex>> candidates_;
  std::vector<std::vector<Requirement>> requirements_;
  std::vector<std::pair<TaskIndex, TaskIndex>> incompatible_pairs_;
  std::vector<std::vector<TaskIndex>> incompatible_with_;
  std::vector<std::size_t> component_;
  std::size_t component_count_ = 0;
  std::vector<std::size_t> topo_rank_;
};

/// parse_catalog_spec + validation + indexing. Throws ParseError or
/// CatalogError.
Catalog parse_catalog(std::string_view yaml);

/// Partition of the task names into connected groups of the static
/// constraint graph (incompatibility edges and task -> required task edges).
/// Groups are ordered by their first task; names inside a group follow
/// declaration order.
std::vector<std::vector<std::string>> connected_components(const Catalog& catalog);

}  // namespace cbc
