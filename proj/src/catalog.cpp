#include "cbc/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include <yaml-cpp/yaml.h>

#include "cbc/errors.hpp"
#include "yaml_util.hpp"

namespace cbc {

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message
                     : message),
      line_(line),
      column_(column) {}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

CatalogError::CatalogError(std::vector<std::string> violations)
    : Error("invalid catalog: " + join(violations, "; ")), violations_(std::move(violations)) {}

using namespace detail;

namespace {

TaskSpec read_task(const YAML::Node& node) {
  expect_map(node, "task entry");
  check_keys(node, {"name", "start_on_request", "reactive_start", "min_performance"}, "task");
  TaskSpec task;
  task.name = read_scalar(require_field(node, "name", "task"), "task name");
  if (node["start_on_request"]) task.start_on_request = read_bool(node["start_on_request"], "start_on_request");
  if (node["reactive_start"]) task.reactive_start = read_bool(node["reactive_start"], "reactive_start");
  if (node["min_performance"]) task.min_performance = read_number(node["min_performance"], "min_performance");
  return task;
}

BehaviorSpec read_behavior(const YAML::Node& node) {
  expect_map(node, "behavior entry");
  check_keys(node, {"name", "task", "suitability", "timeout_s", "situation", "requires"}, "behavior");
  BehaviorSpec behavior;
  behavior.name = read_scalar(require_field(node, "name", "behavior"), "behavior name");
  behavior.task = read_scalar(require_field(node, "task", "behavior"), "behavior task");
  behavior.suitability = read_number(require_field(node, "suitability", "behavior"), "suitability");
  if (const auto timeout = node["timeout_s"]) {
    const double seconds = read_number(timeout, "timeout_s");
    if (!std::isfinite(seconds)) fail_at(timeout, "timeout_s must be finite");
    behavior.timeout = std::chrono::milliseconds(std::llround(seconds * 1000.0));
  }
  if (const auto situation = node["situation"]; situation && !situation.IsNull()) {
    expect_seq(situation, "situation");
    for (const auto& cond : situation) {
      expect_map(cond, "situation condition");
      check_keys(cond, {"key", "value"}, "situation condition");
      behavior.situation.push_back({read_scalar(require_field(cond, "key", "situation condition"), "key"),
                                    read_scalar(require_field(cond, "value", "situation condition"), "value")});
    }
  }
  if (const auto reqs = node["requires"]; reqs && !reqs.IsNull()) {
    expect_seq(reqs, "requires");
    for (const auto& req : reqs) {
      expect_map(req, "requirement");
      check_keys(req, {"task", "min_performance"}, "requirement");
      RequirementSpec r;
      r.task = read_scalar(require_field(req, "task", "requirement"), "requirement task");
      if (req["min_performance"]) r.min_performance = read_number(req["min_performance"], "min_performance");
      behavior.requirements.push_back(std::move(r));
    }
  }
  return behavior;
}

}  // namespace

CatalogSpec parse_catalog_spec(std::string_view yaml) {
  const YAML::Node root = load_yaml(yaml);
  CatalogSpec spec;
  if (root.IsNull()) return spec;
  expect_map(root, "catalog");
  check_keys(root, {"tasks", "behaviors", "constraints"}, "catalog");

  if (const auto tasks = root["tasks"]; tasks && !tasks.IsNull()) {
    expect_seq(tasks, "tasks");
    for (const auto& t : tasks) spec.tasks.push_back(read_task(t));
  }
  if (const auto behaviors = root["behaviors"]; behaviors && !behaviors.IsNull()) {
    expect_seq(behaviors, "behaviors");
    for (const auto& b : behaviors) spec.behaviors.push_back(read_behavior(b));
  }
  if (const auto constraints = root["constraints"]; constraints && !constraints.IsNull()) {
    expect_map(constraints, "constraints");
    check_keys(constraints, {"incompatible"}, "constraints");
    if (const auto incompatible = constraints["incompatible"]; incompatible && !incompatible.IsNull()) {
      expect_seq(incompatible, "incompatible");
      for (const auto& pair : incompatible) {
        if (!pair.IsSequence() || pair.size() != 2) fail_at(pair, "incompatible entry must be a pair of task names");
        std::string a = read_scalar(pair[0], "task name");
        std::string b = read_scalar(pair[1], "task name");
        if (b < a) std::swap(a, b);
        spec.incompatibilities.push_back({std::move(a), std::move(b)});
      }
    }
  }
  return spec;
}

std::string serialize_catalog(const CatalogSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "tasks" << YAML::Value << YAML::BeginSeq;
  for (const auto& task : spec.tasks) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << task.name;
    if (task.start_on_request) out << YAML::Key << "start_on_request" << YAML::Value << true;
    if (task.reactive_start) out << YAML::Key << "reactive_start" << YAML::Value << true;
    if (task.min_performance) {
      out << YAML::Key << "min_performance" << YAML::Value << format_number(*task.min_performance);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "behaviors" << YAML::Value << YAML::BeginSeq;
  for (const auto& behavior : spec.behaviors) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << behavior.name;
    out << YAML::Key << "task" << YAML::Value << behavior.task;
    out << YAML::Key << "suitability" << YAML::Value << format_number(behavior.suitability);
    if (behavior.timeout) {
      const auto ms = behavior.timeout->count();
      out << YAML::Key << "timeout_s" << YAML::Value
          << (ms % 1000 == 0 ? std::to_string(ms / 1000) : format_number(static_cast<double>(ms) / 1000.0));
    }
    if (!behavior.situation.empty()) {
      out << YAML::Key << "situation" << YAML::Value << YAML::BeginSeq;
      for (const auto& cond : behavior.situation) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "key" << YAML::Value << cond.key << YAML::Key << "value"
            << YAML::Value << cond.value << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    if (!behavior.requirements.empty()) {
      out << YAML::Key << "requires" << YAML::Value << YAML::BeginSeq;
      for (const auto& req : behavior.requirements) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "task" << YAML::Value << req.task << YAML::Key
            << "min_performance" << YAML::Value << format_number(req.min_performance) << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "constraints" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "incompatible" << YAML::Value << YAML::BeginSeq;
  for (const auto& pair : spec.incompatibilities) {
    out << YAML::Flow << YAML::BeginSeq << pair.task_a << pair.task_b << YAML::EndSeq;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

// Returns one cycle (as a name path) in the static requirement graph, or an
// empty vector when the graph is acyclic.
std::vector<std::string> find_requirement_cycle(const std::map<std::string, std::set<std::string>>& edges) {
  enum class Mark { white, grey, black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> path;
  std::vector<std::string> cycle;

  std::function<bool(const std::string&)> visit = [&](const std::string& node) {
    mark[node] = Mark::grey;
    path.push_back(node);
    if (auto it = edges.find(node); it != edges.end()) {
      for (const auto& next : it->second) {
        const Mark m = mark[next];
        if (m == Mark::grey) {
          auto start = std::find(path.begin(), path.end(), next);
          cycle.assign(start, path.end());
          cycle.push_back(next);
          return true;
        }
        if (m == Mark::white && visit(next)) return true;
      }
    }
    path.pop_back();
    mark[node] = Mark::black;
    return false;
  };

  for (const auto& [node, _] : edges) {
    if (mark[node] == Mark::white && visit(node)) return cycle;
  }
  return {};
}

}  // namespace

ValidationReport validate_catalog(const CatalogSpec& spec) {
  ValidationReport report;
  auto violation = [&](std::string message) { report.violations.push_back(std::move(message)); };

  std::set<std::string> task_names;
  for (const auto& task : spec.tasks) {
    if (task.name.empty()) violation("task with empty name");
    if (!task_names.insert(task.name).second) violation("duplicate task name '" + task.name + "'");
    if (task.start_on_request && task.reactive_start) {
      violation("task '" + task.name + "': start_on_request and reactive_start cannot both be true");
    }
    if (task.min_performance && !in_unit_interval(*task.min_performance)) {
      violation("task '" + task.name + "': min_performance " + format_number(*task.min_performance) +
                " out of range [0,1]");
    }
  }

  std::set<std::string> behavior_names;
  std::map<std::string, std::size_t> candidate_count;
  std::map<std::string, std::set<std::string>> requirement_edges;
  for (const auto& behavior : spec.behaviors) {
    const std::string who = "behavior '" + behavior.name + "'";
    if (behavior.name.empty()) violation("behavior with empty name");
    if (!behavior_names.insert(behavior.name).second) violation("duplicate behavior name '" + behavior.name + "'");
    const bool task_known = task_names.count(behavior.task) > 0;
    if (!task_known) {
      violation(who + ": unknown task '" + behavior.task + "'");
    } else {
      ++candidate_count[behavior.task];
    }
    if (!in_unit_interval(behavior.suitability)) {
      violation(who + ": suitability " + format_number(behavior.suitability) + " out of range [0,1]");
    }
    if (behavior.timeout && behavior.timeout->count() <= 0) violation(who + ": timeout_s must be positive");
    for (const auto& cond : behavior.situation) {
      if (cond.key.empty()) violation(who + ": situation condition with empty key");
    }
    for (const auto& req : behavior.requirements) {
      if (!task_names.count(req.task)) {
        violation(who + ": requires unknown task '" + req.task + "'");
        continue;
      }
      if (req.task == behavior.task) violation(who + ": requires its own task '" + req.task + "'");
      if (!in_unit_interval(req.min_performance)) {
        violation(who + ": required min_performance " + format_number(req.min_performance) + " out of range [0,1]");
      }
      if (task_known && req.task != behavior.task) requirement_edges[behavior.task].insert(req.task);
    }
  }

  for (const auto& [task, count] : candidate_count) {
    if (count > kMaxCandidatesPerTask) {
      violation("task '" + task + "': more than " + std::to_string(kMaxCandidatesPerTask) + " candidate behaviors");
    }
  }

  for (const auto& pair : spec.incompatibilities) {
    for (const auto* name : {&pair.task_a, &pair.task_b}) {
      if (!task_names.count(*name)) violation("incompatibility references unknown task '" + *name + "'");
    }
    if (pair.task_a == pair.task_b) violation("task '" + pair.task_a + "' declared incompatible with itself");
  }

  if (auto cycle = find_requirement_cycle(requirement_edges); !cycle.empty()) {
    violation("requirement cycle: " + join(cycle, " -> "));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Indexed catalog

Catalog::Catalog(CatalogSpec spec) : spec_(std::move(spec)) {
  if (auto report = validate_catalog(spec_); !report.ok()) throw CatalogError(std::move(report.violations));

  const std::size_t n = spec_.tasks.size();
  const std::size_t m = spec_.behaviors.size();

  std::unordered_map<std::string, TaskIndex> task_lookup;
  for (TaskIndex t = 0; t < n; ++t) task_lookup.emplace(spec_.tasks[t].name, t);

  behavior_task_.resize(m);
  candidate_slot_.resize(m);
  candidates_.assign(n, {});
  requirements_.assign(m, {});
  for (BehaviorIndex b = 0; b < m; ++b) {
    const TaskIndex t = task_lookup.at(spec_.behaviors[b].task);
    behavior_task_[b] = t;
    candidate_slot_[b] = candidates_[t].size();
    candidates_[t].push_back(b);
    for (const auto& req : spec_.behaviors[b].requirements) {
      requirements_[b].push_back({task_lookup.at(req.task), req.min_performance});
    }
  }

  incompatible_with_.assign(n, {});
  for (const auto& pair : spec_.incompatibilities) {
    TaskIndex a = task_lookup.at(pair.task_a);
    TaskIndex b = task_lookup.at(pair.task_b);
    if (b < a) std::swap(a, b);
    if (std::find(incompatible_pairs_.begin(), incompatible_pairs_.end(), std::pair{a, b}) != incompatible_pairs_.end()) {
      continue;
    }
    incompatible_pairs_.emplace_back(a, b);
    incompatible_with_[a].push_back(b);
    incompatible_with_[b].push_back(a);
  }

  // Connected components by union-find over both edge kinds.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = root(a);
    b = root(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const auto& [a, b] : incompatible_pairs_) unite(a, b);
  for (BehaviorIndex b = 0; b < m; ++b) {
    for (const auto& req : requirements_[b]) unite(behavior_task_[b], req.task);
  }
  component_.resize(n);
  std::map<std::size_t, std::size_t> component_ids;
  for (TaskIndex t = 0; t < n; ++t) {
    const auto [it, inserted] = component_ids.emplace(root(t), component_ids.size());
    component_[t] = it->second;
  }
  component_count_ = component_ids.size();

  // Kahn's algorithm, dependents first, lowest index first among ready tasks.
  std::vector<std::set<TaskIndex>> required_by_task(n);
  std::vector<std::size_t> dependents(n, 0);
  for (BehaviorIndex b = 0; b < m; ++b) {
    for (const auto& req : requirements_[b]) {
      if (required_by_task[behavior_task_[b]].insert(req.task).second) ++dependents[req.task];
    }
  }
  std::priority_queue<TaskIndex, std::vector<TaskIndex>, std::greater<>> ready;
  for (TaskIndex t = 0; t < n; ++t) {
    if (dependents[t] == 0) ready.push(t);
  }
  topo_rank_.assign(n, 0);
  std::size_t rank = 0;
  while (!ready.empty()) {
    const TaskIndex t = ready.top();
    ready.pop();
    topo_rank_[t] = rank++;
    for (TaskIndex next : required_by_task[t]) {
      if (--dependents[next] == 0) ready.push(next);
    }
  }
}

std::optional<TaskIndex> Catalog::find_task(std::string_view name) const {
  for (TaskIndex t = 0; t < spec_.tasks.size(); ++t) {
    if (spec_.tasks[t].name == name) return t;
  }
  return std::nullopt;
}

std::optional<BehaviorIndex> Catalog::find_behavior(std::string_view name) const {
  for (BehaviorIndex b = 0; b < spec_.behaviors.size(); ++b) {
    if (spec_.behaviors[b].name == name) return b;
  }
  return std::nullopt;
}

TaskIndex Catalog::task_index(std::string_view name) const {
  if (auto t = find_task(name)) return *t;
  throw UnknownNameError("unknown task '" + std::string(name) + "'");
}

BehaviorIndex Catalog::behavior_index(std::string_view name) const {
  if (auto b = find_behavior(name)) return *b;
  throw UnknownNameError("unknown behavior '" + std::string(name) + "'");
}

Catalog parse_catalog(std::string_view yaml) { return Catalog(parse_catalog_spec(yaml)); }

std::vector<std::vector<std::string>> connected_components(const Catalog& catalog) {
  std::vector<std::vector<std::string>> groups(catalog.component_count());
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    groups[catalog.component_of(t)].push_back(catalog.task_name(t));
  }
  return groups;
}

}  // namespace cbc
