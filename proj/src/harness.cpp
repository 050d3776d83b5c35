#include "cbc/harness.hpp"

#include <algorithm>
#include <cmath>

#include "cbc/errors.hpp"
#include "yaml_util.hpp"

namespace cbc {

using namespace detail;

namespace {

SimTime read_seconds(const YAML::Node& node, std::string_view what) {
  const double s = read_number(node, what);
  if (!std::isfinite(s) || s < 0) fail_at(node, std::string(what) + " must be a non-negative number of seconds");
  return SimTime(std::llround(s * 1000.0));
}

TaskIndex resolve_task(const Catalog& catalog, const YAML::Node& node) {
  const std::string name = read_scalar(node, "task");
  if (auto t = catalog.find_task(name)) return *t;
  throw UnknownNameError("scenario references unknown task '" + name + "'");
}

ScenarioEvent read_event(const YAML::Node& node, const Catalog& catalog) {
  expect_map(node, "script entry");
  check_keys(node, {"at", "start_task", "stop_task", "behavior_finished", "set_situation"}, "script entry");
  ScenarioEvent ev;
  ev.at = read_seconds(require_field(node, "at", "script entry"), "at");
  if (node.size() != 2) fail_at(node, "script entry needs 'at' and exactly one event");

  if (const auto n = node["start_task"]) {
    expect_map(n, "start_task");
    check_keys(n, {"task", "priority"}, "start_task");
    StartTask s{resolve_task(catalog, require_field(n, "task", "start_task"))};
    if (n["priority"]) {
      const double p = read_number(n["priority"], "priority");
      if (p < 0 || p != std::floor(p) || p > 1e9) fail_at(n["priority"], "priority must be a non-negative integer");
      s.priority = static_cast<Priority>(p);
    }
    ev.kind = s;
  } else if (const auto n = node["stop_task"]) {
    expect_map(n, "stop_task");
    check_keys(n, {"task"}, "stop_task");
    ev.kind = StopTask{resolve_task(catalog, require_field(n, "task", "stop_task"))};
  } else if (const auto n = node["behavior_finished"]) {
    expect_map(n, "behavior_finished");
    check_keys(n, {"behavior", "cause"}, "behavior_finished");
    const std::string name = read_scalar(require_field(n, "behavior", "behavior_finished"), "behavior");
    const auto b = catalog.find_behavior(name);
    if (!b) throw UnknownNameError("scenario references unknown behavior '" + name + "'");
    const YAML::Node cause_node = require_field(n, "cause", "behavior_finished");
    const auto cause = parse_termination_cause(read_scalar(cause_node, "cause"));
    if (!cause) fail_at(cause_node, "unknown termination cause '" + cause_node.Scalar() + "'");
    ev.kind = FinishBehavior{*b, *cause};
  } else if (const auto n = node["set_situation"]) {
    expect_map(n, "set_situation");
    check_keys(n, {"key", "value"}, "set_situation");
    ev.kind = SetSituation{read_scalar(require_field(n, "key", "set_situation"), "key"),
                           read_scalar(require_field(n, "value", "set_situation"), "value")};
  }
  return ev;
}

}  // namespace

Scenario parse_scenario(std::string_view yaml, const Catalog& catalog) {
  const YAML::Node root = load_yaml(yaml);
  Scenario scenario;
  if (!root || root.IsNull()) return scenario;
  expect_map(root, "scenario");
  check_keys(root, {"initial_situation", "end_s", "script"}, "scenario");
  if (const auto init = root["initial_situation"]; init && !init.IsNull()) {
    expect_map(init, "initial_situation");
    for (const auto& kv : init) {
      scenario.initial_situation[read_scalar(kv.first, "situation key")] = read_scalar(kv.second, "situation value");
    }
  }
  if (const auto end = root["end_s"]) scenario.end_time = read_seconds(end, "end_s");
  if (const auto script = root["script"]; script && !script.IsNull()) {
    expect_seq(script, "script");
    for (const auto& item : script) scenario.script.push_back(read_event(item, catalog));
  }
  std::stable_sort(scenario.script.begin(), scenario.script.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at < b.at; });
  return scenario;
}

BehaviorHarness::BehaviorHarness(const Catalog& catalog, SituationStore& situation)
    : catalog_(&catalog), situation_(&situation) {
  managed_.reserve(catalog.behavior_count());
  for (BehaviorIndex b = 0; b < catalog.behavior_count(); ++b) {
    managed_.push_back({b, false, SimTime{0}, catalog.behavior(b).timeout});
  }
}

void BehaviorHarness::activate(BehaviorIndex b, SimTime now) {
  ManagedBehavior& m = managed_.at(b);
  if (m.active) throw HarnessError("behavior " + catalog_->behavior_name(b) + " is already active");
  if (!situation_->holds(catalog_->behavior(b).situation)) {
    throw HarnessError("behavior " + catalog_->behavior_name(b) + " cannot be activated in the current situation");
  }
  m.active = true;
  m.activation_time = now;
}

void BehaviorHarness::deactivate(BehaviorIndex b, SimTime now) {
  ManagedBehavior& m = managed_.at(b);
  if (!m.active) throw HarnessError("behavior " + catalog_->behavior_name(b) + " is not active");
  terminate(b, TerminationCause::interrupted, now);
}

void BehaviorHarness::terminate(BehaviorIndex b, TerminationCause cause, SimTime now) {
  managed_[b].active = false;
  terminations_.push_back({now, b, cause});
}

std::vector<BehaviorIndex> BehaviorHarness::active_behaviors() const {
  std::vector<BehaviorIndex> out;
  for (const auto& m : managed_) {
    if (m.active) out.push_back(m.behavior);
  }
  return out;
}

std::vector<Trigger> BehaviorHarness::poll_timeouts(SimTime now) {
  std::vector<Trigger> out;
  for (auto& m : managed_) {
    if (m.active && m.timeout && now - m.activation_time > *m.timeout) {
      terminate(m.behavior, TerminationCause::time_out, now);
      out.push_back(BehaviorFinished{m.behavior, TerminationCause::time_out});
    }
  }
  return out;
}

std::optional<SimTime> BehaviorHarness::next_timeout() const {
  std::optional<SimTime> best;
  for (const auto& m : managed_) {
    if (!m.active || !m.timeout) continue;
    const SimTime due = m.activation_time + *m.timeout + SimTime(1);
    if (!best || due < *best) best = due;
  }
  return best;
}

std::vector<Trigger> BehaviorHarness::apply_scenario_event(const ScenarioEvent& event, SimTime now) {
  std::vector<Trigger> out;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, StartTask>) {
          out.push_back(StartRequest{e.task, e.priority});
        } else if constexpr (std::is_same_v<E, StopTask>) {
          out.push_back(StopRequest{e.task});
        } else if constexpr (std::is_same_v<E, FinishBehavior>) {
          if (managed_.at(e.behavior).active) terminate(e.behavior, e.cause, now);
          out.push_back(BehaviorFinished{e.behavior, e.cause});
        } else {
          situation_->set(e.key, e.value, now);
          for (auto& m : managed_) {
            if (m.active && !situation_->holds(catalog_->behavior(m.behavior).situation)) {
              terminate(m.behavior, TerminationCause::situation_change, now);
              out.push_back(BehaviorFinished{m.behavior, TerminationCause::situation_change});
            }
          }
        }
      },
      event.kind);
  return out;
}

}  // namespace cbc
