#include "cbc/oneshot.hpp"

#include <cmath>
#include <cstdio>

#include "cbc/errors.hpp"
#include "cbc/mission.hpp"
#include "yaml_util.hpp"

namespace cbc {

using namespace detail;

CoordinatorState parse_state(std::string_view yaml, const Catalog& catalog, const SolverConfig& config) {
  const YAML::Node root = load_yaml(yaml);
  CoordinatorState state = make_state(catalog, config);
  if (!root || root.IsNull()) return state;
  expect_map(root, "state");
  check_keys(root, {"situation", "current", "requests"}, "state");

  if (const auto n = root["situation"]; n && !n.IsNull()) {
    expect_map(n, "situation");
    std::map<std::string, std::string> values;
    for (const auto& kv : n) values[read_scalar(kv.first, "situation key")] = read_scalar(kv.second, "situation value");
    state.situation = SituationStore(std::move(values));
  }
  if (const auto n = root["current"]; n && !n.IsNull()) {
    expect_map(n, "current");
    for (const auto& kv : n) {
      const std::string task = read_scalar(kv.first, "task");
      const std::string behavior = read_scalar(kv.second, "behavior");
      const TaskIndex t = catalog.task_index(task);
      const BehaviorIndex b = catalog.behavior_index(behavior);
      if (catalog.task_of(b) != t) fail_at(kv.second, "behavior '" + behavior + "' does not perform task '" + task + "'");
      state.current[t] = Value::of(b);
    }
  }
  if (const auto n = root["requests"]; n && !n.IsNull()) {
    expect_seq(n, "requests");
    for (const auto& r : n) {
      expect_map(r, "request");
      check_keys(r, {"task", "priority"}, "request");
      const TaskIndex t = catalog.task_index(read_scalar(require_field(r, "task", "request"), "task"));
      Priority p = 0;
      if (r["priority"]) {
        const double v = read_number(r["priority"], "priority");
        if (v < 0 || v != std::floor(v) || v > 1e9) fail_at(r["priority"], "priority must be a non-negative integer");
        p = static_cast<Priority>(v);
      }
      if (RequestRecord* old = state.live_request(t)) old->active = false;
      state.requests.push_back({t, p, state.next_sequence++, true, false});
    }
  }
  return state;
}

OneShotResult solve_once(const Catalog& catalog, CoordinatorState state, const Trigger& trigger, bool oracle) {
  OneShotResult out;
  Coordinator coordinator(catalog, std::move(state));
  if (oracle) {
    coordinator.set_solve_observer([&](const SolveRecord& record) {
      if (record.table.product() > kDefaultOracleCap) return;
      out.oracle_checked = true;
      if (auto m = oracle_mismatch(catalog, record); m && !out.oracle_mismatch) out.oracle_mismatch = m;
    });
  }
  out.delta = coordinator.handle_event(trigger);
  out.assignment = coordinator.state().current;
  if (out.delta.solved) out.objectives = objective_vector(catalog, out.assignment, coordinator.state());
  if (out.delta.solved && coordinator.last_objectives()) {
    // the committed vector is measured against the pre-event state
    out.objectives = coordinator.last_objectives();
  }
  return out;
}

std::string render_one_shot(const Catalog& catalog, const OneShotResult& r) {
  std::string out;
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    out += catalog.task_name(t) + " = " +
           (r.assignment.running(t) ? catalog.behavior_name(r.assignment[t].behavior()) : std::string("-")) + "\n";
  }
  if (r.objectives) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "f = (%.6g, %.6g, %.6g, %.6g)\n", r.objectives->f1, r.objectives->f2,
                  r.objectives->f3, r.objectives->f4);
    out += buf;
  }
  for (const auto& line : trace_lines(catalog, r.delta)) {
    out += std::string(line.activation ? "+ " : "- ") + line.behavior + " (" + line.task + ")";
    if (!line.cause.empty()) out += " " + line.cause;
    out += "\n";
  }
  if (!r.delta.solved) out += "no consistent configuration\n";
  if (r.oracle_mismatch) out += "oracle mismatch: " + *r.oracle_mismatch + "\n";
  return out;
}

}  // namespace cbc
