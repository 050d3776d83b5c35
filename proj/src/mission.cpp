#include "cbc/mission.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cbc/errors.hpp"

namespace cbc {

std::vector<TraceLine> trace_lines(const Catalog& catalog, const ActivationDelta& delta) {
  std::vector<TraceLine> out;
  auto line = [&](BehaviorIndex b, const DeltaEntry& e, bool on) {
    TraceLine l;
    l.time = delta.at;
    l.behavior = catalog.behavior_name(b);
    l.task = catalog.task_name(catalog.task_of(b));
    l.priority = e.priority;
    l.activation = on;
    l.success = e.success;
    l.cause = e.cause ? std::string(to_string(*e.cause)) : "";
    l.reactive = delta.reactive;
    return l;
  };
  for (const auto& e : delta.deactivations) out.push_back(line(e.behavior, e, false));
  for (const auto& e : delta.activations) out.push_back(line(e.behavior, e, true));
  for (const auto& f : delta.failed_requests) {
    TraceLine l;
    l.time = delta.at;
    l.behavior = "-";
    l.task = catalog.task_name(f.task);
    l.priority = f.priority;
    l.success = false;
    l.cause = delta.solved ? "REQUEST_DROPPED" : "NO_SOLUTION";
    l.reactive = delta.reactive;
    out.push_back(std::move(l));
  }
  return out;
}

namespace {

std::string seconds(SimTime t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(t.count()) / 1000.0);
  return buf;
}

}  // namespace

std::string render_text(const std::vector<TraceLine>& trace) {
  std::size_t wt = 4, wb = 8, wk = 4;
  for (const auto& l : trace) {
    wt = std::max(wt, seconds(l.time).size());
    wb = std::max(wb, l.behavior.size());
    wk = std::max(wk, l.task.size());
  }
  auto pad = [](std::string s, std::size_t w, bool right = false) {
    if (s.size() < w) s = right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
    return s;
  };
  std::ostringstream out;
  auto row = [&](const std::string& t, const std::string& tt, const std::string& p, const std::string& s,
                 const std::string& b, const std::string& k, const std::string& c) {
    std::string r = pad(t, wt, true) + "  " + tt + "  " + pad(p, 3, true) + "  " + s + "  " + pad(b, wb) + "  " +
                    (c.empty() ? k : pad(k, wk) + "  " + c);
    while (!r.empty() && r.back() == ' ') r.pop_back();
    out << r << '\n';
  };
  row("time", "T", "P", "S", "behavior", "task", "cause");
  for (const auto& l : trace) {
    row(seconds(l.time), l.activation ? "+" : "-", std::to_string(l.priority), l.success ? "Y" : "N", l.behavior,
        l.task, l.cause);
  }
  return out.str();
}

std::string render_jsonl(const std::vector<TraceLine>& trace) {
  std::string out;
  for (const auto& l : trace) {
    nlohmann::ordered_json j;
    j["time_ms"] = l.time.count();
    j["behavior"] = l.behavior;
    j["task"] = l.task;
    j["P"] = l.priority;
    j["T"] = l.activation ? "+" : "-";
    j["S"] = l.success ? "Y" : "N";
    j["cause"] = l.cause;
    j["reactive"] = l.reactive;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::optional<std::string> oracle_mismatch(const Catalog& catalog, const SolveRecord& record, double cap) {
  const OracleResult oracle = enumerate_optimal(record.table, record.state, cap);
  const auto& sol = record.solution;
  if (!sol) {
    if (record.stats.exhausted && oracle.valid_count > 0) {
      return "solver found no configuration, oracle found " + std::to_string(oracle.valid_count);
    }
    return std::nullopt;
  }
  const auto violations = check_assignment(sol->assignment, catalog, record.state.situation);
  if (!violations.empty()) return "solver configuration is invalid: " + violations.front();
  if (!oracle.best_vector) return "solver returned a configuration the oracle rejects";
  if (sol->objectives > *oracle.best_vector) return "solver objective exceeds the oracle maximum";
  if (record.stats.exhausted && sol->objectives != *oracle.best_vector) {
    return "solver exhausted the space but missed the oracle optimum (" + describe(catalog, *oracle.best) + ")";
  }
  return std::nullopt;
}

ReplayResult replay_scenario(const Catalog& catalog, const Scenario& scenario, const ReplayOptions& options) {
  if (options.config.reactive_delay <= SimTime(0)) throw Error("reactive delay must be positive");
  ReplayResult result;
  ReplaySummary& summary = result.summary;

  Coordinator coordinator(catalog, make_state(catalog, options.config, SituationStore(scenario.initial_situation)));
  BehaviorHarness harness(catalog, coordinator.state().situation);
  coordinator.attach(&harness);
  if (options.oracle) {
    coordinator.set_solve_observer([&](const SolveRecord& record) {
      if (record.table.product() > options.oracle_cap) {
        ++summary.oracle_skipped;
        return;
      }
      ++summary.oracle_checked;
      if (auto m = oracle_mismatch(catalog, record, options.oracle_cap)) {
        summary.oracle_mismatches.push_back("t=" + std::to_string(record.state.clock.count()) + "ms: " + *m);
      }
    });
  }
  coordinator.bootstrap();

  const SimTime end = scenario.end_time.value_or(
      (scenario.script.empty() ? SimTime(0) : scenario.script.back().at) + options.config.reactive_delay);

  std::size_t next = 0;
  while (true) {
    std::optional<SimTime> now;
    auto consider = [&](std::optional<SimTime> t) {
      if (t && (!now || *t < *now)) now = t;
    };
    if (next < scenario.script.size()) consider(scenario.script[next].at);
    consider(coordinator.next_reactive_due());
    consider(harness.next_timeout());
    if (!now || *now > end) break;

    std::vector<Trigger> triggers;
    for (; next < scenario.script.size() && scenario.script[next].at == *now; ++next) {
      auto produced = harness.apply_scenario_event(scenario.script[next], *now);
      triggers.insert(triggers.end(), produced.begin(), produced.end());
    }
    for (auto& delta : coordinator.run_cycle(triggers, *now)) {
      for (auto& line : trace_lines(catalog, delta)) result.trace.push_back(std::move(line));
      summary.activations += delta.activations.size();
      summary.deactivations += delta.deactivations.size();
      summary.failures += delta.failed_requests.size();
      result.deltas.push_back(std::move(delta));
    }

    const Assignment& current = coordinator.state().current;
    for (const auto& v : check_assignment(current, catalog, coordinator.state().situation)) {
      summary.consistency_violations.push_back("t=" + std::to_string(now->count()) + "ms: " + v);
    }
    auto expected = current.active_behaviors();
    auto actual = harness.active_behaviors();
    std::sort(expected.begin(), expected.end());
    if (expected != actual) {
      summary.consistency_violations.push_back("t=" + std::to_string(now->count()) +
                                               "ms: harness active set differs from the committed assignment");
    }
  }

  const auto& times = coordinator.solve_times();
  summary.solves = times.size();
  if (!times.empty()) {
    double total = 0, lo = 1e300, hi = 0;
    for (auto t : times) {
      const double ms = std::chrono::duration<double, std::milli>(t).count();
      total += ms;
      lo = std::min(lo, ms);
      hi = std::max(hi, ms);
    }
    summary.t_mean_ms = total / static_cast<double>(times.size());
    summary.t_min_ms = lo;
    summary.t_max_ms = hi;
  }
  result.final_assignment = coordinator.state().current;
  return result;
}

std::string render_summary(const ReplaySummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "activations %zu, deactivations %zu, failures %zu\nsolves %zu, t_mean %.3f ms, t_min %.3f ms, t_max %.3f ms\n",
                s.activations, s.deactivations, s.failures, s.solves, s.t_mean_ms, s.t_min_ms, s.t_max_ms);
  std::string out = buf;
  if (s.oracle_checked || s.oracle_skipped) {
    out += "oracle: " + std::to_string(s.oracle_checked) + " solves checked, " + std::to_string(s.oracle_skipped) +
           " skipped, " + std::to_string(s.oracle_mismatches.size()) + " mismatches\n";
    for (const auto& m : s.oracle_mismatches) out += "  " + m + "\n";
  }
  for (const auto& v : s.consistency_violations) out += "inconsistent: " + v + "\n";
  return out;
}

}  // namespace cbc
