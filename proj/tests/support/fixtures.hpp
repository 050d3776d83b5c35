#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "cbc/catalog.hpp"
#include "cbc/csp.hpp"
#include "cbc/model.hpp"

namespace fixtures {

inline std::string data_path(const std::string& rel) { return std::string(CBC_DATA_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline cbc::Catalog load_catalog(const std::string& rel) { return cbc::parse_catalog(slurp(data_path(rel))); }

inline const char* kMini = R"(
tasks:
  - {name: A, start_on_request: true}
  - {name: B}
behaviors:
  - {name: a1, task: A, suitability: 1.0, requires: [{task: B}]}
  - {name: a2, task: A, suitability: 0.6}
  - {name: b1, task: B, suitability: 1.0}
)";

/// Worked example: five tasks, x1 -> x3 -> x4 requirement chain.
inline const char* kChain = R"(
tasks:
  - {name: x1}
  - {name: x2}
  - {name: x3}
  - {name: x4}
  - {name: x5}
behaviors:
  - {name: b1, task: x1, suitability: 1.0, requires: [{task: x3, min_performance: 0.8}]}
  - {name: b2, task: x2, suitability: 0.5}
  - {name: b3, task: x3, suitability: 0.9, requires: [{task: x4}]}
  - {name: b4, task: x4, suitability: 0.7}
  - {name: b5, task: x5, suitability: 1.0}
)";

struct Instance {
  cbc::CatalogSpec spec;
};

/// Random acyclic catalog: requirements only point from lower to higher task
/// index. At most `max_tasks` tasks and 3 behaviors per task.
inline cbc::CatalogSpec random_catalog(std::mt19937_64& rng, std::size_t max_tasks = 6) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  const double grid[] = {0.2, 0.4, 0.5, 0.6, 0.8, 0.9, 1.0};

  cbc::CatalogSpec spec;
  const std::size_t n = 1 + pick(max_tasks);
  for (std::size_t t = 0; t < n; ++t) {
    cbc::TaskSpec task;
    task.name = "t" + std::to_string(t);
    const auto role = pick(4);
    task.start_on_request = role == 0;
    task.reactive_start = role == 1;
    if (chance(0.15)) task.min_performance = grid[pick(5)];
    spec.tasks.push_back(task);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t count = pick(4);
    for (std::size_t k = 0; k < count; ++k) {
      cbc::BehaviorSpec b;
      b.name = "t" + std::to_string(t) + "b" + std::to_string(k);
      b.task = spec.tasks[t].name;
      b.suitability = grid[pick(7)];
      for (std::size_t u = t + 1; u < n; ++u) {
        if (chance(0.3)) b.requirements.push_back({spec.tasks[u].name, chance(0.3) ? grid[pick(6)] : 0.0});
      }
      if (chance(0.2)) b.situation.push_back({"k", chance(0.5) ? "0" : "1"});
      spec.behaviors.push_back(b);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (chance(0.2)) spec.incompatibilities.push_back({spec.tasks[a].name, spec.tasks[b].name});
    }
  }
  return spec;
}

/// Every assignment over full domains that passes check_assignment, in
/// odometer order.
inline std::vector<cbc::Assignment> valid_assignments(const cbc::Catalog& catalog, const cbc::SituationStore& s) {
  std::vector<cbc::Assignment> out;
  const std::size_t n = catalog.task_count();
  std::vector<std::size_t> digit(n, 0);
  cbc::Assignment a(n);
  while (true) {
    for (cbc::TaskIndex t = 0; t < n; ++t) {
      a[t] = digit[t] == 0 ? cbc::Value::inactive() : cbc::Value::of(catalog.candidates(t)[digit[t] - 1]);
    }
    if (cbc::check_assignment(a, catalog, s).empty()) out.push_back(a);
    std::size_t i = n;
    bool done = true;
    while (i > 0) {
      --i;
      if (++digit[i] <= catalog.candidates(i).size()) {
        done = false;
        break;
      }
      digit[i] = 0;
    }
    if (done) return out;
  }
}

/// A consistent coordinator state (random valid current assignment, requests
/// on some running tasks) plus a random trigger.
struct Scenario {
  cbc::CoordinatorState state;
  cbc::Trigger trigger;
  cbc::Priority floor = 0;
};

inline Scenario random_scenario(const cbc::Catalog& catalog, std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  Scenario sc;
  cbc::SituationStore situation(std::map<std::string, std::string>{{"k", pick(2) ? "1" : "0"}});
  sc.state = cbc::make_state(catalog, {}, situation);
  const auto valid = valid_assignments(catalog, sc.state.situation);
  sc.state.current = valid.empty() ? cbc::Assignment(catalog.task_count()) : valid[pick(valid.size())];
  for (cbc::TaskIndex t = 0; t < catalog.task_count(); ++t) {
    if (sc.state.current.running(t) && pick(2)) {
      sc.state.requests.push_back({t, static_cast<cbc::Priority>(pick(4)), sc.state.next_sequence++, true, false});
    }
  }
  std::vector<cbc::BehaviorIndex> running = sc.state.current.active_behaviors();
  const std::size_t kind = pick(3);
  if (kind == 2 && !running.empty()) {
    const cbc::TerminationCause causes[] = {
        cbc::TerminationCause::goal_achieved,    cbc::TerminationCause::time_out,
        cbc::TerminationCause::wrong_progress,   cbc::TerminationCause::situation_change,
        cbc::TerminationCause::process_failure,  cbc::TerminationCause::interrupted};
    sc.trigger = cbc::BehaviorFinished{running[pick(running.size())], causes[pick(6)]};
  } else if (kind == 1) {
    sc.trigger = cbc::StopRequest{pick(catalog.task_count())};
  } else {
    sc.trigger = cbc::StartRequest{pick(catalog.task_count()), static_cast<cbc::Priority>(pick(4))};
  }
  sc.floor = static_cast<cbc::Priority>(pick(4));
  return sc;
}

}  // namespace fixtures
