#include "cbc/coordinator.hpp"

#include <algorithm>

#include "cbc/errors.hpp"

namespace cbc {

ActivationDelta diff_assignments(const Catalog& catalog, const Assignment& from, const Assignment& to,
                                 std::optional<TaskIndex> restarted) {
  std::vector<TaskIndex> off, on;
  for (TaskIndex t = 0; t < from.size(); ++t) {
    const bool changed = from[t] != to[t] || restarted == t;
    if (!changed) continue;
    if (from[t].is_behavior()) off.push_back(t);
    if (to[t].is_behavior()) on.push_back(t);
  }
  std::sort(off.begin(), off.end(), [&](TaskIndex a, TaskIndex b) {
    return std::pair(catalog.topo_rank(a), a) < std::pair(catalog.topo_rank(b), b);
  });
  std::sort(on.begin(), on.end(), [&](TaskIndex a, TaskIndex b) {
    return std::pair(catalog.topo_rank(a), b) > std::pair(catalog.topo_rank(b), a);
  });
  ActivationDelta delta;
  for (TaskIndex t : off) delta.deactivations.push_back({from[t].behavior(), 0, true, std::nullopt});
  for (TaskIndex t : on) delta.activations.push_back({to[t].behavior(), 0, true, std::nullopt});
  return delta;
}

std::vector<std::vector<TaskIndex>> reactive_incompatibility_sets(const Catalog& catalog) {
  std::vector<std::vector<TaskIndex>> sets(catalog.task_count());
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    for (TaskIndex u : catalog.incompatible_with(t)) {
      if (catalog.task(u).reactive_start) sets[t].push_back(u);
    }
    std::sort(sets[t].begin(), sets[t].end());
  }
  return sets;
}

void update_reactive_queue(std::vector<ReactiveEntry>& queue, const std::vector<std::vector<TaskIndex>>& sets,
                           const std::vector<TaskIndex>& started, const std::vector<TaskIndex>& finished,
                           SimTime now, SimTime delay) {
  auto drop = [&](TaskIndex u) {
    queue.erase(std::remove_if(queue.begin(), queue.end(), [&](const ReactiveEntry& e) { return e.task == u; }),
                queue.end());
  };
  for (TaskIndex t : finished) {
    for (TaskIndex u : sets[t]) {
      drop(u);
      queue.push_back({u, now + delay});
    }
  }
  for (TaskIndex t : started) {
    for (TaskIndex u : sets[t]) drop(u);
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Coordinator::Coordinator(const Catalog& catalog, CoordinatorState state)
    : catalog_(&catalog),
      constraints_(catalog),
      state_(std::move(state)),
      reactive_sets_(reactive_incompatibility_sets(catalog)) {
  if (state_.current.size() != catalog.task_count()) state_.current = Assignment(catalog.task_count());
}

void Coordinator::bootstrap() {
  for (TaskIndex t = 0; t < catalog_->task_count(); ++t) {
    if (!catalog_->task(t).reactive_start) continue;
    std::erase_if(state_.reactive_queue, [&](const ReactiveEntry& e) { return e.task == t; });
    state_.reactive_queue.push_back({t, state_.clock + state_.config.reactive_delay});
  }
}

std::optional<SimTime> Coordinator::next_reactive_due() const {
  std::optional<SimTime> best;
  for (const auto& e : state_.reactive_queue) {
    if (!best || e.due < *best) best = e.due;
  }
  return best;
}

std::optional<Solution> Coordinator::solve_at(const Trigger& event, Priority floor) {
  const DomainTable table = initialize_domains(*catalog_, state_, event, floor);
  SolverConfig config = state_.config;
  config.seed = splitmix64(state_.config.seed ^ splitmix64(state_.solve_counter++));
  SolveStats stats;
  const auto start = std::chrono::steady_clock::now();
  auto solution = solve_optimal(table, constraints_, state_, config, &stats);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  solve_times_.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed));
  if (observer_) observer_({table, state_, config, solution, stats, solve_times_.back()});
  if (solution) last_objectives_ = solution->objectives;
  return solution;
}

std::optional<std::pair<Solution, Priority>> Coordinator::solve_with_escalation(const Trigger& event) {
  std::vector<Priority> floors{0};
  for (const auto& r : state_.requests) {
    if (r.active) floors.push_back(r.priority);
  }
  std::sort(floors.begin(), floors.end());
  floors.erase(std::unique(floors.begin(), floors.end()), floors.end());
  // floors between two live priorities filter the same tasks, so only these
  // values need a solve
  for (Priority p : floors) {
    if (auto s = solve_at(event, p)) return std::pair(std::move(*s), p);
  }
  return std::nullopt;
}

Assignment Coordinator::safety_fallback(TaskIndex failed) const {
  const Catalog& c = *catalog_;
  Assignment next = state_.current;
  next[failed] = Value::inactive();
  for (bool changed = true; changed;) {
    changed = false;
    for (TaskIndex t = 0; t < c.task_count(); ++t) {
      if (!next.running(t)) continue;
      bool broken = false;
      for (const auto& r : c.requirements(next[t].behavior())) {
        if (!next.running(r.task) ||
            task_performance(c, next, r.task) < r.min_performance - kPerformanceTolerance) {
          broken = true;
        }
      }
      const auto& k = c.task(t).min_performance;
      if (!broken && k && task_performance(c, next, t) < *k - kPerformanceTolerance) broken = true;
      if (broken) {
        next[t] = Value::inactive();
        changed = true;
      }
    }
  }
  return next;
}

ActivationDelta Coordinator::commit(const Trigger& event, const Assignment& next, Priority event_priority,
                                    bool solved) {
  const Catalog& c = *catalog_;
  const Assignment old = state_.current;

  std::optional<TaskIndex> restarted;
  std::optional<BehaviorFinished> finished;
  if (const auto* f = std::get_if<BehaviorFinished>(&event)) {
    finished = *f;
    const TaskIndex t = c.task_of(f->behavior);
    if (next[t] == old[t]) restarted = t;
  }

  ActivationDelta delta = diff_assignments(c, old, next, restarted);
  delta.at = state_.clock;
  delta.trigger = describe(c, event);
  delta.solved = solved;
  state_.current = next;

  for (auto& r : state_.requests) {
    if (r.active && !next.running(r.task)) {
      r.active = false;
      if (!r.reactive) delta.failed_requests.push_back({r.task, r.priority});
    }
  }

  auto priority_of = [&](BehaviorIndex b) {
    const RequestRecord* r = state_.live_request(c.task_of(b));
    return r ? r->priority : event_priority;
  };
  for (auto& e : delta.deactivations) {
    const auto& before = prior_priority_[c.task_of(e.behavior)];
    e.priority = before ? *before : event_priority;
    if (finished && finished->behavior == e.behavior) {
      e.cause = finished->cause;
      e.success = !is_failure(finished->cause);
    } else {
      e.cause = TerminationCause::interrupted;
      e.success = solved;
    }
  }
  for (auto& e : delta.activations) e.priority = priority_of(e.behavior);

  std::vector<TaskIndex> started, stopped;
  for (TaskIndex t = 0; t < c.task_count(); ++t) {
    const bool restart = restarted == t;
    if (next.running(t) && (!old.running(t) || restart)) started.push_back(t);
    if (old.running(t) && (!next.running(t) || restart)) stopped.push_back(t);
  }
  update_reactive_queue(state_.reactive_queue, reactive_sets_, started, stopped, state_.clock,
                        state_.config.reactive_delay);

  apply_to_harness(delta);
  return delta;
}

void Coordinator::apply_to_harness(const ActivationDelta& delta) {
  if (!harness_) return;
  for (const auto& e : delta.deactivations) {
    if (harness_->is_active(e.behavior)) harness_->deactivate(e.behavior, state_.clock);
  }
  for (const auto& e : delta.activations) harness_->activate(e.behavior, state_.clock);
}

ActivationDelta Coordinator::handle_event(const Trigger& event) { return handle(event, false); }

ActivationDelta Coordinator::handle(const Trigger& event, bool reactive) {
  const Catalog& c = *catalog_;
  prior_priority_.assign(c.task_count(), std::nullopt);
  for (const auto& r : state_.requests) {
    if (r.active) prior_priority_[r.task] = r.priority;
  }

  if (const auto* start = std::get_if<StartRequest>(&event)) {
    if (start->task >= c.task_count()) throw UnknownNameError("unknown task index " + std::to_string(start->task));
    RequestRecord* prev = state_.live_request(start->task);
    std::optional<std::size_t> prev_index;
    if (prev) {
      prev->active = false;
      prev_index = static_cast<std::size_t>(prev - state_.requests.data());
    }
    state_.requests.push_back({start->task, start->priority, state_.next_sequence++, true, reactive});
    if (auto s = solve_at(event, start->priority)) return commit(event, s->assignment, start->priority, true);

    state_.requests.back().active = false;
    if (prev_index && state_.current.running(start->task)) state_.requests[*prev_index].active = true;
    ActivationDelta delta = commit(event, state_.current, start->priority, false);
    if (!reactive) delta.failed_requests.push_back({start->task, start->priority});
    return delta;
  }

  if (const auto* stop = std::get_if<StopRequest>(&event)) {
    if (stop->task >= c.task_count()) throw UnknownNameError("unknown task index " + std::to_string(stop->task));
    Priority floor = 0;
    if (RequestRecord* r = state_.live_request(stop->task)) {
      floor = r->priority;
      r->active = false;
    }
    if (!state_.current.running(stop->task)) return commit(event, state_.current, floor, true);
    if (auto s = solve_at(event, floor)) return commit(event, s->assignment, floor, true);
    return commit(event, safety_fallback(stop->task), floor, false);
  }

  const auto& finished = std::get<BehaviorFinished>(event);
  if (finished.behavior >= c.behavior_count()) {
    throw UnknownNameError("unknown behavior index " + std::to_string(finished.behavior));
  }
  const TaskIndex t = c.task_of(finished.behavior);
  if (state_.current[t] != Value::of(finished.behavior)) {
    ActivationDelta stale;
    stale.at = state_.clock;
    stale.trigger = describe(c, event);
    return stale;
  }
  RequestRecord* r = state_.live_request(t);
  if (r && finished.cause == TerminationCause::goal_achieved) {
    r->active = false;
    r = nullptr;
  }
  if (r) {
    const Priority floor = r->priority;
    if (auto s = solve_at(event, floor)) return commit(event, s->assignment, floor, true);
    return commit(event, safety_fallback(t), floor, false);
  }
  if (auto s = solve_with_escalation(event)) return commit(event, s->first.assignment, s->second, true);
  return commit(event, safety_fallback(t), 0, false);
}

std::vector<ActivationDelta> Coordinator::run_cycle(const std::vector<Trigger>& events, SimTime now) {
  state_.clock = now;
  std::vector<Trigger> all;
  if (harness_) all = harness_->poll_timeouts(now);
  all.insert(all.end(), events.begin(), events.end());

  std::vector<ActivationDelta> out;
  for (const Trigger& e : all) out.push_back(handle_event(e));

  std::vector<ReactiveEntry> due;
  for (const auto& e : state_.reactive_queue) {
    if (e.due <= now) due.push_back(e);
  }
  std::sort(due.begin(), due.end(), [](const ReactiveEntry& a, const ReactiveEntry& b) {
    return std::pair(a.due, a.task) < std::pair(b.due, b.task);
  });
  std::erase_if(state_.reactive_queue, [&](const ReactiveEntry& e) { return e.due <= now; });

  for (const auto& e : due) {
    if (state_.current.running(e.task)) continue;
    if (situation_feasible_set(*catalog_, e.task, state_.situation).empty()) continue;
    ActivationDelta d = handle(StartRequest{e.task, 0}, true);
    d.reactive = true;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace cbc
