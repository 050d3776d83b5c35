#include "cbc/csp.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>

#include "cbc/errors.hpp"

namespace cbc {

std::vector<BehaviorIndex> situation_feasible_set(const Catalog& catalog, TaskIndex task,
                                                  const SituationStore& situation) {
  if (task >= catalog.task_count()) throw UnknownNameError("unknown task index " + std::to_string(task));
  std::vector<BehaviorIndex> out;
  for (BehaviorIndex b : catalog.candidates(task)) {
    if (situation.holds(catalog.behavior(b).situation)) out.push_back(b);
  }
  return out;
}

namespace {

DomainTable::Mask feasible_mask(const DomainTable& table, const Catalog& catalog, TaskIndex t,
                                const SituationStore& situation) {
  DomainTable::Mask m = 0;
  for (BehaviorIndex b : situation_feasible_set(catalog, t, situation)) m |= table.bit(Value::of(b));
  return m;
}

}  // namespace

DomainTable initialize_domains(const Catalog& catalog, const CoordinatorState& state, const Trigger& trigger,
                               Priority priority_floor) {
  if (const auto* s = std::get_if<StartRequest>(&trigger); s && s->task >= catalog.task_count()) {
    throw UnknownNameError("unknown task index " + std::to_string(s->task));
  }
  if (const auto* s = std::get_if<StopRequest>(&trigger); s && s->task >= catalog.task_count()) {
    throw UnknownNameError("unknown task index " + std::to_string(s->task));
  }
  if (const auto* f = std::get_if<BehaviorFinished>(&trigger); f && f->behavior >= catalog.behavior_count()) {
    throw UnknownNameError("unknown behavior index " + std::to_string(f->behavior));
  }

  DomainTable table(catalog);
  const TaskIndex trigger_t = trigger_task(catalog, trigger);
  const std::size_t group = catalog.component_of(trigger_t);
  const auto inactive = table.bit(Value::inactive());

  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    if (catalog.component_of(t) != group) {
      table.assign(t, state.current[t]);
      continue;
    }
    const auto feasible = feasible_mask(table, catalog, t, state.situation);
    if (t != trigger_t) {
      const bool dormant = catalog.task(t).start_on_request && !state.current.running(t);
      table.set_mask(t, dormant ? inactive : inactive | feasible);
      continue;
    }
    if (std::holds_alternative<StartRequest>(trigger)) {
      table.set_mask(t, feasible);
    } else if (std::holds_alternative<StopRequest>(trigger)) {
      table.set_mask(t, inactive);
    } else {
      const auto& finished = std::get<BehaviorFinished>(trigger);
      switch (finished.cause) {
        case TerminationCause::goal_achieved:
          table.set_mask(t, inactive);
          break;
        case TerminationCause::process_failure:
        case TerminationCause::time_out:
        case TerminationCause::wrong_progress:
          table.set_mask(t, (inactive | feasible) & ~table.bit(Value::of(finished.behavior)));
          break;
        case TerminationCause::situation_change:
        case TerminationCause::interrupted:
          table.set_mask(t, inactive | feasible);
          break;
      }
    }
  }

  Priority threshold = priority_floor;
  if (const auto* s = std::get_if<StartRequest>(&trigger)) threshold = s->priority;
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    if (t == trigger_t || !state.current.running(t)) continue;
    const RequestRecord* r = state.live_request(t);
    if (r && r->priority > threshold) table.remove(t, Value::inactive());
  }
  return table;
}

ConstraintSet::ConstraintSet(const Catalog& catalog) : catalog_(&catalog), incident_(catalog.task_count()) {
  auto push = [&](Constraint c) {
    const std::size_t id = constraints_.size();
    incident_[c.first].push_back(id);
    if (c.kind != Constraint::Kind::min_performance) incident_[c.second].push_back(id);
    constraints_.push_back(c);
  };
  for (auto [a, b] : catalog.incompatibilities()) push({Constraint::Kind::incompatible, a, b});
  for (BehaviorIndex b = 0; b < catalog.behavior_count(); ++b) {
    for (const auto& r : catalog.requirements(b)) {
      push({Constraint::Kind::requirement, catalog.task_of(b), r.task, b, r.min_performance});
    }
  }
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    const auto& k = catalog.task(t).min_performance;
    if (k && *k > 0.0) push({Constraint::Kind::min_performance, t, t, 0, *k});
  }
}

namespace {

// Behavior bits of a task whose suitability is below k.
DomainTable::Mask weak_bits(const DomainTable& table, TaskIndex t, double k) {
  DomainTable::Mask m = 0;
  if (k <= 0.0) return m;
  const Catalog& catalog = table.catalog();
  for (BehaviorIndex b : catalog.candidates(t)) {
    if (catalog.suitability(b) < k - kPerformanceTolerance) m |= table.bit(Value::of(b));
  }
  return m;
}

bool set_if_changed(DomainTable& table, TaskIndex t, DomainTable::Mask m) {
  if (m == table.mask(t)) return false;
  table.set_mask(t, m);
  return true;
}

}  // namespace

bool revise_arc(const Constraint& c, TaskIndex variable, DomainTable& table) {
  using Kind = Constraint::Kind;
  const auto inactive = table.bit(Value::inactive());
  switch (c.kind) {
    case Kind::incompatible: {
      const TaskIndex other = variable == c.first ? c.second : c.first;
      if (table.empty(other) || table.contains_inactive(other)) return false;
      return set_if_changed(table, variable, table.mask(variable) & inactive);
    }
    case Kind::requirement: {
      const auto weak = weak_bits(table, c.second, c.threshold);
      const auto b_bit = table.bit(Value::of(c.behavior));
      if (variable == c.first) {
        const auto strong = table.mask(c.second) & ~inactive & ~weak;
        if (strong != 0) return false;
        return set_if_changed(table, variable, table.mask(variable) & ~b_bit);
      }
      if (table.mask(c.first) != b_bit) return false;
      return set_if_changed(table, variable, table.mask(variable) & ~inactive & ~weak);
    }
    case Kind::min_performance:
      return set_if_changed(table, variable, table.mask(variable) & ~weak_bits(table, variable, c.threshold));
  }
  return false;
}

namespace {

// Arc id = 2 * constraint + side; side 0 revises `first`, side 1 `second`.
bool run_worklist(DomainTable& table, const ConstraintSet& constraints, std::deque<std::size_t> work) {
  const auto& all = constraints.constraints();
  std::vector<char> queued(all.size() * 2, 0);
  for (std::size_t a : work) queued[a] = 1;
  while (!work.empty()) {
    const std::size_t arc = work.front();
    work.pop_front();
    queued[arc] = 0;
    const Constraint& c = all[arc / 2];
    const TaskIndex v = arc % 2 == 0 ? c.first : c.second;
    if (!revise_arc(c, v, table)) continue;
    if (table.empty(v)) return false;
    for (std::size_t id : constraints.incident(v)) {
      const Constraint& d = all[id];
      if (d.kind == Constraint::Kind::min_performance) continue;
      const std::size_t target = d.first == v ? 2 * id + 1 : 2 * id;
      if (!queued[target]) {
        queued[target] = 1;
        work.push_back(target);
      }
    }
  }
  return true;
}

}  // namespace

bool propagate(DomainTable& table, const ConstraintSet& constraints) {
  for (TaskIndex t = 0; t < table.task_count(); ++t) {
    if (table.empty(t)) return false;
  }
  std::deque<std::size_t> work;
  const auto& all = constraints.constraints();
  for (std::size_t id = 0; id < all.size(); ++id) {
    work.push_back(2 * id);
    if (all[id].kind != Constraint::Kind::min_performance) work.push_back(2 * id + 1);
  }
  return run_worklist(table, constraints, std::move(work));
}

bool propagate_from(DomainTable& table, const ConstraintSet& constraints, TaskIndex changed) {
  if (table.empty(changed)) return false;
  std::deque<std::size_t> work;
  for (std::size_t id : constraints.incident(changed)) {
    const Constraint& c = constraints.constraints()[id];
    if (c.kind == Constraint::Kind::min_performance) continue;
    work.push_back(c.first == changed ? 2 * id + 1 : 2 * id);
  }
  return run_worklist(table, constraints, std::move(work));
}

std::vector<Value> order_values(TaskIndex task, const DomainTable& table, const CoordinatorState& state, Rng& rng) {
  if (table.empty(task)) throw Error("order_values: empty domain for task " + table.catalog().task_name(task));
  const Catalog& catalog = table.catalog();

  std::vector<BehaviorIndex> behaviors;
  for (Value v : table.values(task)) {
    if (v.is_behavior()) behaviors.push_back(v.behavior());
  }
  std::stable_sort(behaviors.begin(), behaviors.end(),
                   [&](BehaviorIndex a, BehaviorIndex b) { return catalog.suitability(a) > catalog.suitability(b); });
  // shuffle each run of equal suitability
  for (std::size_t lo = 0; lo < behaviors.size();) {
    std::size_t hi = lo + 1;
    while (hi < behaviors.size() && catalog.suitability(behaviors[hi]) == catalog.suitability(behaviors[lo])) ++hi;
    for (std::size_t i = hi - lo; i > 1; --i) {
      std::swap(behaviors[lo + i - 1], behaviors[lo + static_cast<std::size_t>(rng() % i)]);
    }
    lo = hi;
  }

  const bool has_inactive = table.contains_inactive(task);
  const Value current = state.current[task];
  std::vector<Value> out;
  out.reserve(behaviors.size() + 1);

  if (current.is_inactive() && has_inactive) {
    out.push_back(Value::inactive());
    for (BehaviorIndex b : behaviors) out.push_back(Value::of(b));
    return out;
  }
  if (current.is_behavior() && table.contains(task, current)) {
    const double own = catalog.suitability(current.behavior());
    const bool better = std::any_of(behaviors.begin(), behaviors.end(), [&](BehaviorIndex b) {
      return catalog.suitability(b) > own;
    });
    if (!better) {
      out.push_back(current);
      for (BehaviorIndex b : behaviors) {
        if (b != current.behavior()) out.push_back(Value::of(b));
      }
      if (has_inactive) out.push_back(Value::inactive());
      return out;
    }
  }
  for (BehaviorIndex b : behaviors) out.push_back(Value::of(b));
  if (has_inactive) out.push_back(Value::inactive());
  return out;
}

std::vector<TaskIndex> required_set(const Catalog& catalog, const Assignment& assignment, TaskIndex task) {
  std::vector<char> seen(catalog.task_count(), 0);
  std::vector<TaskIndex> stack{task};
  std::vector<TaskIndex> out;
  while (!stack.empty()) {
    const TaskIndex t = stack.back();
    stack.pop_back();
    if (!assignment.running(t)) continue;
    for (const auto& r : catalog.requirements(assignment[t].behavior())) {
      if (r.task == task || seen[r.task]) continue;
      seen[r.task] = 1;
      out.push_back(r.task);
      stack.push_back(r.task);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double task_performance(const Catalog& catalog, const Assignment& assignment, TaskIndex task) {
  if (!assignment.running(task)) throw Error("performance of inactive task " + catalog.task_name(task));
  double p = catalog.suitability(assignment[task].behavior());
  for (TaskIndex t : required_set(catalog, assignment, task)) {
    p *= assignment.running(t) ? catalog.suitability(assignment[t].behavior()) : 0.0;
  }
  return p;
}

double performance_upper_bound(const DomainTable& table, TaskIndex task) {
  double best = 0.0;
  for (Value v : table.values(task)) {
    if (v.is_behavior()) best = std::max(best, table.catalog().suitability(v.behavior()));
  }
  return best;
}

NoGood make_nogood(const Catalog& catalog, const Assignment& assignment, const Constraint& violated) {
  NoGood ng;
  ng.literals.emplace_back(violated.first, assignment[violated.first]);
  for (TaskIndex t : required_set(catalog, assignment, violated.first)) ng.literals.emplace_back(t, assignment[t]);
  std::sort(ng.literals.begin(), ng.literals.end());
  return ng;
}

NoGood solution_nogood(const Assignment& assignment) {
  NoGood ng;
  for (TaskIndex t = 0; t < assignment.size(); ++t) ng.literals.emplace_back(t, assignment[t]);
  return ng;
}

std::size_t NoGoodStore::Hash::operator()(const std::vector<Value>& values) const {
  std::size_t h = 1469598103934665603ull;
  for (Value v : values) {
    h ^= static_cast<std::size_t>(v.is_inactive() ? 0 : v.behavior() + 1);
    h *= 1099511628211ull;
  }
  return h;
}

bool NoGoodStore::add(NoGood nogood) {
  std::sort(nogood.literals.begin(), nogood.literals.end());
  if (nogood.literals.size() == task_count_) {
    std::vector<Value> key;
    key.reserve(task_count_);
    for (const auto& lit : nogood.literals) key.push_back(lit.second);
    return complete_.insert(std::move(key)).second;
  }
  if (std::find(partial_.begin(), partial_.end(), nogood) != partial_.end()) return false;
  partial_.push_back(std::move(nogood));
  return true;
}

bool NoGoodStore::excludes_partial(const DomainTable& table) const {
  return std::any_of(partial_.begin(), partial_.end(), [&](const NoGood& ng) {
    return std::all_of(ng.literals.begin(), ng.literals.end(), [&](const auto& lit) {
      return table.mask(lit.first) == table.bit(lit.second);
    });
  });
}

bool NoGoodStore::excludes(const Assignment& assignment) const {
  if (!complete_.empty()) {
    std::vector<Value> key(assignment.begin(), assignment.end());
    if (complete_.count(key)) return true;
  }
  return std::any_of(partial_.begin(), partial_.end(), [&](const NoGood& ng) {
    return std::all_of(ng.literals.begin(), ng.literals.end(),
                       [&](const auto& lit) { return assignment[lit.first] == lit.second; });
  });
}

std::vector<Constraint> performance_violations(const ConstraintSet& constraints, const Assignment& assignment) {
  const Catalog& catalog = constraints.catalog();
  std::vector<Constraint> out;
  for (const Constraint& c : constraints.constraints()) {
    if (!c.has_performance_bound()) continue;
    if (c.kind == Constraint::Kind::requirement) {
      if (assignment[c.first] != Value::of(c.behavior)) continue;
      if (!assignment.running(c.second) ||
          task_performance(catalog, assignment, c.second) < c.threshold - kPerformanceTolerance) {
        out.push_back(c);
      }
    } else if (c.kind == Constraint::Kind::min_performance) {
      if (assignment.running(c.first) &&
          task_performance(catalog, assignment, c.first) < c.threshold - kPerformanceTolerance) {
        out.push_back(c);
      }
    }
  }
  return out;
}

namespace {

class Searcher {
 public:
  Searcher(SearchContext& context, NoGoodStore& nogoods, SearchStats& stats)
      : ctx_(context), nogoods_(nogoods), stats_(stats) {}

  std::optional<Assignment> run(const DomainTable& table) {
    if (expired()) return std::nullopt;
    ++stats_.nodes;
    if (nogoods_.excludes_partial(table)) return std::nullopt;

    open_.clear();
    for (TaskIndex t = 0; t < table.task_count(); ++t) {
      if (!table.singleton(t)) open_.push_back(t);
    }
    if (open_.empty()) return leaf(table);

    const TaskIndex t = open_[static_cast<std::size_t>(ctx_.rng() % open_.size())];
    for (Value v : order_values(t, table, ctx_.state, ctx_.rng)) {
      DomainTable child = table;
      child.assign(t, v);
      if (propagate_from(child, ctx_.constraints, t)) {
        if (auto found = run(child)) return found;
      }
      if (stats_.timed_out) return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  bool expired() {
    if (std::chrono::steady_clock::now() >= ctx_.deadline) stats_.timed_out = true;
    return stats_.timed_out;
  }

  std::optional<Assignment> leaf(const DomainTable& table) {
    Assignment a(table.task_count());
    for (TaskIndex t = 0; t < table.task_count(); ++t) a[t] = table.single_value(t);
    if (nogoods_.excludes(a)) return std::nullopt;
    const auto violated = performance_violations(ctx_.constraints, a);
    if (violated.empty()) return a;
    for (const Constraint& c : violated) {
      if (nogoods_.add(make_nogood(ctx_.constraints.catalog(), a, c))) ++stats_.performance_nogoods;
    }
    return std::nullopt;
  }

  SearchContext& ctx_;
  NoGoodStore& nogoods_;
  SearchStats& stats_;
  std::vector<TaskIndex> open_;
};

}  // namespace

std::optional<Assignment> search(const DomainTable& table, SearchContext& context, NoGoodStore& nogoods,
                                 SearchStats* stats) {
  SearchStats local;
  SearchStats& s = stats ? *stats : local;
  s.timed_out = false;
  DomainTable root = table;
  if (!propagate(root, context.constraints)) return std::nullopt;
  return Searcher(context, nogoods, s).run(root);
}

namespace {

// Closure and product computed from the raw spec, kept apart from the solver
// path on purpose.
double checked_performance(const Catalog& catalog, const Assignment& a, TaskIndex task) {
  std::vector<char> in_closure(catalog.task_count(), 0);
  std::deque<TaskIndex> frontier{task};
  double p = catalog.behavior(a[task].behavior()).suitability;
  while (!frontier.empty()) {
    const TaskIndex t = frontier.front();
    frontier.pop_front();
    if (!a[t].is_behavior()) continue;
    for (const RequirementSpec& r : catalog.behavior(a[t].behavior()).requirements) {
      const TaskIndex j = catalog.task_index(r.task);
      if (j == task || in_closure[j]) continue;
      in_closure[j] = 1;
      frontier.push_back(j);
    }
  }
  for (TaskIndex j = 0; j < catalog.task_count(); ++j) {
    if (in_closure[j]) p *= a[j].is_behavior() ? catalog.behavior(a[j].behavior()).suitability : 0.0;
  }
  return p;
}

std::string fmt_perf(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::vector<std::string> check_assignment(const Assignment& assignment, const Catalog& catalog,
                                          const SituationStore& situation) {
  std::vector<std::string> out;
  if (assignment.size() != catalog.task_count()) {
    out.push_back("assignment covers " + std::to_string(assignment.size()) + " tasks, catalog has " +
                  std::to_string(catalog.task_count()));
    return out;
  }
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    const Value v = assignment[t];
    if (v.is_inactive()) continue;
    if (v.behavior() >= catalog.behavior_count() || catalog.behavior(v.behavior()).task != catalog.task_name(t)) {
      out.push_back("task " + catalog.task_name(t) + ": value is not one of its candidates");
      continue;
    }
    const BehaviorSpec& b = catalog.behavior(v.behavior());
    if (!situation.holds(b.situation)) out.push_back("behavior " + b.name + ": situation conditions do not hold");
  }
  if (!out.empty()) return out;

  for (const CompatibilityConstraint& c : catalog.spec().incompatibilities) {
    if (assignment.running(catalog.task_index(c.task_a)) && assignment.running(catalog.task_index(c.task_b))) {
      out.push_back("incompatible tasks " + c.task_a + " and " + c.task_b + " both running");
    }
  }
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    if (!assignment.running(t)) continue;
    const BehaviorSpec& b = catalog.behavior(assignment[t].behavior());
    for (const RequirementSpec& r : b.requirements) {
      const TaskIndex j = catalog.task_index(r.task);
      if (!assignment.running(j)) {
        out.push_back("behavior " + b.name + " requires " + r.task + ", which is inactive");
        continue;
      }
      const double p = checked_performance(catalog, assignment, j);
      if (p < r.min_performance - kPerformanceTolerance) {
        out.push_back("behavior " + b.name + " requires " + r.task + " with performance >= " +
                      fmt_perf(r.min_performance) + ", got " + fmt_perf(p));
      }
    }
    if (const auto& k = catalog.task(t).min_performance) {
      const double p = checked_performance(catalog, assignment, t);
      if (p < *k - kPerformanceTolerance) {
        out.push_back("task " + catalog.task_name(t) + " performance " + fmt_perf(p) + " below " + fmt_perf(*k));
      }
    }
  }
  return out;
}

}  // namespace cbc
