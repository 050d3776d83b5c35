#include "cbc/model.hpp"

#include <algorithm>
#include <cctype>

namespace cbc {

std::vector<BehaviorIndex> Assignment::active_behaviors() const {
  std::vector<BehaviorIndex> out;
  for (Value v : values_) {
    if (v.is_behavior()) out.push_back(v.behavior());
  }
  return out;
}

std::string describe(const Catalog& catalog, const Assignment& assignment) {
  std::string out;
  for (TaskIndex t = 0; t < assignment.size(); ++t) {
    if (t) out += ", ";
    out += catalog.task_name(t);
    out += '=';
    out += assignment[t].is_inactive() ? std::string("-") : catalog.behavior_name(assignment[t].behavior());
  }
  return out;
}

DomainTable::DomainTable(const Catalog& catalog) : catalog_(&catalog), masks_(catalog.task_count(), 0) {}

DomainTable DomainTable::full(const Catalog& catalog) {
  DomainTable table(catalog);
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    const std::size_t slots = catalog.candidates(t).size() + 1;
    table.masks_[t] = slots >= 64 ? ~Mask{0} : (Mask{1} << slots) - 1;
  }
  return table;
}

bool DomainTable::remove(TaskIndex t, Value v) {
  const Mask b = bit(v);
  const bool present = (masks_[t] & b) != 0;
  masks_[t] &= ~b;
  return present;
}

std::vector<Value> DomainTable::values(TaskIndex t) const {
  std::vector<Value> out;
  for (Mask m = masks_[t]; m != 0; m &= m - 1) {
    out.push_back(value_at(t, static_cast<unsigned>(std::countr_zero(m))));
  }
  return out;
}

Value DomainTable::single_value(TaskIndex t) const {
  return value_at(t, static_cast<unsigned>(std::countr_zero(masks_[t])));
}

double DomainTable::product() const {
  double p = 1.0;
  for (Mask m : masks_) p *= static_cast<double>(std::popcount(m));
  return p;
}

std::optional<std::string> SituationStore::get(std::string_view key) const {
  if (auto it = values_.find(std::string(key)); it != values_.end()) return it->second;
  return std::nullopt;
}

void SituationStore::set(std::string key, std::string value, SimTime at) {
  log_.push_back({at, key, value});
  values_[std::move(key)] = std::move(value);
}

bool SituationStore::holds(const std::vector<SituationCondition>& conditions) const {
  return std::all_of(conditions.begin(), conditions.end(), [&](const SituationCondition& c) {
    auto it = values_.find(c.key);
    return it != values_.end() && it->second == c.value;
  });
}

namespace {
constexpr std::pair<TerminationCause, std::string_view> kCauseNames[] = {
    {TerminationCause::goal_achieved, "GOAL_ACHIEVED"},
    {TerminationCause::time_out, "TIME_OUT"},
    {TerminationCause::wrong_progress, "WRONG_PROGRESS"},
    {TerminationCause::situation_change, "SITUATION_CHANGE"},
    {TerminationCause::process_failure, "PROCESS_FAILURE"},
    {TerminationCause::interrupted, "INTERRUPTED"},
};
}  // namespace

std::string_view to_string(TerminationCause cause) {
  for (const auto& [c, name] : kCauseNames) {
    if (c == cause) return name;
  }
  return "UNKNOWN";
}

std::optional<TerminationCause> parse_termination_cause(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& [c, name] : kCauseNames) {
    if (upper == name) return c;
  }
  return std::nullopt;
}

bool is_failure(TerminationCause cause) {
  return cause == TerminationCause::time_out || cause == TerminationCause::wrong_progress ||
         cause == TerminationCause::process_failure;
}

TaskIndex trigger_task(const Catalog& catalog, const Trigger& trigger) {
  if (const auto* start = std::get_if<StartRequest>(&trigger)) return start->task;
  if (const auto* stop = std::get_if<StopRequest>(&trigger)) return stop->task;
  return catalog.task_of(std::get<BehaviorFinished>(trigger).behavior);
}

std::string describe(const Catalog& catalog, const Trigger& trigger) {
  if (const auto* start = std::get_if<StartRequest>(&trigger)) {
    return "start " + catalog.task_name(start->task) + " p=" + std::to_string(start->priority);
  }
  if (const auto* stop = std::get_if<StopRequest>(&trigger)) return "stop " + catalog.task_name(stop->task);
  const auto& finished = std::get<BehaviorFinished>(trigger);
  return "finished " + catalog.behavior_name(finished.behavior) + " " + std::string(to_string(finished.cause));
}

const RequestRecord* CoordinatorState::live_request(TaskIndex t) const {
  for (const auto& r : requests) {
    if (r.active && r.task == t) return &r;
  }
  return nullptr;
}

RequestRecord* CoordinatorState::live_request(TaskIndex t) {
  for (auto& r : requests) {
    if (r.active && r.task == t) return &r;
  }
  return nullptr;
}

Priority CoordinatorState::max_live_priority() const {
  Priority p = 0;
  for (const auto& r : requests) {
    if (r.active) p = std::max(p, r.priority);
  }
  return p;
}

std::size_t CoordinatorState::live_request_count() const {
  return static_cast<std::size_t>(std::count_if(requests.begin(), requests.end(), [](const auto& r) { return r.active; }));
}

CoordinatorState make_state(const Catalog& catalog, SolverConfig config, SituationStore situation) {
  CoordinatorState state;
  state.current = Assignment(catalog.task_count());
  state.config = config;
  state.situation = std::move(situation);
  return state;
}

}  // namespace cbc
