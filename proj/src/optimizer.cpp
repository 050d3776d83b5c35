#include "cbc/optimizer.hpp"

namespace cbc {

std::size_t change_count(const Assignment& from, const Assignment& to) {
  std::size_t c = 0;
  for (TaskIndex t = 0; t < from.size(); ++t) {
    if (from[t] == to[t]) continue;
    if (from[t].is_behavior()) ++c;
    if (to[t].is_behavior()) ++c;
  }
  return c;
}

ObjectiveVector objective_vector(const Catalog& catalog, const Assignment& candidate, const CoordinatorState& state) {
  ObjectiveVector v;

  std::size_t n = 0, r = 0;
  for (const RequestRecord& rec : state.requests) {
    if (!rec.active) continue;
    ++n;
    if (candidate.running(rec.task)) ++r;
  }
  v.f1 = n == 0 ? 1.0 : static_cast<double>(r) / static_cast<double>(n);

  v.f2 = 1.0;
  for (Value x : candidate) {
    if (x.is_behavior()) v.f2 *= catalog.suitability(x.behavior());
  }

  std::size_t t = 0, a = 0;
  for (TaskIndex i = 0; i < catalog.task_count(); ++i) {
    if (catalog.task(i).start_on_request) continue;
    ++t;
    if (candidate.running(i)) ++a;
  }
  v.f3 = t == 0 ? 1.0 : static_cast<double>(t - a) / static_cast<double>(t);

  v.f4 = 1.0 / (1.0 + static_cast<double>(change_count(state.current, candidate)));
  return v;
}

std::optional<Solution> solve_optimal(const DomainTable& table, const ConstraintSet& constraints,
                                      const CoordinatorState& state, const SolverConfig& config,
                                      SolveStats* stats) {
  SolveStats local;
  SolveStats& s = stats ? *stats : local;
  s = SolveStats{};

  const Catalog& catalog = constraints.catalog();
  Rng rng(config.seed);
  SearchContext context{constraints, state, rng,
                        std::chrono::steady_clock::now() + config.max_search_time};
  NoGoodStore nogoods(catalog.task_count());

  std::optional<Solution> best;
  for (std::size_t i = 0; i < config.max_solutions; ++i) {
    SearchStats ss;
    auto found = search(table, context, nogoods, &ss);
    s.nodes += ss.nodes;
    s.performance_nogoods += ss.performance_nogoods;
    if (!found) {
      s.timed_out = ss.timed_out;
      s.exhausted = !ss.timed_out;
      break;
    }
    ++s.solutions;
    ObjectiveVector v = objective_vector(catalog, *found, state);
    if (!best || v > best->objectives) best = Solution{*found, v};
    nogoods.add(solution_nogood(*found));
  }
  return best;
}

}  // namespace cbc
