#include "cbc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "cbc/errors.hpp"
#include "cbc/optimizer.hpp"

namespace cbc {

CatalogSpec generate_catalog(const BenchParams& p) {
  if (p.tasks == 0 || p.layers == 0 || p.behaviors_per_task == 0) throw Error("bench: sizes must be positive");
  if (p.behaviors_per_task > kMaxCandidatesPerTask) throw Error("bench: too many behaviors per task");
  if (p.incompat_density < 0 || p.incompat_density > 1) throw Error("bench: density must lie in [0,1]");
  std::mt19937_64 rng(p.seed);
  const std::size_t layers = std::min(p.layers, p.tasks);

  CatalogSpec spec;
  std::vector<std::size_t> layer_of(p.tasks);
  for (std::size_t t = 0; t < p.tasks; ++t) {
    layer_of[t] = t * layers / p.tasks;
    spec.tasks.push_back({"T" + std::to_string(t), false, false, std::nullopt});
  }
  for (std::size_t t = 0; t < p.tasks; ++t) {
    std::vector<std::size_t> below;
    for (std::size_t u = 0; u < p.tasks; ++u) {
      if (layer_of[u] == layer_of[t] + 1) below.push_back(u);
    }
    for (std::size_t k = 0; k < p.behaviors_per_task; ++k) {
      BehaviorSpec b;
      b.name = "T" + std::to_string(t) + "_b" + std::to_string(k);
      b.task = spec.tasks[t].name;
      b.suitability = static_cast<double>(5 + rng() % 6) / 10.0;
      std::vector<std::size_t> pool = below;
      for (std::size_t r = 0; r < p.requires_per_behavior && !pool.empty(); ++r) {
        const std::size_t i = static_cast<std::size_t>(rng() % pool.size());
        b.requirements.push_back({spec.tasks[pool[i]].name, 0.0});
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
      }
      spec.behaviors.push_back(std::move(b));
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < p.tasks; ++a) {
    for (std::size_t b = a + 1; b < p.tasks; ++b) pairs.emplace_back(a, b);
  }
  const auto wanted = static_cast<std::size_t>(std::llround(p.incompat_density * static_cast<double>(pairs.size())));
  for (std::size_t i = 0; i < wanted; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (pairs.size() - i));
    std::swap(pairs[i], pairs[j]);
    spec.incompatibilities.push_back({spec.tasks[pairs[i].first].name, spec.tasks[pairs[i].second].name});
  }
  return spec;
}

namespace {

BenchTiming time_solves(const ConstraintSet& constraints, const DomainTable& table,
                        const CoordinatorState& state, std::size_t m, std::size_t repeats, std::uint64_t seed) {
  BenchTiming out;
  out.min_ms = 1e300;
  double total = 0;
  for (std::size_t i = 0; i < repeats; ++i) {
    SolverConfig config = state.config;
    config.max_solutions = m;
    config.max_search_time = std::chrono::seconds(10);
    config.seed = seed + i;
    SolveStats stats;
    const auto start = std::chrono::steady_clock::now();
    auto solution = solve_optimal(table, constraints, state, config, &stats);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    total += ms;
    out.min_ms = std::min(out.min_ms, ms);
    out.max_ms = std::max(out.max_ms, ms);
    out.solved = solution.has_value();
    out.solutions = stats.solutions;
  }
  out.mean_ms = repeats ? total / static_cast<double>(repeats) : 0.0;
  if (!repeats) out.min_ms = 0;
  return out;
}

}  // namespace

BenchReport run_bench(const Catalog& catalog, std::size_t repeats, std::uint64_t seed) {
  if (catalog.task_count() == 0) throw Error("bench: empty catalog");
  BenchReport report;
  report.repeats = repeats;
  DomainTable table = DomainTable::full(catalog);
  report.search_space = table.product();
  report.constraints = catalog.incompatibilities().size();
  for (BehaviorIndex b = 0; b < catalog.behavior_count(); ++b) report.constraints += catalog.requirements(b).size();
  for (TaskIndex t = 0; t < catalog.task_count(); ++t) {
    if (catalog.task(t).min_performance) ++report.constraints;
  }

  CoordinatorState state = make_state(catalog);
  state.requests.push_back({0, 1, state.next_sequence++, true, false});
  table.remove(0, Value::inactive());

  const ConstraintSet constraints(catalog);
  report.m1 = time_solves(constraints, table, state, 1, repeats, seed);
  report.m5 = time_solves(constraints, table, state, 5, repeats, seed);
  return report;
}

std::string render_bench(const BenchReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "c %zu\ns %.3g\nt(m=1) mean %.3f ms, min %.3f ms, max %.3f ms%s\n"
                "t(m=5) mean %.3f ms, min %.3f ms, max %.3f ms, %zu solutions%s\nrepeats %zu\n",
                r.constraints, r.search_space, r.m1.mean_ms, r.m1.min_ms, r.m1.max_ms,
                r.m1.solved ? "" : " (no solution)", r.m5.mean_ms, r.m5.min_ms, r.m5.max_ms, r.m5.solutions,
                r.m5.solved ? "" : " (no solution)", r.repeats);
  return buf;
}

}  // namespace cbc
