#include <doctest.h>

#include "cbc/optimizer.hpp"
#include "support/fixtures.hpp"

using namespace cbc;

namespace {

SolverConfig roomy(std::size_t m) {
  SolverConfig cfg;
  cfg.max_solutions = m;
  cfg.max_search_time = std::chrono::seconds(10);
  return cfg;
}

}  // namespace

TEST_CASE("change count counts a switch twice") {
  Assignment from(3), to(3);
  from[0] = Value::of(0);
  to[0] = Value::of(1);
  to[2] = Value::of(4);
  CHECK(change_count(from, to) == 3);
  CHECK(change_count(to, to) == 0);
}

TEST_CASE("objective vector components") {
  const Catalog c = parse_catalog(fixtures::kMini);
  auto state = make_state(c);
  state.requests.push_back({0, 1, 0, true, false});
  Assignment a(2);
  a[0] = Value::of(0);
  a[1] = Value::of(2);
  const auto v = objective_vector(c, a, state);
  CHECK(v.f1 == 1.0);
  CHECK(v.f2 == 1.0);
  CHECK(v.f3 == 0.0);
  CHECK(v.f4 == doctest::Approx(1.0 / 3.0));

  Assignment idle(2);
  const auto w = objective_vector(c, idle, state);
  CHECK(w.f1 == 0.0);
  CHECK(w.f3 == 1.0);
  CHECK(w.f4 == 1.0);
  CHECK(v > w);
}

TEST_CASE("objective vectors compare lexicographically") {
  CHECK(ObjectiveVector{1, 0, 0, 0} > ObjectiveVector{0.5, 1, 1, 1});
  CHECK(ObjectiveVector{1, 0.5, 1, 1} < ObjectiveVector{1, 0.6, 0, 0});
  CHECK(ObjectiveVector{1, 1, 1, 0.5} == ObjectiveVector{1, 1, 1, 0.5});
}

TEST_CASE("mini start request picks the more suitable behavior with its requirement") {
  const Catalog c = parse_catalog(fixtures::kMini);
  auto state = make_state(c);
  state.requests.push_back({0, 1, 0, true, false});
  const ConstraintSet cs(c);
  const auto table = initialize_domains(c, state, StartRequest{0, 1}, 0);
  SolveStats stats;
  const auto sol = solve_optimal(table, cs, state, roomy(10), &stats);
  REQUIRE(sol);
  CHECK(sol->assignment[0] == Value::of(c.behavior_index("a1")));
  CHECK(sol->assignment[1] == Value::of(c.behavior_index("b1")));
  CHECK(sol->objectives == ObjectiveVector{1, 1, 0, 1.0 / 3.0});
  CHECK(stats.exhausted);
  CHECK(stats.solutions >= 2);
}

TEST_CASE("one solution is the first one found") {
  const Catalog c = parse_catalog(fixtures::kMini);
  auto state = make_state(c);
  const ConstraintSet cs(c);
  SolveStats stats;
  const auto sol = solve_optimal(DomainTable::full(c), cs, state, roomy(1), &stats);
  REQUIRE(sol);
  CHECK(stats.solutions == 1);
  // nothing requested: the inactive-first order keeps everything off
  CHECK(sol->assignment == Assignment(2));
}

TEST_CASE("infeasible tables have no solution") {
  const Catalog c = parse_catalog(fixtures::kMini);
  const auto state = make_state(c);
  const ConstraintSet cs(c);
  DomainTable t = DomainTable::full(c);
  t.assign(0, Value::of(0));
  t.assign(1, Value::inactive());
  SolveStats stats;
  CHECK_FALSE(solve_optimal(t, cs, state, roomy(10), &stats));
  CHECK(stats.exhausted);
  CHECK(stats.solutions == 0);
}

TEST_CASE("same seed, same answer") {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 40; ++i) {
    const Catalog c(fixtures::random_catalog(gen));
    const auto sc = fixtures::random_scenario(c, gen);
    const ConstraintSet cs(c);
    const auto table = initialize_domains(c, sc.state, sc.trigger, sc.floor);
    SolverConfig cfg = roomy(3);
    cfg.seed = 99;
    const auto a = solve_optimal(table, cs, sc.state, cfg);
    const auto b = solve_optimal(table, cs, sc.state, cfg);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(a->assignment == b->assignment);
  }
}
