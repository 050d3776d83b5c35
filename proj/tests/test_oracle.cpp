#include <doctest.h>

#include "cbc/errors.hpp"
#include "cbc/oracle.hpp"
#include "support/fixtures.hpp"

using namespace cbc;

TEST_CASE("mini oracle agrees with the solver") {
  const Catalog c = parse_catalog(fixtures::kMini);
  auto state = make_state(c);
  state.requests.push_back({0, 1, 0, true, false});
  const auto table = initialize_domains(c, state, StartRequest{0, 1}, 0);
  const auto r = enumerate_optimal(table, state);
  CHECK(r.enumerated == 4);
  CHECK(r.valid_count == 3);
  REQUIRE(r.best);
  CHECK((*r.best)[0] == Value::of(0));
  CHECK((*r.best)[1] == Value::of(2));

  const ConstraintSet cs(c);
  SolverConfig cfg;
  cfg.max_solutions = 4;
  const auto sol = solve_optimal(table, cs, state, cfg);
  REQUIRE(sol);
  CHECK(sol->objectives == *r.best_vector);
}

TEST_CASE("all-inactive domains enumerate one assignment") {
  const Catalog c = parse_catalog(fixtures::kChain);
  const auto state = make_state(c);
  DomainTable t(c);
  for (TaskIndex x = 0; x < c.task_count(); ++x) t.assign(x, Value::inactive());
  const auto r = enumerate_optimal(t, state);
  CHECK(r.enumerated == 1);
  CHECK(r.valid_count == 1);
  CHECK(*r.best == Assignment(c.task_count()));
}

TEST_CASE("inconsistent domains have no best") {
  const Catalog c = parse_catalog(fixtures::kMini);
  const auto state = make_state(c);
  DomainTable t(c);
  t.assign(0, Value::of(0));
  t.assign(1, Value::inactive());
  const auto r = enumerate_optimal(t, state);
  CHECK(r.valid_count == 0);
  CHECK_FALSE(r.best);
  CHECK_FALSE(r.best_vector);
}

TEST_CASE("enumerated equals the domain product and the cap is enforced") {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 30; ++i) {
    const Catalog c(fixtures::random_catalog(gen));
    const auto state = make_state(c);
    const auto t = DomainTable::full(c);
    const auto r = enumerate_optimal(t, state);
    CHECK(static_cast<double>(r.enumerated) == t.product());
    CHECK(r.valid_count <= r.enumerated);
  }
  const Catalog c = parse_catalog(fixtures::kChain);
  CHECK_THROWS_AS(enumerate_optimal(DomainTable::full(c), make_state(c), 10), LimitError);
}
