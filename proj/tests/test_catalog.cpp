#include <doctest.h>

#include "cbc/catalog.hpp"
#include "cbc/errors.hpp"
#include "support/fixtures.hpp"

using namespace cbc;

TEST_CASE("mini catalog indexes tasks, candidates and requirements") {
  const Catalog c = parse_catalog(fixtures::kMini);
  CHECK(c.task_count() == 2);
  CHECK(c.behavior_count() == 3);
  const TaskIndex a = c.task_index("A");
  const TaskIndex b = c.task_index("B");
  CHECK(c.task(a).start_on_request);
  REQUIRE(c.candidates(a).size() == 2);
  CHECK(c.behavior_name(c.candidates(a)[0]) == "a1");
  CHECK(c.candidate_slot(c.behavior_index("a2")) == 1);
  const auto reqs = c.requirements(c.behavior_index("a1"));
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].task == b);
  CHECK(reqs[0].min_performance == 0.0);
  CHECK(c.component_of(a) == c.component_of(b));
  CHECK(c.topo_rank(a) < c.topo_rank(b));
}

TEST_CASE("unknown names throw") {
  const Catalog c = parse_catalog(fixtures::kMini);
  CHECK_THROWS_AS(c.task_index("Z"), UnknownNameError);
  CHECK_THROWS_AS(c.behavior_index("z"), UnknownNameError);
  CHECK_FALSE(c.find_task("Z").has_value());
}

TEST_CASE("suitability out of range is a single violation") {
  const auto spec = parse_catalog_spec(R"(
tasks: [{name: A}]
behaviors: [{name: a, task: A, suitability: 1.3}]
)");
  const auto report = validate_catalog(spec);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].find("suitability") != std::string::npos);
  CHECK_THROWS_AS(Catalog{spec}, CatalogError);
}

TEST_CASE("requirement cycles are rejected") {
  const auto spec = parse_catalog_spec(R"(
tasks: [{name: A}, {name: B}]
behaviors:
  - {name: a, task: A, suitability: 1.0, requires: [{task: B}]}
  - {name: b, task: B, suitability: 1.0, requires: [{task: A}]}
)");
  const auto report = validate_catalog(spec);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations.back().find("cycle") != std::string::npos);
}

TEST_CASE("several violations are all reported") {
  const auto spec = parse_catalog_spec(R"(
tasks: [{name: A, start_on_request: true, reactive_start: true}, {name: A}]
behaviors: [{name: a, task: Q, suitability: -1}]
constraints:
  incompatible: [[A, A]]
)");
  CHECK(validate_catalog(spec).violations.size() == 5);
}

TEST_CASE("syntax and schema errors are parse errors with a position") {
  CHECK_THROWS_AS(parse_catalog_spec("tasks: [unclosed"), ParseError);
  try {
    parse_catalog_spec("tasks:\n  - {name: A, colour: red}\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_catalog_spec("tasks: [{name: A}]\nbehaviors: [{name: a, task: A, suitability: high}]"),
                  ParseError);
}

TEST_CASE("serialization round-trips") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 30; ++i) {
    const CatalogSpec spec = fixtures::random_catalog(rng);
    CHECK(parse_catalog_spec(serialize_catalog(spec)) == spec);
  }
  const CatalogSpec shipped = parse_catalog_spec(fixtures::slurp(fixtures::data_path("target_following/catalog.yaml")));
  CHECK(parse_catalog_spec(serialize_catalog(shipped)) == shipped);
}

TEST_CASE("shipped catalogs validate") {
  for (const char* rel : {"target_following/catalog.yaml", "reactive/catalog.yaml", "mini/catalog.yaml"}) {
    CAPTURE(rel);
    CHECK_NOTHROW(fixtures::load_catalog(rel));
  }
}

TEST_CASE("connected components follow incompatibility and requirement edges") {
  const Catalog c = parse_catalog(R"(
tasks: [{name: A}, {name: B}, {name: C}, {name: D}, {name: E}]
behaviors:
  - {name: a, task: A, suitability: 1.0, requires: [{task: C}]}
constraints:
  incompatible: [[B, D]]
)");
  const auto groups = connected_components(c);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0] == std::vector<std::string>{"A", "C"});
  CHECK(groups[1] == std::vector<std::string>{"B", "D"});
  CHECK(groups[2] == std::vector<std::string>{"E"});
}

TEST_CASE("topological rank puts dependents first") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const Catalog c(fixtures::random_catalog(rng));
    for (BehaviorIndex b = 0; b < c.behavior_count(); ++b) {
      for (const auto& r : c.requirements(b)) CHECK(c.topo_rank(c.task_of(b)) < c.topo_rank(r.task));
    }
  }
}
