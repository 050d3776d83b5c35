#include <doctest.h>

#include "cbc/coordinator.hpp"
#include "support/fixtures.hpp"

using namespace cbc;
using std::chrono::milliseconds;

namespace {

const char* kPair = R"(
tasks:
  - {name: X, start_on_request: true}
  - {name: Y, start_on_request: true}
behaviors:
  - {name: x, task: X, suitability: 1.0}
  - {name: y, task: Y, suitability: 1.0}
constraints:
  incompatible: [[X, Y]]
)";

const char* kStack = R"(
tasks:
  - {name: A, start_on_request: true}
  - {name: B}
behaviors:
  - {name: a, task: A, suitability: 1.0, requires: [{task: B}]}
  - {name: b1, task: B, suitability: 1.0}
)";

std::vector<std::string> names(const Catalog& c, const std::vector<DeltaEntry>& entries) {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(c.behavior_name(e.behavior));
  return out;
}

using Names = std::vector<std::string>;

}  // namespace

TEST_CASE("diff orders required tasks first on activation and last on deactivation") {
  const Catalog c = fixtures::load_catalog("target_following/catalog.yaml");
  Assignment from(c.task_count()), to(c.task_count());
  to[c.task_index("ApproachTarget")] = Value::of(c.behavior_index("MotionPlannerCloseTarget"));
  to[c.task_index("LocalizeTarget")] = Value::of(c.behavior_index("PNPLocalizer"));
  to[c.task_index("RecognizeCloseTarget")] = Value::of(c.behavior_index("CloseRangeTargetRecognition"));
  const auto on = diff_assignments(c, from, to);
  CHECK(names(c, on.activations) ==
        Names{"CloseRangeTargetRecognition", "PNPLocalizer", "MotionPlannerCloseTarget"});
  const auto off = diff_assignments(c, to, from);
  CHECK(names(c, off.deactivations) ==
        Names{"MotionPlannerCloseTarget", "PNPLocalizer", "CloseRangeTargetRecognition"});
  const auto restart = diff_assignments(c, to, to, c.task_index("LocalizeTarget"));
  CHECK(names(c, restart.deactivations) == Names{"PNPLocalizer"});
  CHECK(names(c, restart.activations) == Names{"PNPLocalizer"});
}

TEST_CASE("start request activates the requirement before the dependent") {
  const Catalog c = parse_catalog(fixtures::kMini);
  Coordinator co(c, make_state(c));
  const auto d = co.handle_event(StartRequest{0, 1});
  CHECK(d.solved);
  CHECK(names(c, d.activations) == Names{"b1", "a1"});
  CHECK(d.activations[0].priority == 1);
  CHECK(d.failed_requests.empty());
  REQUIRE(co.last_objectives());
  CHECK(co.last_objectives()->f1 == 1.0);
  CHECK(co.state().live_request(0)->priority == 1);
}

TEST_CASE("higher priority requests are protected from lower ones") {
  const Catalog c = parse_catalog(kPair);
  Coordinator co(c, make_state(c));
  co.handle_event(StartRequest{0, 3});
  auto weak = co.handle_event(StartRequest{1, 1});
  CHECK(weak.deactivations.empty());
  CHECK(weak.activations.empty());
  REQUIRE(weak.failed_requests.size() == 1);
  CHECK(weak.failed_requests[0].task == 1);
  CHECK(co.state().current.running(0));
  CHECK(co.state().live_request(1) == nullptr);

  auto strong = co.handle_event(StartRequest{1, 5});
  CHECK(names(c, strong.deactivations) == Names{"x"});
  CHECK(strong.deactivations[0].priority == 3);
  CHECK(strong.deactivations[0].cause == TerminationCause::interrupted);
  CHECK(names(c, strong.activations) == Names{"y"});
  REQUIRE(strong.failed_requests.size() == 1);
  CHECK(strong.failed_requests[0].task == 0);
}

TEST_CASE("equal priority: the newer request wins") {
  const Catalog c = parse_catalog(kPair);
  Coordinator co(c, make_state(c));
  co.handle_event(StartRequest{0, 2});
  const auto d = co.handle_event(StartRequest{1, 2});
  CHECK(names(c, d.activations) == Names{"y"});
}

TEST_CASE("stop requests") {
  const Catalog c = parse_catalog(fixtures::kMini);
  Coordinator co(c, make_state(c));
  SUBCASE("on a running task deactivates it and its requirements") {
    co.handle_event(StartRequest{0, 1});
    const auto d = co.handle_event(StopRequest{0});
    CHECK(names(c, d.deactivations) == Names{"a1", "b1"});
    CHECK(d.failed_requests.empty());
    CHECK(co.state().current == Assignment(2));
  }
  SUBCASE("on an idle task is an empty delta") {
    const auto d = co.handle_event(StopRequest{0});
    CHECK(d.empty());
    CHECK(d.solved);
  }
}

TEST_CASE("terminations") {
  const Catalog c = parse_catalog(fixtures::kMini);
  Coordinator co(c, make_state(c));
  co.handle_event(StartRequest{0, 1});
  const BehaviorIndex a1 = c.behavior_index("a1"), a2 = c.behavior_index("a2");

  SUBCASE("stale reports are ignored") {
    const auto d = co.handle_event(BehaviorFinished{a2, TerminationCause::process_failure});
    CHECK(d.empty());
  }
  SUBCASE("a failure switches to another behavior for the same request") {
    const auto d = co.handle_event(BehaviorFinished{a1, TerminationCause::process_failure});
    CHECK(names(c, d.deactivations) == Names{"a1", "b1"});
    CHECK_FALSE(d.deactivations[0].success);
    CHECK(d.deactivations[0].cause == TerminationCause::process_failure);
    CHECK(d.deactivations[1].cause == TerminationCause::interrupted);
    CHECK(names(c, d.activations) == Names{"a2"});
    CHECK(d.failed_requests.empty());
  }
  SUBCASE("an interruption may restart the same behavior") {
    const auto d = co.handle_event(BehaviorFinished{a1, TerminationCause::interrupted});
    CHECK(names(c, d.deactivations) == Names{"a1"});
    CHECK(names(c, d.activations) == Names{"a1"});
  }
  SUBCASE("goal achieved retires the request") {
    const auto d = co.handle_event(BehaviorFinished{a1, TerminationCause::goal_achieved});
    CHECK(d.deactivations.size() == 2);
    CHECK(d.deactivations[0].success);
    CHECK(d.deactivations[0].priority == 1);
    CHECK(d.failed_requests.empty());
    CHECK(co.state().live_request(0) == nullptr);
  }
}

TEST_CASE("escalation lowers the floor until a solution exists") {
  const Catalog c = parse_catalog(kStack);
  Coordinator co(c, make_state(c));
  co.handle_event(StartRequest{0, 2});
  REQUIRE(co.state().current.running(1));
  const auto d = co.handle_event(BehaviorFinished{c.behavior_index("b1"), TerminationCause::process_failure});
  CHECK(d.solved);
  CHECK(names(c, d.deactivations) == Names{"a", "b1"});
  REQUIRE(d.failed_requests.size() == 1);
  CHECK(d.failed_requests[0].task == 0);
  // floor 0 keeps A and fails, floor 2 releases it
  CHECK(co.solve_times().size() == 3);
}

TEST_CASE("safety fallback cascades through broken requirements") {
  const Catalog c = parse_catalog(kStack);
  Coordinator co(c, make_state(c));
  co.handle_event(StartRequest{0, 5});
  co.handle_event(StartRequest{1, 1});
  const auto d = co.handle_event(BehaviorFinished{c.behavior_index("b1"), TerminationCause::process_failure});
  CHECK_FALSE(d.solved);
  CHECK(names(c, d.deactivations) == Names{"a", "b1"});
  CHECK(d.deactivations[0].cause == TerminationCause::interrupted);
  CHECK_FALSE(d.deactivations[0].success);
  CHECK(d.failed_requests.size() == 2);
  CHECK(co.state().current == Assignment(2));
}

TEST_CASE("reactive queue bookkeeping") {
  const Catalog c = fixtures::load_catalog("reactive/catalog.yaml");
  const auto sets = reactive_incompatibility_sets(c);
  CHECK(sets[0].empty());
  CHECK(sets[1] == std::vector<TaskIndex>{0});
  std::vector<ReactiveEntry> q;
  update_reactive_queue(q, sets, {}, {1}, milliseconds(100), milliseconds(500));
  REQUIRE(q.size() == 1);
  CHECK(q[0] == ReactiveEntry{0, milliseconds(600)});
  update_reactive_queue(q, sets, {}, {2}, milliseconds(300), milliseconds(500));
  REQUIRE(q.size() == 1);
  CHECK(q[0].due == milliseconds(800));
  update_reactive_queue(q, sets, {2}, {}, milliseconds(400), milliseconds(500));
  CHECK(q.empty());
}

TEST_CASE("reactive tasks start after the delay and yield to requests") {
  const Catalog c = fixtures::load_catalog("reactive/catalog.yaml");
  auto state = make_state(c);
  state.config.reactive_delay = milliseconds(500);
  Coordinator co(c, state);
  co.bootstrap();
  CHECK(co.next_reactive_due() == milliseconds(500));
  CHECK(co.run_cycle({}, milliseconds(100)).empty());
  auto out = co.run_cycle({}, milliseconds(500));
  REQUIRE(out.size() == 1);
  CHECK(out[0].reactive);
  CHECK(names(c, out[0].activations) == Names{"HoverPID"});
  CHECK(out[0].activations[0].priority == 0);

  out = co.run_cycle({StartRequest{1, 1}}, milliseconds(1000));
  REQUIRE(out.size() == 1);
  CHECK(names(c, out[0].deactivations) == Names{"HoverPID"});
  CHECK(out[0].failed_requests.empty());
  CHECK_FALSE(co.next_reactive_due());

  out = co.run_cycle({BehaviorFinished{c.behavior_index("PathFollowerMPC"), TerminationCause::goal_achieved}},
                     milliseconds(2000));
  CHECK(co.next_reactive_due() == milliseconds(2500));
  out = co.run_cycle({}, milliseconds(2500));
  REQUIRE(out.size() == 1);
  CHECK(names(c, out[0].activations) == Names{"HoverPID"});
}

TEST_CASE("the harness follows committed assignments") {
  const Catalog c = parse_catalog(fixtures::kMini);
  auto state = make_state(c);
  Coordinator co(c, state);
  BehaviorHarness bound(c, co.state().situation);
  co.attach(&bound);
  co.run_cycle({StartRequest{0, 1}}, milliseconds(0));
  CHECK(bound.active_behaviors() == co.state().current.active_behaviors());
  co.run_cycle({StopRequest{0}}, milliseconds(10));
  CHECK(bound.active_behaviors().empty());
}
