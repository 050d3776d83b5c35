#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string data(const char* rel) { return std::string(CBC_DATA_DIR) + "/" + rel; }

Run cbc(const std::string& args) {
  const std::string cmd = std::string(CBC_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_file(const char* name, const char* content) {
  const std::string path = std::string("/tmp/cbc_cli_test_") + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(cbc("check " + data("target_following/catalog.yaml")).code == 0);
  const auto bad = temp_file("bad.yaml", "tasks: [{name: A}]\nbehaviors: [{name: a, task: A, suitability: 1.3}]\n");
  const Run r = cbc("check " + bad);
  CHECK(r.code == 1);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  CHECK(cbc("check /nonexistent.yaml").code == 2);
  CHECK(cbc("check " + temp_file("broken.yaml", "tasks: [")).code == 2);
  const Run groups = cbc("check --components " + data("target_following/catalog.yaml"));
  CHECK(groups.code == 0);
  CHECK(groups.out.find("ApproachTarget") != std::string::npos);
}

TEST_CASE("solve") {
  const Run r = cbc("solve " + data("mini/catalog.yaml") + " --oracle start A -p 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("A = a1") != std::string::npos);
  CHECK(r.out.find("B = b1") != std::string::npos);
  CHECK(r.out.find("f = (1, 1,") != std::string::npos);

  CHECK(cbc("solve " + data("mini/catalog.yaml") + " stop A").code == 0);
  CHECK(cbc("solve " + data("mini/catalog.yaml") + " start Nope").code == 2);

  const auto infeasible = temp_file("infeasible.yaml", R"(
tasks: [{name: A, start_on_request: true}, {name: B}]
behaviors:
  - {name: a, task: A, suitability: 1.0, requires: [{task: B}]}
  - {name: b, task: B, suitability: 1.0, situation: [{key: ok, value: yes}]}
)");
  const Run none = cbc("solve " + infeasible + " start A");
  CHECK(none.code == 3);
  CHECK(none.out.find("no consistent configuration") != std::string::npos);
}

TEST_CASE("coordinate") {
  const std::string args =
      "coordinate " + data("target_following/catalog.yaml") + " " + data("target_following/scenario.yaml");
  const Run text = cbc(args + " --oracle");
  CHECK(text.code == 0);
  CHECK(text.out.find("MotionPlannerCloseTarget") != std::string::npos);
  const Run a = cbc(args + " --seed 7 --format jsonl");
  const Run b = cbc(args + " --seed 7 --format jsonl");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(cbc(args + " --format xml").code == 2);

  const auto unknown = temp_file("unknown.yaml", "script: [{at: 0, start_task: {task: Nope}}]\n");
  CHECK(cbc("coordinate " + data("target_following/catalog.yaml") + " " + unknown).code == 2);

  const auto empty = temp_file("empty.yaml", "script: []\n");
  const Run idle = cbc("coordinate " + data("reactive/catalog.yaml") + " " + empty + " --format jsonl");
  CHECK(idle.code == 0);
  CHECK(idle.out.find("HoverPID") != std::string::npos);
  CHECK(std::count(idle.out.begin(), idle.out.end(), '\n') == 1);
}

TEST_CASE("bench") {
  const std::string emitted = "/tmp/cbc_cli_test_bench.yaml";
  const Run r = cbc("bench --repeats 2 --emit " + emitted);
  CHECK(r.code == 0);
  CHECK(r.out.find("t(m=1) mean") != std::string::npos);
  CHECK(cbc("check " + emitted).code == 0);
  const Run tiny = cbc("bench --tasks 1 --layers 1 --behaviors 1 --repeats 1");
  CHECK(tiny.code == 0);
  CHECK(tiny.out.find("\ns 2\n") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cbc("").code == 2);
  CHECK(cbc("frobnicate").code == 2);
}
