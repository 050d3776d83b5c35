// cbc: command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cbc/cbc.h"

namespace {

enum Exit { kOk = 0, kViolations = 1, kInput = 2, kNoSolution = 3, kMismatch = 4, kInternal = 5 };

struct Text {
  char* p = nullptr;
  ~Text() { cbc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct CatalogHandle {
  cbc_catalog* p = nullptr;
  ~CatalogHandle() { cbc_catalog_free(p); }
};

int exit_for(cbc_status s) {
  switch (s) {
    case CBC_OK: return kOk;
    case CBC_ERR_NO_SOLUTION: return kNoSolution;
    case CBC_ERR_ORACLE_MISMATCH: return kMismatch;
    case CBC_ERR_INTERNAL: return kInternal;
    default: return kInput;
  }
}

int report_error(cbc_status s) {
  std::cerr << "error: " << cbc_status_name(s);
  if (*cbc_last_error()) std::cerr << ": " << cbc_last_error();
  std::cerr << "\n";
  return exit_for(s);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("COORD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring malformed COORD_SEED '" << env << "'\n";
    }
  }
  return 0;
}

struct SolverOptions {
  std::uint64_t seed = default_seed();
  std::uint32_t max_solutions = 10;
  double max_time_ms = 50.0;
  std::uint64_t delta_ms = 500;
  bool oracle = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Random seed (default: $COORD_SEED or 0)");
    cmd->add_option("--max-solutions", max_solutions, "Solutions compared per solve")->check(CLI::PositiveNumber);
    cmd->add_option("--max-time-ms", max_time_ms, "Search budget per solve, in ms")->check(CLI::PositiveNumber);
    cmd->add_flag("--oracle", oracle, "Cross-check every solve against brute-force enumeration");
  }

  cbc_solver_config config() const {
    cbc_solver_config c;
    cbc_solver_config_default(&c);
    c.seed = seed;
    c.max_solutions = max_solutions;
    c.max_search_time_us = static_cast<std::uint64_t>(max_time_ms * 1000.0);
    if (c.max_search_time_us == 0) c.max_search_time_us = 1;
    c.reactive_delay_ms = delta_ms;
    return c;
  }
};

int cmd_check(const std::string& path, bool components) {
  Text report;
  std::size_t count = 0;
  if (auto s = cbc_check_file(path.c_str(), &report.p, &count); s != CBC_OK) return report_error(s);
  std::cout << report.str();
  if (count > 0) return kViolations;
  if (components) {
    CatalogHandle catalog;
    if (auto s = cbc_catalog_load(path.c_str(), &catalog.p); s != CBC_OK) return report_error(s);
    Text groups;
    if (auto s = cbc_catalog_components(catalog.p, &groups.p); s != CBC_OK) return report_error(s);
    std::cout << groups.str();
  }
  return kOk;
}

int cmd_solve(const std::string& catalog_path, const std::string& state_path, cbc_trigger trigger,
              const SolverOptions& opts) {
  CatalogHandle catalog;
  if (auto s = cbc_catalog_load(catalog_path.c_str(), &catalog.p); s != CBC_OK) return report_error(s);
  std::string state;
  if (!state_path.empty() && !read_file(state_path, state)) {
    std::cerr << "error: cannot open " << state_path << "\n";
    return kInput;
  }
  const cbc_solver_config config = opts.config();
  Text report;
  const cbc_status s = cbc_solve(catalog.p, state.c_str(), &trigger, &config, opts.oracle ? CBC_FLAG_ORACLE : 0u,
                                 &report.p);
  std::cout << report.str();
  if (s != CBC_OK) return report_error(s);
  return kOk;
}

int cmd_coordinate(const std::string& catalog_path, const std::string& scenario_path, const std::string& format,
                   const SolverOptions& opts) {
  CatalogHandle catalog;
  if (auto s = cbc_catalog_load(catalog_path.c_str(), &catalog.p); s != CBC_OK) return report_error(s);
  std::string scenario;
  if (!read_file(scenario_path, scenario)) {
    std::cerr << "error: cannot open " << scenario_path << "\n";
    return kInput;
  }
  const cbc_solver_config config = opts.config();
  Text trace, summary;
  const cbc_status s = cbc_replay(catalog.p, scenario.c_str(), &config,
                                  format == "jsonl" ? CBC_FORMAT_JSONL : CBC_FORMAT_TEXT,
                                  opts.oracle ? CBC_FLAG_ORACLE : 0u, &trace.p, &summary.p);
  std::cout << trace.str();
  std::cerr << summary.str();
  if (s != CBC_OK) return report_error(s);
  return kOk;
}

struct BenchOptions {
  cbc_bench_params params{};
  std::uint32_t repeats = 20;
  std::string emit;
  std::string catalog;
};

int cmd_bench(const BenchOptions& opts) {
  CatalogHandle catalog;
  if (!opts.catalog.empty()) {
    if (auto s = cbc_catalog_load(opts.catalog.c_str(), &catalog.p); s != CBC_OK) return report_error(s);
  } else {
    Text yaml;
    if (auto s = cbc_bench_generate(&opts.params, &yaml.p); s != CBC_OK) return report_error(s);
    if (!opts.emit.empty()) {
      std::ofstream out(opts.emit, std::ios::binary);
      if (!(out << yaml.str())) {
        std::cerr << "error: cannot write " << opts.emit << "\n";
        return kInput;
      }
    }
    const std::string text = yaml.str();
    if (auto s = cbc_catalog_parse(text.data(), text.size(), &catalog.p); s != CBC_OK) return report_error(s);
  }
  Text report;
  if (auto s = cbc_bench_run(catalog.p, opts.repeats, opts.params.seed, &report.p); s != CBC_OK) {
    return report_error(s);
  }
  std::cout << report.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior coordination by constraint-based configuration"};
  app.require_subcommand(1);

  std::string catalog_path, aux_path, format = "text";
  bool components = false;

  auto* check = app.add_subcommand("check", "Validate a catalog file");
  check->add_option("catalog", catalog_path, "Catalog YAML")->required();
  check->add_flag("--components", components, "Also print the independent task groups");

  SolverOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Run one coordination step from a state snapshot");
  solve->add_option("catalog", catalog_path, "Catalog YAML")->required();
  solve->add_option("--state", aux_path, "State snapshot YAML (default: nothing running)");
  solve_opts.add_to(solve);
  solve->require_subcommand(1);
  std::string trigger_name, cause;
  std::uint32_t priority = 0;
  auto* t_start = solve->add_subcommand("start", "Request a task");
  t_start->add_option("task", trigger_name)->required();
  t_start->add_option("--priority,-p", priority, "Request priority");
  auto* t_stop = solve->add_subcommand("stop", "Withdraw a task request");
  t_stop->add_option("task", trigger_name)->required();
  auto* t_finished = solve->add_subcommand("finished", "Report a behavior termination");
  t_finished->add_option("behavior", trigger_name)->required();
  t_finished->add_option("--cause", cause, "GOAL_ACHIEVED, TIME_OUT, WRONG_PROGRESS, SITUATION_CHANGE, "
                                           "PROCESS_FAILURE or INTERRUPTED")
      ->required();

  SolverOptions coord_opts;
  auto* coordinate = app.add_subcommand("coordinate", "Replay a scenario and print the activation trace");
  coordinate->add_option("catalog", catalog_path, "Catalog YAML")->required();
  coordinate->add_option("scenario", aux_path, "Scenario YAML")->required();
  coord_opts.add_to(coordinate);
  coordinate->add_option("--delta-ms", coord_opts.delta_ms, "Reactive start delay")->check(CLI::PositiveNumber);
  coordinate->add_option("--format", format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));

  BenchOptions bench_opts;
  cbc_bench_params_default(&bench_opts.params);
  auto* bench = app.add_subcommand("bench", "Time the solver on a synthetic layered catalog");
  bench->add_option("--tasks", bench_opts.params.tasks)->check(CLI::PositiveNumber);
  bench->add_option("--layers", bench_opts.params.layers)->check(CLI::PositiveNumber);
  bench->add_option("--behaviors", bench_opts.params.behaviors_per_task, "Behaviors per task")
      ->check(CLI::Range(1, 63));
  bench->add_option("--requires", bench_opts.params.requires_per_behavior, "Requirements per behavior");
  bench->add_option("--density", bench_opts.params.incompat_density, "Incompatible fraction of task pairs")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seed", bench_opts.params.seed);
  bench->add_option("--repeats", bench_opts.repeats)->check(CLI::PositiveNumber);
  bench->add_option("--emit", bench_opts.emit, "Write the generated catalog here");
  bench->add_option("--catalog", bench_opts.catalog, "Time an existing catalog instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (check->parsed()) return cmd_check(catalog_path, components);
  if (solve->parsed()) {
    cbc_trigger trigger{CBC_TRIGGER_START, nullptr, 0, nullptr};
    if (t_stop->parsed()) trigger.kind = CBC_TRIGGER_STOP;
    if (t_finished->parsed()) {
      trigger.kind = CBC_TRIGGER_FINISHED;
      trigger.cause = cause.c_str();
    }
    trigger.name = trigger_name.c_str();
    trigger.priority = priority;
    return cmd_solve(catalog_path, aux_path, trigger, solve_opts);
  }
  if (coordinate->parsed()) return cmd_coordinate(catalog_path, aux_path, format, coord_opts);
  return cmd_bench(bench_opts);
}
