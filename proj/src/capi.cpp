#include "cbc/cbc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "cbc/bench.hpp"
#include "cbc/errors.hpp"
#include "cbc/mission.hpp"
#include "cbc/oneshot.hpp"

struct cbc_catalog {
  cbc::Catalog catalog;
};

struct cbc_session {
  const cbc::Catalog* catalog;
  std::unique_ptr<cbc::Coordinator> coordinator;
  std::unique_ptr<cbc::BehaviorHarness> harness;
  std::vector<cbc::Trigger> pending;
  std::vector<cbc::TraceLine> trace;
};

namespace {

thread_local std::string last_error;

cbc_status fail(cbc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Maps the exception in flight to a status.
cbc_status translate() {
  try {
    throw;
  } catch (const cbc::ParseError& e) {
    return fail(CBC_ERR_PARSE, e.what());
  } catch (const cbc::CatalogError& e) {
    return fail(CBC_ERR_INVALID_CATALOG, e.what());
  } catch (const cbc::UnknownNameError& e) {
    return fail(CBC_ERR_UNKNOWN_NAME, e.what());
  } catch (const cbc::IoError& e) {
    return fail(CBC_ERR_IO, e.what());
  } catch (const cbc::LimitError& e) {
    return fail(CBC_ERR_LIMIT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CBC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CBC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CBC_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
cbc_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (...) {
    return translate();
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cbc::IoError(std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw cbc::IoError(std::string("cannot read ") + path);
  return ss.str();
}

cbc::SolverConfig to_config(const cbc_solver_config* c) {
  cbc::SolverConfig config;
  if (!c) return config;
  if (c->max_solutions == 0) throw std::invalid_argument("max_solutions must be at least 1");
  if (c->max_search_time_us == 0) throw std::invalid_argument("max_search_time must be positive");
  if (c->reactive_delay_ms == 0) throw std::invalid_argument("reactive delay must be positive");
  config.max_solutions = c->max_solutions;
  config.max_search_time = std::chrono::microseconds(c->max_search_time_us);
  config.seed = c->seed;
  config.reactive_delay = cbc::SimTime(c->reactive_delay_ms);
  return config;
}

cbc::TerminationCause to_cause(const char* cause) {
  if (!cause) throw std::invalid_argument("termination cause is required");
  auto c = cbc::parse_termination_cause(cause);
  if (!c) throw std::invalid_argument(std::string("unknown termination cause '") + cause + "'");
  return *c;
}

cbc::Trigger to_trigger(const cbc::Catalog& catalog, const cbc_trigger& t) {
  if (!t.name) throw std::invalid_argument("trigger name is required");
  switch (t.kind) {
    case CBC_TRIGGER_START:
      return cbc::StartRequest{catalog.task_index(t.name), t.priority};
    case CBC_TRIGGER_STOP:
      return cbc::StopRequest{catalog.task_index(t.name)};
    case CBC_TRIGGER_FINISHED:
      return cbc::BehaviorFinished{catalog.behavior_index(t.name), to_cause(t.cause)};
  }
  throw std::invalid_argument("unknown trigger kind");
}

std::string render(const std::vector<cbc::TraceLine>& trace, cbc_format format) {
  return format == CBC_FORMAT_JSONL ? cbc::render_jsonl(trace) : cbc::render_text(trace);
}

}  // namespace

#define CBC_REQUIRE(cond, what) \
  if (!(cond)) return fail(CBC_ERR_INVALID_ARGUMENT, what)

extern "C" {

const char* cbc_last_error(void) { return last_error.c_str(); }

const char* cbc_status_name(cbc_status status) {
  switch (status) {
    case CBC_OK: return "ok";
    case CBC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CBC_ERR_IO: return "i/o error";
    case CBC_ERR_PARSE: return "parse error";
    case CBC_ERR_INVALID_CATALOG: return "invalid catalog";
    case CBC_ERR_UNKNOWN_NAME: return "unknown name";
    case CBC_ERR_NO_SOLUTION: return "no consistent configuration";
    case CBC_ERR_ORACLE_MISMATCH: return "oracle mismatch";
    case CBC_ERR_LIMIT: return "limit exceeded";
    case CBC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void cbc_string_free(char* s) { std::free(s); }

void cbc_solver_config_default(cbc_solver_config* config) {
  if (!config) return;
  const cbc::SolverConfig d;
  config->max_solutions = static_cast<uint32_t>(d.max_solutions);
  config->max_search_time_us = static_cast<uint64_t>(d.max_search_time.count());
  config->seed = d.seed;
  config->reactive_delay_ms = static_cast<uint64_t>(d.reactive_delay.count());
}

void cbc_bench_params_default(cbc_bench_params* params) {
  if (!params) return;
  const cbc::BenchParams d;
  params->tasks = static_cast<uint32_t>(d.tasks);
  params->layers = static_cast<uint32_t>(d.layers);
  params->behaviors_per_task = static_cast<uint32_t>(d.behaviors_per_task);
  params->requires_per_behavior = static_cast<uint32_t>(d.requires_per_behavior);
  params->incompat_density = d.incompat_density;
  params->seed = d.seed;
}

cbc_status cbc_catalog_parse(const char* yaml, size_t length, cbc_catalog** out) {
  CBC_REQUIRE(out, "out is null");
  CBC_REQUIRE(yaml || length == 0, "yaml is null");
  *out = nullptr;
  return guarded([&] {
    *out = new cbc_catalog{cbc::parse_catalog(std::string_view(yaml ? yaml : "", length))};
    return CBC_OK;
  });
}

cbc_status cbc_catalog_load(const char* path, cbc_catalog** out) {
  CBC_REQUIRE(path && out, "path or out is null");
  *out = nullptr;
  return guarded([&] {
    *out = new cbc_catalog{cbc::parse_catalog(read_file(path))};
    return CBC_OK;
  });
}

void cbc_catalog_free(cbc_catalog* catalog) { delete catalog; }

size_t cbc_catalog_task_count(const cbc_catalog* catalog) { return catalog ? catalog->catalog.task_count() : 0; }

size_t cbc_catalog_behavior_count(const cbc_catalog* catalog) {
  return catalog ? catalog->catalog.behavior_count() : 0;
}

cbc_status cbc_catalog_serialize(const cbc_catalog* catalog, char** yaml) {
  CBC_REQUIRE(catalog && yaml, "catalog or out is null");
  return guarded([&] {
    *yaml = dup(cbc::serialize_catalog(catalog->catalog.spec()));
    return CBC_OK;
  });
}

cbc_status cbc_catalog_components(const cbc_catalog* catalog, char** text) {
  CBC_REQUIRE(catalog && text, "catalog or out is null");
  return guarded([&] {
    std::string out;
    for (const auto& group : cbc::connected_components(catalog->catalog)) {
      for (std::size_t i = 0; i < group.size(); ++i) out += (i ? " " : "") + group[i];
      out += '\n';
    }
    *text = dup(out);
    return CBC_OK;
  });
}

cbc_status cbc_check_file(const char* path, char** report, size_t* violation_count) {
  CBC_REQUIRE(path && report && violation_count, "null argument");
  *report = nullptr;
  *violation_count = 0;
  return guarded([&] {
    const auto result = cbc::validate_catalog(cbc::parse_catalog_spec(read_file(path)));
    std::string out;
    for (const auto& v : result.violations) out += v + "\n";
    *report = dup(out);
    *violation_count = result.violations.size();
    return CBC_OK;
  });
}

cbc_status cbc_solve(const cbc_catalog* catalog, const char* state_yaml, const cbc_trigger* trigger,
                     const cbc_solver_config* config, unsigned flags, char** report) {
  CBC_REQUIRE(catalog && trigger && report, "null argument");
  *report = nullptr;
  return guarded([&] {
    const cbc::Catalog& c = catalog->catalog;
    cbc::SolverConfig cfg;
    try {
      cfg = to_config(config);
    } catch (const std::invalid_argument& e) {
      return fail(CBC_ERR_INVALID_ARGUMENT, e.what());
    }
    cbc::Trigger t;
    try {
      t = to_trigger(c, *trigger);
    } catch (const std::invalid_argument& e) {
      return fail(CBC_ERR_INVALID_ARGUMENT, e.what());
    }
    auto state = cbc::parse_state(state_yaml ? state_yaml : "", c, cfg);
    const auto result = cbc::solve_once(c, std::move(state), t, (flags & CBC_FLAG_ORACLE) != 0);
    *report = dup(cbc::render_one_shot(c, result));
    if (result.oracle_mismatch) return fail(CBC_ERR_ORACLE_MISMATCH, *result.oracle_mismatch);
    if (!result.delta.solved) return fail(CBC_ERR_NO_SOLUTION, "no consistent configuration");
    return CBC_OK;
  });
}

cbc_status cbc_replay(const cbc_catalog* catalog, const char* scenario_yaml, const cbc_solver_config* config,
                      cbc_format format, unsigned flags, char** trace, char** summary) {
  CBC_REQUIRE(catalog && scenario_yaml && trace && summary, "null argument");
  *trace = nullptr;
  *summary = nullptr;
  return guarded([&] {
    cbc::ReplayOptions options;
    try {
      options.config = to_config(config);
    } catch (const std::invalid_argument& e) {
      return fail(CBC_ERR_INVALID_ARGUMENT, e.what());
    }
    options.oracle = (flags & CBC_FLAG_ORACLE) != 0;
    const auto scenario = cbc::parse_scenario(scenario_yaml, catalog->catalog);
    const auto result = cbc::replay_scenario(catalog->catalog, scenario, options);
    *trace = dup(render(result.trace, format));
    *summary = dup(cbc::render_summary(result.summary));
    if (!result.summary.consistency_violations.empty()) {
      return fail(CBC_ERR_INTERNAL, result.summary.consistency_violations.front());
    }
    if (!result.summary.oracle_mismatches.empty()) {
      return fail(CBC_ERR_ORACLE_MISMATCH, result.summary.oracle_mismatches.front());
    }
    return CBC_OK;
  });
}

cbc_status cbc_session_create(const cbc_catalog* catalog, const cbc_solver_config* config, cbc_session** out) {
  CBC_REQUIRE(catalog && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    cbc::SolverConfig cfg;
    try {
      cfg = to_config(config);
    } catch (const std::invalid_argument& e) {
      return fail(CBC_ERR_INVALID_ARGUMENT, e.what());
    }
    auto s = std::make_unique<cbc_session>();
    s->catalog = &catalog->catalog;
    s->coordinator = std::make_unique<cbc::Coordinator>(catalog->catalog, cbc::make_state(catalog->catalog, cfg));
    s->harness = std::make_unique<cbc::BehaviorHarness>(catalog->catalog, s->coordinator->state().situation);
    s->coordinator->attach(s->harness.get());
    s->coordinator->bootstrap();
    *out = s.release();
    return CBC_OK;
  });
}

void cbc_session_free(cbc_session* session) { delete session; }

cbc_status cbc_session_start(cbc_session* session, const char* task, uint32_t priority) {
  CBC_REQUIRE(session && task, "null argument");
  return guarded([&] {
    session->pending.push_back(cbc::StartRequest{session->catalog->task_index(task), priority});
    return CBC_OK;
  });
}

cbc_status cbc_session_stop(cbc_session* session, const char* task) {
  CBC_REQUIRE(session && task, "null argument");
  return guarded([&] {
    session->pending.push_back(cbc::StopRequest{session->catalog->task_index(task)});
    return CBC_OK;
  });
}

cbc_status cbc_session_finished(cbc_session* session, const char* behavior, const char* cause) {
  CBC_REQUIRE(session && behavior && cause, "null argument");
  return guarded([&] {
    const auto c = cbc::parse_termination_cause(cause);
    if (!c) return fail(CBC_ERR_INVALID_ARGUMENT, std::string("unknown termination cause '") + cause + "'");
    const cbc::ScenarioEvent ev{session->coordinator->state().clock,
                                cbc::FinishBehavior{session->catalog->behavior_index(behavior), *c}};
    for (auto& t : session->harness->apply_scenario_event(ev, ev.at)) session->pending.push_back(t);
    return CBC_OK;
  });
}

cbc_status cbc_session_set_situation(cbc_session* session, const char* key, const char* value) {
  CBC_REQUIRE(session && key && value, "null argument");
  return guarded([&] {
    const cbc::ScenarioEvent ev{session->coordinator->state().clock, cbc::SetSituation{key, value}};
    for (auto& t : session->harness->apply_scenario_event(ev, ev.at)) session->pending.push_back(t);
    return CBC_OK;
  });
}

cbc_status cbc_session_advance(cbc_session* session, int64_t now_ms) {
  CBC_REQUIRE(session, "session is null");
  CBC_REQUIRE(cbc::SimTime(now_ms) >= session->coordinator->state().clock, "time must not go backwards");
  return guarded([&] {
    auto events = std::move(session->pending);
    session->pending.clear();
    for (const auto& d : session->coordinator->run_cycle(events, cbc::SimTime(now_ms))) {
      for (auto& l : cbc::trace_lines(*session->catalog, d)) session->trace.push_back(std::move(l));
    }
    return CBC_OK;
  });
}

cbc_status cbc_session_active(const cbc_session* session, char** text) {
  CBC_REQUIRE(session && text, "null argument");
  return guarded([&] {
    std::string out;
    for (auto b : session->coordinator->state().current.active_behaviors()) {
      out += session->catalog->behavior_name(b) + "\n";
    }
    *text = dup(out);
    return CBC_OK;
  });
}

cbc_status cbc_session_drain_trace(cbc_session* session, cbc_format format, char** text) {
  CBC_REQUIRE(session && text, "null argument");
  return guarded([&] {
    *text = dup(session->trace.empty() ? std::string() : render(session->trace, format));
    session->trace.clear();
    return CBC_OK;
  });
}

cbc_status cbc_bench_generate(const cbc_bench_params* params, char** catalog_yaml) {
  CBC_REQUIRE(params && catalog_yaml, "null argument");
  CBC_REQUIRE(params->tasks > 0 && params->layers > 0 && params->behaviors_per_task > 0,
              "tasks, layers and behaviors per task must be positive");
  CBC_REQUIRE(params->incompat_density >= 0 && params->incompat_density <= 1, "density must lie in [0,1]");
  return guarded([&] {
    cbc::BenchParams p;
    p.tasks = params->tasks;
    p.layers = params->layers;
    p.behaviors_per_task = params->behaviors_per_task;
    p.requires_per_behavior = params->requires_per_behavior;
    p.incompat_density = params->incompat_density;
    p.seed = params->seed;
    *catalog_yaml = dup(cbc::serialize_catalog(cbc::generate_catalog(p)));
    return CBC_OK;
  });
}

cbc_status cbc_bench_run(const cbc_catalog* catalog, uint32_t repeats, uint64_t seed, char** report) {
  CBC_REQUIRE(catalog && report, "null argument");
  CBC_REQUIRE(repeats > 0, "repeats must be positive");
  return guarded([&] {
    *report = dup(cbc::render_bench(cbc::run_bench(catalog->catalog, repeats, seed)));
    return CBC_OK;
  });
}

}  // extern "C"
