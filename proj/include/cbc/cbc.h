/* C interface of the behavior coordination engine.
 *
 * Handles are opaque. Every call returns a cbc_status; on failure
 * cbc_last_error() describes the problem for the calling thread. Strings
 * returned through char** are owned by the caller and released with
 * cbc_string_free. A catalog must outlive the sessions created from it. */
#ifndef CBC_H
#define CBC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CBC_BUILDING)
#define CBC_API __declspec(dllexport)
#else
#define CBC_API __declspec(dllimport)
#endif
#else
#define CBC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbc_status {
  CBC_OK = 0,
  CBC_ERR_INVALID_ARGUMENT = 1,
  CBC_ERR_IO = 2,
  CBC_ERR_PARSE = 3,
  CBC_ERR_INVALID_CATALOG = 4,
  CBC_ERR_UNKNOWN_NAME = 5,
  CBC_ERR_NO_SOLUTION = 6,
  CBC_ERR_ORACLE_MISMATCH = 7,
  CBC_ERR_LIMIT = 8,
  CBC_ERR_INTERNAL = 9
} cbc_status;

typedef enum cbc_format { CBC_FORMAT_TEXT = 0, CBC_FORMAT_JSONL = 1 } cbc_format;

typedef enum cbc_trigger_kind {
  CBC_TRIGGER_START = 0,
  CBC_TRIGGER_STOP = 1,
  CBC_TRIGGER_FINISHED = 2
} cbc_trigger_kind;

/* Cross-check every solve against the brute-force oracle. */
#define CBC_FLAG_ORACLE 0x1u

typedef struct cbc_catalog cbc_catalog;
typedef struct cbc_session cbc_session;

typedef struct cbc_solver_config {
  uint32_t max_solutions;      /* >= 1, default 10 */
  uint64_t max_search_time_us; /* > 0, default 50000 */
  uint64_t seed;               /* default 0 */
  uint64_t reactive_delay_ms;  /* > 0, default 500 */
} cbc_solver_config;

typedef struct cbc_trigger {
  cbc_trigger_kind kind;
  const char* name;  /* task for start/stop, behavior for finished */
  uint32_t priority; /* start only */
  const char* cause; /* finished only, e.g. "PROCESS_FAILURE" */
} cbc_trigger;

typedef struct cbc_bench_params {
  uint32_t tasks;
  uint32_t layers;
  uint32_t behaviors_per_task;
  uint32_t requires_per_behavior;
  double incompat_density;
  uint64_t seed;
} cbc_bench_params;

CBC_API const char* cbc_last_error(void);
CBC_API const char* cbc_status_name(cbc_status status);
CBC_API void cbc_string_free(char* s);

CBC_API void cbc_solver_config_default(cbc_solver_config* config);
CBC_API void cbc_bench_params_default(cbc_bench_params* params);

CBC_API cbc_status cbc_catalog_parse(const char* yaml, size_t length, cbc_catalog** out);
CBC_API cbc_status cbc_catalog_load(const char* path, cbc_catalog** out);
CBC_API void cbc_catalog_free(cbc_catalog* catalog);
CBC_API size_t cbc_catalog_task_count(const cbc_catalog* catalog);
CBC_API size_t cbc_catalog_behavior_count(const cbc_catalog* catalog);
CBC_API cbc_status cbc_catalog_serialize(const cbc_catalog* catalog, char** yaml);
/* One line per connected group, task names separated by spaces. */
CBC_API cbc_status cbc_catalog_components(const cbc_catalog* catalog, char** text);

/* Validates a catalog file without indexing it. Violations are data: the
 * call succeeds with *violation_count > 0 and one violation per line in
 * *report. Unreadable or malformed files return IO/PARSE. */
CBC_API cbc_status cbc_check_file(const char* path, char** report, size_t* violation_count);

/* One coordination step from a state snapshot (YAML, may be NULL for the
 * empty state). *report is filled even when the result is NO_SOLUTION or
 * ORACLE_MISMATCH. */
CBC_API cbc_status cbc_solve(const cbc_catalog* catalog, const char* state_yaml, const cbc_trigger* trigger,
                             const cbc_solver_config* config, unsigned flags, char** report);

/* Replays a scenario. The trace goes to *trace, the counts and solve timings
 * to *summary. Returns ORACLE_MISMATCH when a cross-check failed. */
CBC_API cbc_status cbc_replay(const cbc_catalog* catalog, const char* scenario_yaml, const cbc_solver_config* config,
                              cbc_format format, unsigned flags, char** trace, char** summary);

/* Incremental use: queue events, then advance the clock to run a cycle. */
CBC_API cbc_status cbc_session_create(const cbc_catalog* catalog, const cbc_solver_config* config,
                                      cbc_session** out);
CBC_API void cbc_session_free(cbc_session* session);
CBC_API cbc_status cbc_session_start(cbc_session* session, const char* task, uint32_t priority);
CBC_API cbc_status cbc_session_stop(cbc_session* session, const char* task);
CBC_API cbc_status cbc_session_finished(cbc_session* session, const char* behavior, const char* cause);
CBC_API cbc_status cbc_session_set_situation(cbc_session* session, const char* key, const char* value);
/* Runs one cycle at now_ms (must not go backwards) with the queued events. */
CBC_API cbc_status cbc_session_advance(cbc_session* session, int64_t now_ms);
/* Active behaviors, one per line, in task order. */
CBC_API cbc_status cbc_session_active(const cbc_session* session, char** text);
/* Trace lines produced since the previous drain. */
CBC_API cbc_status cbc_session_drain_trace(cbc_session* session, cbc_format format, char** text);

CBC_API cbc_status cbc_bench_generate(const cbc_bench_params* params, char** catalog_yaml);
CBC_API cbc_status cbc_bench_run(const cbc_catalog* catalog, uint32_t repeats, uint64_t seed, char** report);

#ifdef __cplusplus
}
#endif

#endif
