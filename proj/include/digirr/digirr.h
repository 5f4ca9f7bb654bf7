/* digirr: digital irrigation site simulator and control plane, C API.
 *
 * Every function returns a digirr_status. On failure a message is available
 * from digirr_last_error() on the calling thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * digirr_string_free().
 */
#ifndef DIGIRR_DIGIRR_H
#define DIGIRR_DIGIRR_H

#include <stddef.h>
#include <stdint.h>

#if defined(DIGIRR_BUILDING_LIBRARY)
#define DIGIRR_API __attribute__((visibility("default")))
#else
#define DIGIRR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum digirr_status {
  DIGIRR_OK = 0,
  DIGIRR_E_CONFIG = 1,          /* bad or unreadable configuration */
  DIGIRR_E_RANGE = 2,
  DIGIRR_E_VALIDATION = 3,      /* rejected input */
  DIGIRR_E_AUTH = 4,
  DIGIRR_E_SESSION_EXPIRED = 5,
  DIGIRR_E_LOCKED_OUT = 6,
  DIGIRR_E_NOT_FOUND = 7,
  DIGIRR_E_IO = 8,              /* files, sockets, busy port */
  DIGIRR_E_PARSE = 9,           /* malformed data file */
  DIGIRR_E_ARGUMENT = 10,       /* null or out-of-domain argument */
  DIGIRR_E_INTERNAL = 11
} digirr_status;

DIGIRR_API const char* digirr_version(void);
DIGIRR_API const char* digirr_status_name(digirr_status status);
DIGIRR_API const char* digirr_last_error(void);
DIGIRR_API void digirr_string_free(char* s);

/* ---- batch runs ---------------------------------------------------------- */

typedef struct digirr_run_options {
  const char* config_path;    /* scenario YAML; or */
  const char* manifest_path;  /* replay a previous run's manifest.json */
  const char* out_dir;        /* required */
  int has_seed;
  uint64_t seed;
  int has_duration;
  double duration;            /* sim s */
  double accel;               /* sim s per wall s, 0 = full speed */
} digirr_run_options;

/* Writes the run artifacts into out_dir; *result_json (optional) receives
 * {"manifest","seed","ticks","wall_seconds","artifacts","warnings"}. */
DIGIRR_API digirr_status digirr_run(const digirr_run_options* options, char** result_json);

/* ---- stepped scenario ---------------------------------------------------- */

typedef struct digirr_scenario digirr_scenario;

/* yaml_text may be used instead of a path (config_path NULL). */
DIGIRR_API digirr_status digirr_scenario_open(const char* config_path, const char* yaml_text, int has_seed,
                                              uint64_t seed, digirr_scenario** out);
DIGIRR_API void digirr_scenario_close(digirr_scenario* scenario);
DIGIRR_API double digirr_scenario_time(const digirr_scenario* scenario);
DIGIRR_API digirr_status digirr_scenario_run_until(digirr_scenario* scenario, double t_end);
/* duration_s < 0 means "none"; target may be NULL. */
DIGIRR_API digirr_status digirr_scenario_issue(digirr_scenario* scenario, const char* device, const char* command,
                                               double duration_s, const char* target, uint64_t* command_id);
DIGIRR_API digirr_status digirr_scenario_status_table(digirr_scenario* scenario, char** json);
DIGIRR_API digirr_status digirr_scenario_control_table(digirr_scenario* scenario, char** json);
DIGIRR_API digirr_status digirr_scenario_commands(digirr_scenario* scenario, char** json);
/* {"deep_well_pump":true|false,...} as the field controller currently drives them. */
DIGIRR_API digirr_status digirr_scenario_actuators(digirr_scenario* scenario, char** json);

/* ---- HTTP service -------------------------------------------------------- */

typedef struct digirr_service digirr_service;

/* Binds immediately. port < 0 keeps the configured port, 0 picks a free one.
 * A taken port fails with DIGIRR_E_IO. */
DIGIRR_API digirr_status digirr_service_open(const char* config_path, int port, double accel,
                                             digirr_service** out);
DIGIRR_API int digirr_service_port(const digirr_service* service);
/* Newline-separated startup warnings, or an empty string. */
DIGIRR_API digirr_status digirr_service_warnings(const digirr_service* service, char** text);
/* Blocks until digirr_service_stop(). */
DIGIRR_API digirr_status digirr_service_run(digirr_service* service);
/* Thread-safe; not async-signal-safe. */
DIGIRR_API void digirr_service_stop(digirr_service* service);
DIGIRR_API void digirr_service_close(digirr_service* service);

/* Appends or replaces a user in a credentials file. role: operator | admin. */
DIGIRR_API digirr_status digirr_user_add(const char* credentials_path, const char* name, const char* password,
                                         const char* role);

/* ---- analysis ------------------------------------------------------------ */

/* Seasonal summary of a history CSV; writes out_csv and out_meta_csv. */
DIGIRR_API digirr_status digirr_analyze_summary(const char* history_csv, const char* out_csv,
                                                const char* out_meta_csv);
/* Ranks the crops in crops_yaml against the history; writes rank,crop,score. */
DIGIRR_API digirr_status digirr_analyze_suitability(const char* history_csv, const char* crops_yaml,
                                                    const char* out_csv);
/* Cash-flow and expenditure series. finance_yaml may be NULL for defaults.
 * *summary_json (optional) receives break_even_year and the multiple. */
DIGIRR_API digirr_status digirr_analyze_finance(const char* finance_yaml, const char* out_cash_flow_csv,
                                                const char* out_expenditure_csv, char** summary_json);

/* ---- frames -------------------------------------------------------------- */

/* Human-readable decode of a hex frame (spaces allowed). */
DIGIRR_API digirr_status digirr_frame_describe(const char* hex, char** text);
DIGIRR_API digirr_status digirr_frame_encode(uint8_t node_id, uint8_t sensor_kind, uint16_t seq, float value,
                                             uint8_t flags, char** hex);

#ifdef __cplusplus
}
#endif

#endif /* DIGIRR_DIGIRR_H */
