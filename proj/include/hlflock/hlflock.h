/* C interface to the hlflock simulator. All functions return an hlf_status;
 * on failure hlf_last_error() holds a message for the calling thread. */
#ifndef HLFLOCK_H
#define HLFLOCK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HLF_API __declspec(dllexport)
#else
#define HLF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hlf_status {
  HLF_OK = 0,
  HLF_INVALID_ARGUMENT,
  HLF_INVALID_GRAPH,
  HLF_NEGATIVE_DISTANCE,
  HLF_QUADRATURE_FAILURE,
  HLF_MISALIGNED_DELAY,
  HLF_EMPTY_HORIZON,
  HLF_OUT_OF_WINDOW,
  HLF_NON_FINITE_STATE,
  HLF_HISTORY_EXHAUSTED,
  HLF_OFFSET_UNAVAILABLE,
  HLF_INSUFFICIENT_DATA,
  HLF_NON_POSITIVE_SAMPLES,
  HLF_CONFIG_ERROR,
  HLF_IO_ERROR,
  HLF_INTERNAL_ERROR
} hlf_status;

typedef struct hlf_config hlf_config;
typedef struct hlf_run hlf_run;

/* Receives one line of text (no trailing newline). */
typedef void (*hlf_line_fn)(const char* line, void* user);

typedef struct hlf_verdict {
  int flocking;
  int x_bounded;
  int v_decayed;
  double v_ratio;
  int has_exponential;
  double exponential_rate;
  double exponential_residual;
  int has_power;
  double power_rate;
  double power_residual;
} hlf_verdict;

HLF_API const char* hlf_version(void);
HLF_API const char* hlf_status_name(hlf_status status);
HLF_API const char* hlf_last_error(void);

/* Strings returned through char** are owned by the caller. */
HLF_API void hlf_string_free(char* s);

HLF_API hlf_status hlf_config_load_file(const char* path, hlf_config** out);
HLF_API hlf_status hlf_config_load_string(const char* text, hlf_config** out);
HLF_API void hlf_config_free(hlf_config* config);
HLF_API hlf_status hlf_config_set_seed(hlf_config* config, uint64_t seed);
HLF_API hlf_status hlf_config_set_output_dir(hlf_config* config, const char* dir);
HLF_API hlf_status hlf_config_echo(const hlf_config* config, char** out);

/* Writes trajectory, diagnostics and summary files; `log` gets the paths and
 * the verdict. */
HLF_API hlf_status hlf_simulate(const hlf_config* config, hlf_line_fn log, void* user);

/* workers == 0 takes the count from the config. Individual run failures are
 * recorded in the index and counted in *failed_runs. */
HLF_API hlf_status hlf_sweep(const hlf_config* config, unsigned workers, hlf_line_fn log, void* user,
                             size_t* failed_runs);

/* CSV table of a finished sweep; warnings go to `warn`. */
HLF_API hlf_status hlf_summary(const char* index_path, char** csv, hlf_line_fn warn, void* user);

/* Runs a check suite, one line per check; *failed_checks counts failures. */
HLF_API hlf_status hlf_verify(const char* suite, hlf_line_fn line, void* user, int* failed_checks);

/* In-memory run. */
HLF_API hlf_status hlf_run_create(const hlf_config* config, hlf_run** out);
HLF_API void hlf_run_free(hlf_run* run);
HLF_API size_t hlf_run_sample_count(const hlf_run* run);
HLF_API size_t hlf_run_state_size(const hlf_run* run);
/* Sample k counts from t = 0; state receives state_size values. */
HLF_API hlf_status hlf_run_sample(const hlf_run* run, size_t k, double* t, double* state, size_t capacity);
HLF_API hlf_status hlf_run_diameters(const hlf_run* run, size_t k, double* X, double* V);
HLF_API hlf_status hlf_run_verdict(const hlf_run* run, hlf_verdict* out);

#ifdef __cplusplus
}
#endif

#endif
