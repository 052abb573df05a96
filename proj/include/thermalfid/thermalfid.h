/*
 * thermalfid C API.
 *
 * Finite-temperature Uhlmann fidelity, Bures distance and thermal Loschmidt
 * echo for quasi-free fermionic models (XY chain in its fermionic picture).
 *
 * Objects are opaque handles created by *_create functions and released with
 * the matching *_destroy. Every fallible call returns a tfid_status; on
 * failure tfid_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread). Passing INFINITY as an inverse
 * temperature selects the ground state.
 */
#ifndef THERMALFID_H
#define THERMALFID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TFID_API __declspec(dllexport)
#else
#define TFID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tfid_status {
  TFID_OK = 0,
  TFID_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad index */
  TFID_ERR_DOMAIN = 2,
  TFID_ERR_DIMENSION_MISMATCH = 3,
  TFID_ERR_NUMERICAL = 4,
  TFID_ERR_CONFIG = 5,
  TFID_ERR_IO = 6,
  TFID_ERR_INTERNAL = 7
} tfid_status;

typedef enum tfid_grid { TFID_GRID_INTEGER = 0, TFID_GRID_HALF_INTEGER = 1 } tfid_grid;

typedef enum tfid_quantity { TFID_FIDELITY = 0, TFID_ECHO = 1 } tfid_quantity;

typedef struct tfid_model tfid_model;
typedef struct tfid_sweep_config tfid_sweep_config;
typedef struct tfid_sweep_result tfid_sweep_result;

typedef struct tfid_mode_info {
  double epsilon;
  double delta;
  double lambda; /* quasiparticle energy */
  double theta;  /* Bogoliubov angle in (-pi, pi] */
} tfid_mode_info;

typedef struct tfid_fidelity_info {
  double total;
  double log_total;
  size_t clamped;       /* per-mode factors pulled back to 1 */
  double max_excursion; /* largest pre-clamp excess over 1 */
} tfid_fidelity_info;

typedef struct tfid_sweep_row {
  double beta;
  double gamma;
  double lambda;
  double value;
  double log_value;
  int ok;              /* 0 when the row recorded an error */
  const char* error;   /* owned by the result; empty string when ok */
} tfid_sweep_row;

typedef struct tfid_oracle_report {
  uint64_t seed;
  size_t fidelity_draws;
  size_t echo_draws;
  size_t product_draws;
  double max_fidelity_deviation;
  double max_echo_deviation;
  double max_product_deviation;
  double fidelity_tolerance;
  double echo_tolerance;
  double product_tolerance;
  int passed;
} tfid_oracle_report;

TFID_API const char* tfid_version(void);
TFID_API const char* tfid_last_error(void);
TFID_API const char* tfid_status_name(tfid_status status);

/* ---- models ------------------------------------------------------------ */

TFID_API tfid_status tfid_model_create_xy(double gamma, double lambda, int n_sites, tfid_grid grid,
                                          tfid_model** out);
TFID_API tfid_status tfid_model_create_modes(const double* epsilon, const double* delta,
                                             size_t count, tfid_model** out);
TFID_API void tfid_model_destroy(tfid_model* model);
TFID_API size_t tfid_model_mode_count(const tfid_model* model);
TFID_API tfid_status tfid_model_get_mode(const tfid_model* model, size_t index,
                                         tfid_mode_info* out);

/* ---- fidelity and echo ------------------------------------------------- */

/* per_mode may be NULL; otherwise it must hold tfid_model_mode_count entries. */
TFID_API tfid_status tfid_thermal_fidelity(const tfid_model* model0, double beta0,
                                           const tfid_model* model1, double beta1,
                                           tfid_fidelity_info* info, double* per_mode);
TFID_API tfid_status tfid_thermal_echo(const tfid_model* model0, const tfid_model* model1,
                                       double beta, double time, tfid_fidelity_info* info,
                                       double* per_mode);
TFID_API tfid_status tfid_echo_time_series(const tfid_model* model0, const tfid_model* model1,
                                           double beta, const double* times, size_t count,
                                           double* out);
TFID_API tfid_status tfid_bures_distance(double fidelity, double* out);

/* ---- sweeps ------------------------------------------------------------ */

TFID_API tfid_status tfid_sweep_config_create(tfid_quantity quantity, tfid_sweep_config** out);
TFID_API void tfid_sweep_config_destroy(tfid_sweep_config* config);
/* key=value setting; keys are the long CLI flag names. */
TFID_API tfid_status tfid_sweep_config_set(tfid_sweep_config* config, const char* key,
                                           const char* value);
TFID_API tfid_status tfid_sweep_config_load_file(tfid_sweep_config* config, const char* path);
TFID_API tfid_status tfid_sweep_config_validate(const tfid_sweep_config* config);
/* Returns a borrowed string, valid until the next call on this config. */
TFID_API const char* tfid_sweep_config_get(const tfid_sweep_config* config, const char* key);

TFID_API tfid_status tfid_sweep_run(const tfid_sweep_config* config, tfid_sweep_result** out);
TFID_API void tfid_sweep_result_destroy(tfid_sweep_result* result);
TFID_API size_t tfid_sweep_result_row_count(const tfid_sweep_result* result);
TFID_API size_t tfid_sweep_result_error_count(const tfid_sweep_result* result);
TFID_API tfid_status tfid_sweep_result_get_row(const tfid_sweep_result* result, size_t index,
                                               tfid_sweep_row* out);
/* Rendered CSV text, owned by the result. NULL on failure. */
TFID_API const char* tfid_sweep_result_csv(tfid_sweep_result* result);
TFID_API tfid_status tfid_sweep_result_write_csv(const tfid_sweep_result* result, const char* path);
TFID_API tfid_status tfid_sweep_result_emit_plot_script(const tfid_sweep_result* result,
                                                        const char* script_path,
                                                        const char* csv_path);

/* ---- verification ------------------------------------------------------ */

TFID_API tfid_status tfid_oracle_check(uint64_t seed, size_t draws, tfid_oracle_report* out);

#ifdef __cplusplus
}
#endif

#endif /* THERMALFID_H */
