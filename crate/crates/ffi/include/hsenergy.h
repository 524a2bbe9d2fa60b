#ifndef HSENERGY_H
#define HSENERGY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum HseStatus {
  HSE_STATUS_OK = 0,
  HSE_STATUS_NULL_POINTER = 1,
  HSE_STATUS_INVALID_UTF8 = 2,
  HSE_STATUS_CONFIG = 3,
  HSE_STATUS_INVALID_ARGUMENT = 4,
  // CFL violation, blow-up or a timelike surface.
  HSE_STATUS_NUMERICAL = 5,
  HSE_STATUS_IO = 6,
  // The requested quantity does not exist (e.g. no closed-form solution).
  HSE_STATUS_UNAVAILABLE = 7,
  // The destination buffer is too small.
  HSE_STATUS_BUFFER_TOO_SMALL = 8,
  HSE_STATUS_PANIC = 9,
} HseStatus;

// A JSON report with its pass/fail verdict.
typedef struct HseReport HseReport;

// A catalog scenario built at a fixed resolution.
typedef struct HseScenario HseScenario;

// A solved scenario.
typedef struct HseSolution HseSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hse_version(void);

// Copies the calling thread's last error message into `buf` (NUL-terminated).
// `required` receives the buffer size needed, including the terminator.
//
// # Safety
// `buf` must be valid for `len` bytes or null with `len == 0`.
enum HseStatus hse_last_error(char *buf, size_t len, size_t *required);

// Builds a scenario from a catalog name or a scenario JSON object.
// `cells == 0` keeps the scenario's default resolution.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum HseStatus hse_scenario_new(const char *spec, size_t cells, struct HseScenario **out_scenario);

// # Safety
// `scenario` must come from [`hse_scenario_new`] and not be used afterwards.
void hse_scenario_free(struct HseScenario *scenario);

// Spatial nodes and stored time levels of a scenario.
//
// # Safety
// Pointers must be valid.
enum HseStatus hse_scenario_dims(const struct HseScenario *scenario, size_t *nodes, size_t *levels);

// Hex SHA-256 of the scenario description (65 bytes with the terminator).
//
// # Safety
// `scenario` must be a live handle; `buf` valid for `len` bytes.
enum HseStatus hse_scenario_hash(const struct HseScenario *scenario,
                                 char *buf,
                                 size_t len,
                                 size_t *required);

// Classical energy `e(0)` of the scenario's initial data.
//
// # Safety
// Pointers must be valid.
enum HseStatus hse_scenario_initial_energy(const struct HseScenario *scenario, double *energy);

// Solves a scenario with the leapfrog scheme.
//
// # Safety
// `scenario` must be a live handle; `out_solution` must be writable.
enum HseStatus hse_solve(const struct HseScenario *scenario, struct HseSolution **out_solution);

// # Safety
// `solution` must come from [`hse_solve`] and not be used afterwards.
void hse_solution_free(struct HseSolution *solution);

// Max-norm error against the closed form; `Unavailable` when there is none.
//
// # Safety
// Pointers must be valid.
enum HseStatus hse_solution_max_error(const struct HseSolution *solution, double *error);

// `u` at (`level`, `node`) as real and imaginary parts.
//
// # Safety
// Pointers must be valid.
enum HseStatus hse_solution_value(const struct HseSolution *solution,
                                  size_t level,
                                  size_t node,
                                  double *re,
                                  double *im);

// Energy on the surface given as JSON, e.g. `{"kind":"affine","offset":0.3,"slope":[0.4]}`.
//
// # Safety
// Pointers must be valid; `surface_json` NUL-terminated.
enum HseStatus hse_surface_energy(const struct HseSolution *solution,
                                  const char *surface_json,
                                  double *energy);

// Flux-balance residual at `tau` for the surface given as JSON.
//
// # Safety
// Pointers must be valid; `surface_json` NUL-terminated.
enum HseStatus hse_flux_residual(const struct HseSolution *solution,
                                 const char *surface_json,
                                 double tau,
                                 double *residual);

// Minimizer and minimum of the Grönwall coefficient for `d > 0`.
//
// # Safety
// Pointers must be valid.
enum HseStatus hse_gronwall_min(double d, double *k_star, double *value);

// Runs a complete run configuration (JSON) without writing files.
//
// # Safety
// Pointers must be valid; `config_json` NUL-terminated.
enum HseStatus hse_run(const char *config_json, struct HseReport **out_report);

// Runs acceptance criterion `n` (1 to 10) with default tolerances.
//
// # Safety
// `out_report` must be writable.
enum HseStatus hse_acceptance(uint32_t n, uint64_t seed, struct HseReport **out_report);

// Whether every check in the report passed.
//
// # Safety
// `report` must be a live handle.
bool hse_report_passed(const struct HseReport *report);

// Report JSON, valid until [`hse_report_free`]; null for a null handle.
//
// # Safety
// `report` must be a live handle.
const char *hse_report_json(const struct HseReport *report);

// # Safety
// `report` must come from this library and not be used afterwards.
void hse_report_free(struct HseReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSENERGY_H */
