#ifndef GEOPHASE_H
#define GEOPHASE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum GpStatus {
  GP_STATUS_OK = 0,
  GP_STATUS_NULL_POINTER = 1,
  // Rejected input: bad gate, scheme, error model, state or JSON.
  GP_STATUS_INVALID_ARGUMENT = 2,
  // The numerics failed, e.g. trace drift in a master-equation run.
  GP_STATUS_NUMERICAL = 3,
  // A string argument was not valid UTF-8.
  GP_STATUS_INVALID_UTF8 = 4,
  // A Rust panic was caught at the boundary.
  GP_STATUS_PANIC = 5,
} GpStatus;

// Opaque pulse schedule.
typedef struct GpSchedule GpSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *gp_last_error(void);

// Builds the schedule of `e^{iγ n·σ}` with the given scheme name
// (`singleloop`, `composite`, `composite(N)`, `dyncorrected`).
//
// # Safety
// `scheme` must be a NUL-terminated string; `out` must be writable.
enum GpStatus gp_schedule_new(double theta,
                              double phi,
                              double gamma,
                              const char *scheme,
                              struct GpSchedule **out);

// Builds the schedule of a named single-qubit gate (`S`, `T`, `H`).
//
// # Safety
// `gate` and `scheme` must be NUL-terminated strings; `out` must be writable.
enum GpStatus gp_schedule_named(const char *gate, const char *scheme, struct GpSchedule **out);

// Parses a schedule from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum GpStatus gp_schedule_from_json(const char *json, struct GpSchedule **out);

// Releases a schedule. Null is ignored.
//
// # Safety
// `schedule` must come from this library and not be used afterwards.
void gp_schedule_free(struct GpSchedule *schedule);

// Number of segments; 0 for a null schedule.
//
// # Safety
// `schedule` must be null or a live schedule.
uintptr_t gp_schedule_segment_count(const struct GpSchedule *schedule);

// Total duration in units of `1/Ω_m`; NaN for a null schedule.
//
// # Safety
// `schedule` must be null or a live schedule.
double gp_schedule_duration(const struct GpSchedule *schedule);

// Serializes the schedule; release the string with `gp_string_free`.
//
// # Safety
// `schedule` must be live; `out` must be writable.
enum GpStatus gp_schedule_to_json(const struct GpSchedule *schedule, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void gp_string_free(char *s);

// Writes the 2×2 propagator under Rabi error `epsilon` and detuning shift
// `delta` as 8 doubles: row-major entries, each as (re, im).
//
// # Safety
// `schedule` must be live; `out` must hold 8 doubles.
enum GpStatus gp_propagator(const struct GpSchedule *schedule,
                            double epsilon,
                            double delta,
                            double *out);

// Gate fidelity `|Tr(V†U)|/2` against the schedule's target gate.
//
// # Safety
// `schedule` must be live; `out` must be writable.
enum GpStatus gp_gate_fidelity(const struct GpSchedule *schedule,
                               double epsilon,
                               double delta,
                               double *out);

// Runs the master equation from the pure state `psi` (4 doubles:
// re0, im0, re1, im1) and writes the final fidelity with the ideal output
// state.
//
// # Safety
// `schedule` must be live; `psi` must hold 4 doubles; `out` must be writable.
enum GpStatus gp_lindblad_state_fidelity(const struct GpSchedule *schedule,
                                         double epsilon,
                                         double delta,
                                         double gamma1,
                                         double gamma2,
                                         const double *psi,
                                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOPHASE_H */
