#ifndef PROJDIM_H
#define PROJDIM_H

/* C interface to the projdim library. Objects are opaque handles released
 * with the matching *_free call. Every function returning projdim_status
 * records a message retrievable with projdim_last_error() on failure
 * (thread-local). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PROJDIM_API __declspec(dllexport)
#else
#define PROJDIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum projdim_status {
  PROJDIM_OK = 0,
  PROJDIM_E_INVALID_ARGUMENT = 1,
  PROJDIM_E_MALFORMED_INPUT = 2,
  PROJDIM_E_INVARIANT = 3,
  PROJDIM_E_TILING = 4,
  PROJDIM_E_DEGENERATE = 5,
  PROJDIM_E_NON_BRACKETING = 6,
  PROJDIM_E_NUMERICAL = 7,
  PROJDIM_E_UNSUPPORTED = 8,
  PROJDIM_E_IO = 9,
  PROJDIM_E_INTERNAL = 99
} projdim_status;

typedef struct projdim_system projdim_system;
typedef struct projdim_series projdim_series;

PROJDIM_API const char* projdim_version(void);
PROJDIM_API const char* projdim_last_error(void);
PROJDIM_API const char* projdim_status_name(projdim_status status);

/* Systems ---------------------------------------------------------------- */

PROJDIM_API projdim_status projdim_system_preset(const char* name, projdim_system** out);
/* require_tiling != 0 rejects systems that fail tiling validation
 * (PROJDIM_E_TILING). */
PROJDIM_API projdim_status projdim_system_load_json(const char* text, int require_tiling, projdim_system** out);
PROJDIM_API projdim_status projdim_system_load_file(const char* path, int require_tiling, projdim_system** out);
PROJDIM_API void projdim_system_free(projdim_system* system);

PROJDIM_API const char* projdim_system_name(const projdim_system* system);
PROJDIM_API size_t projdim_system_dimension(const projdim_system* system);
PROJDIM_API size_t projdim_system_generator_count(const projdim_system* system);
PROJDIM_API size_t projdim_system_hole_count(const projdim_system* system);

typedef struct projdim_tiling_report {
  double total_volume;
  double covered_volume;
  double volume_defect;
  uint64_t samples;
  uint64_t collisions;
  int volume_ok;
  int disjoint_ok;
  int holes_ok;
  int passed;
  char summary[512];
} projdim_tiling_report;

PROJDIM_API projdim_status projdim_validate_tiling(const projdim_system* system, uint64_t samples, uint64_t seed,
                                                   projdim_tiling_report* out);

/* Estimators ------------------------------------------------------------- */

typedef struct projdim_options {
  int sequential;        /* non-zero: deterministic single-threaded traversal */
  unsigned threads;      /* 0: PROJDIM_THREADS or hardware concurrency */
  double top_fraction;   /* levels used by the growth fit */
  double tolerance;      /* bisection width */
} projdim_options;

PROJDIM_API void projdim_options_default(projdim_options* options);

typedef struct projdim_exponent {
  double point;
  double lo;
  double hi;
  int has_shallow;
  double shallow;  /* root two levels shallower, when has_shallow */
  char method[32];
  char truncation[192];
} projdim_exponent;

typedef enum projdim_singular_exponent {
  PROJDIM_S_MINUS_2 = 0,
  PROJDIM_S_MINUS_1 = 1
} projdim_singular_exponent;

PROJDIM_API projdim_status projdim_estimate_sigma(const projdim_system* system, double lo, double hi, uint32_t depth,
                                                  const projdim_options* options, projdim_exponent* out);
PROJDIM_API projdim_status projdim_estimate_hausdorff(const projdim_system* system, double lo, double hi,
                                                      uint32_t depth, projdim_singular_exponent variant,
                                                      const projdim_options* options, projdim_exponent* out);
PROJDIM_API projdim_status projdim_counting_exponent(const projdim_system* system, const double* caps, size_t n,
                                                     projdim_exponent* out);
/* max(d - 1, d rho / (d + 1)) */
PROJDIM_API projdim_status projdim_de_leo_lower_bound(size_t d, double rho, double* out);

typedef struct projdim_box_count {
  int calibrated;
  double calibration_slope;
  double calibration_residual;
  int has_system;
  double slope;
  double residual;
  size_t scales;
  double eps[16];
  uint64_t counts[16];
} projdim_box_count;

PROJDIM_API projdim_status projdim_box_count_oracle(const projdim_system* system, size_t points, uint64_t seed,
                                                    projdim_box_count* out);

/* Series ----------------------------------------------------------------- */

typedef enum projdim_series_kind {
  PROJDIM_HOLE_SERIES = 0,
  PROJDIM_NORM_SERIES = 1,
  PROJDIM_SINGULAR_SERIES = 2,
  PROJDIM_COUNTING_FUNCTION = 3
} projdim_series_kind;

typedef enum projdim_policy_kind {
  PROJDIM_MAX_DEPTH = 0,
  PROJDIM_NORM_CAP = 1,
  PROJDIM_VOLUME_FLOOR = 2
} projdim_policy_kind;

typedef struct projdim_policy {
  projdim_policy_kind kind;
  double value;
} projdim_policy;

/* Hole series: parameter t, any policy. Norm series: parameter r, policy
 * must be PROJDIM_NORM_CAP. Singular series: parameter s, any policy. */
PROJDIM_API projdim_status projdim_series_compute(const projdim_system* system, projdim_series_kind kind,
                                                  double parameter, projdim_policy policy,
                                                  projdim_singular_exponent variant, const projdim_options* options,
                                                  projdim_series** out);
PROJDIM_API projdim_status projdim_series_counting(const projdim_system* system, const double* caps, size_t n,
                                                   projdim_series** out);
PROJDIM_API void projdim_series_free(projdim_series* series);

PROJDIM_API projdim_series_kind projdim_series_get_kind(const projdim_series* series);
PROJDIM_API double projdim_series_parameter(const projdim_series* series);
PROJDIM_API size_t projdim_series_levels(const projdim_series* series);
PROJDIM_API projdim_status projdim_series_level(const projdim_series* series, size_t level, double* level_sum_log,
                                                double* cumulative, uint64_t* terms);
PROJDIM_API const char* projdim_series_truncation(const projdim_series* series);
/* CSV text owned by the series handle. */
PROJDIM_API const char* projdim_series_csv(const projdim_series* series);

/* Rendering -------------------------------------------------------------- */

/* Writes the SVG to path. cells/holes receive the drawn counts when non-NULL. */
PROJDIM_API projdim_status projdim_render_svg(const projdim_system* system, uint32_t depth, const char* path,
                                              uint64_t* cells, uint64_t* holes);

#ifdef __cplusplus
}
#endif

#endif
