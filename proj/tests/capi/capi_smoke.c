/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "projdim/projdim.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(int argc, char** argv) {
  const char* data = argc > 1 ? argv[1] : "tests/data";
  char path[1024];
  projdim_system* sys = NULL;
  projdim_tiling_report report;
  projdim_options opts;
  projdim_exponent sigma;
  projdim_series* series = NULL;
  double level_log, cumulative, bound;
  uint64_t terms, cells, holes;
  size_t levels;

  EXPECT(strcmp(projdim_version(), "1.0.0") == 0);
  EXPECT(projdim_system_preset("rauzy", &sys) == PROJDIM_OK);
  EXPECT(projdim_system_dimension(sys) == 2);
  EXPECT(projdim_system_generator_count(sys) == 3);
  EXPECT(projdim_system_hole_count(sys) == 1);
  EXPECT(strcmp(projdim_system_name(sys), "rauzy") == 0);

  EXPECT(projdim_validate_tiling(sys, 10000, 1, &report) == PROJDIM_OK);
  EXPECT(report.passed && report.collisions == 0);

  projdim_options_default(&opts);
  opts.sequential = 1;
  EXPECT(projdim_estimate_sigma(sys, -1.0, 0.0, 3, &opts, &sigma) == PROJDIM_E_INVALID_ARGUMENT);
  EXPECT(strlen(projdim_last_error()) > 0);
  EXPECT(projdim_estimate_sigma(sys, -1.0, 0.0, 8, &opts, &sigma) == PROJDIM_OK);
  EXPECT(sigma.point + 2 > 1.19 && sigma.point + 2 < 1.7415);
  EXPECT(sigma.lo <= sigma.point && sigma.point <= sigma.hi);

  EXPECT(projdim_de_leo_lower_bound(2, 2.4294, &bound) == PROJDIM_OK);
  EXPECT(fabs(bound - 1.6196) < 5e-5);

  {
    projdim_policy policy = {PROJDIM_MAX_DEPTH, 4};
    EXPECT(projdim_series_compute(sys, PROJDIM_HOLE_SERIES, 0.0, policy, PROJDIM_S_MINUS_1, &opts, &series) ==
           PROJDIM_OK);
    levels = projdim_series_levels(series);
    EXPECT(levels == 5);
    EXPECT(projdim_series_level(series, 0, &level_log, &cumulative, &terms) == PROJDIM_OK);
    EXPECT(terms == 1 && fabs(cumulative - sqrt(3.0) / 8) < 1e-15);
    EXPECT(projdim_series_level(series, 99, &level_log, &cumulative, &terms) == PROJDIM_E_INVALID_ARGUMENT);
    EXPECT(strncmp(projdim_series_csv(series), "kind,parameter,level", 20) == 0);
    EXPECT(projdim_series_get_kind(series) == PROJDIM_HOLE_SERIES);
    projdim_series_free(series);
  }

  snprintf(path, sizeof path, "%s/overlap.json", data);
  {
    projdim_system* bad = NULL;
    EXPECT(projdim_system_load_file(path, 1, &bad) == PROJDIM_E_TILING);
    EXPECT(bad == NULL);
  }
  snprintf(path, sizeof path, "%s/malformed.json", data);
  {
    projdim_system* bad = NULL;
    EXPECT(projdim_system_load_file(path, 0, &bad) == PROJDIM_E_MALFORMED_INPUT);
  }
  snprintf(path, sizeof path, "%s/tetra.json", data);
  {
    projdim_system* tetra = NULL;
    EXPECT(projdim_system_load_file(path, 0, &tetra) == PROJDIM_OK);
    EXPECT(projdim_render_svg(tetra, 1, "capi_tetra.svg", NULL, NULL) == PROJDIM_E_UNSUPPORTED);
    projdim_system_free(tetra);
  }

  EXPECT(projdim_render_svg(sys, 0, "capi_smoke.svg", &cells, &holes) == PROJDIM_OK);
  EXPECT(cells == 3 && holes == 1);
  EXPECT(strcmp(projdim_status_name(PROJDIM_E_NON_BRACKETING), "non-bracketing interval") == 0);

  projdim_system_free(sys);
  projdim_system_free(NULL);
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  printf("capi smoke: ok\n");
  return 0;
}
