#include "projdim/projdim.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "projdim/dimension_estimators.hpp"
#include "projdim/export.hpp"
#include "projdim/oracles.hpp"

struct projdim_system {
  projdim::IfsSystem system;
};

struct projdim_series {
  projdim::SeriesReport report;
  std::string csv;
};

namespace {

thread_local std::string last_error;

projdim_status record(projdim_status status, const char* what) {
  last_error = what;
  return status;
}

template <class F>
projdim_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return PROJDIM_OK;
  } catch (const projdim::Error& e) {
    return record(static_cast<projdim_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(PROJDIM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(PROJDIM_E_INTERNAL, e.what());
  } catch (...) {
    return record(PROJDIM_E_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p) projdim::fail(projdim::ErrorCode::invalid_argument, std::string(name) + " must not be NULL");
}

void copy_text(char* dst, std::size_t size, const std::string& src) {
  std::snprintf(dst, size, "%s", src.c_str());
}

projdim::EstimatorOptions estimator_options(const projdim_options* o) {
  projdim::EstimatorOptions out;
  if (!o) return out;
  out.traversal.sequential = o->sequential != 0;
  out.traversal.threads = o->threads;
  out.top_fraction = o->top_fraction;
  out.tolerance = o->tolerance;
  return out;
}

void fill_exponent(const projdim::ExponentEstimate& e, projdim_exponent* out) {
  out->point = e.point;
  out->lo = e.lo;
  out->hi = e.hi;
  out->has_shallow = e.shallow_point.has_value();
  out->shallow = e.shallow_point.value_or(0.0);
  copy_text(out->method, sizeof out->method, e.method);
  copy_text(out->truncation, sizeof out->truncation, e.truncation);
}

projdim::PruningPolicy make_policy(projdim_policy p) {
  switch (p.kind) {
    case PROJDIM_MAX_DEPTH:
      if (!(p.value >= 0 && p.value <= 4294967295.0) || p.value != static_cast<double>(static_cast<std::uint64_t>(p.value)))
        projdim::fail(projdim::ErrorCode::invalid_argument, "max depth must be a non-negative integer");
      return projdim::PruningPolicy::max_depth(static_cast<std::uint32_t>(p.value));
    case PROJDIM_NORM_CAP: return projdim::PruningPolicy::norm_cap(p.value);
    case PROJDIM_VOLUME_FLOOR: return projdim::PruningPolicy::volume_floor(p.value);
  }
  projdim::fail(projdim::ErrorCode::invalid_argument, "unknown policy kind");
}

projdim::SingularExponent variant_of(projdim_singular_exponent v) {
  if (v == PROJDIM_S_MINUS_2) return projdim::SingularExponent::s_minus_2;
  if (v == PROJDIM_S_MINUS_1) return projdim::SingularExponent::s_minus_1;
  projdim::fail(projdim::ErrorCode::invalid_argument, "unknown singular exponent variant");
}

projdim::LoadOptions load_options(int require_tiling) {
  projdim::LoadOptions o;
  o.require_tiling = require_tiling != 0;
  return o;
}

}  // namespace

extern "C" {

const char* projdim_version(void) { return "1.0.0"; }

const char* projdim_last_error(void) { return last_error.c_str(); }

const char* projdim_status_name(projdim_status status) {
  switch (status) {
    case PROJDIM_OK: return "ok";
    case PROJDIM_E_INVALID_ARGUMENT: return "invalid argument";
    case PROJDIM_E_MALFORMED_INPUT: return "malformed input";
    case PROJDIM_E_INVARIANT: return "invariant violation";
    case PROJDIM_E_TILING: return "tiling failure";
    case PROJDIM_E_DEGENERATE: return "degenerate";
    case PROJDIM_E_NON_BRACKETING: return "non-bracketing interval";
    case PROJDIM_E_NUMERICAL: return "numerical failure";
    case PROJDIM_E_UNSUPPORTED: return "unsupported";
    case PROJDIM_E_IO: return "i/o error";
    case PROJDIM_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

projdim_status projdim_system_preset(const char* name, projdim_system** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new projdim_system{projdim::load_preset(name)};
  });
}

projdim_status projdim_system_load_json(const char* text, int require_tiling, projdim_system** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new projdim_system{projdim::load_system_json(text, load_options(require_tiling))};
  });
}

projdim_status projdim_system_load_file(const char* path, int require_tiling, projdim_system** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new projdim_system{projdim::load_system_file(path, load_options(require_tiling))};
  });
}

void projdim_system_free(projdim_system* system) { delete system; }

const char* projdim_system_name(const projdim_system* system) { return system ? system->system.name().c_str() : ""; }
size_t projdim_system_dimension(const projdim_system* system) { return system ? system->system.dimension() : 0; }
size_t projdim_system_generator_count(const projdim_system* system) {
  return system ? system->system.generators().size() : 0;
}
size_t projdim_system_hole_count(const projdim_system* system) { return system ? system->system.holes().size() : 0; }

projdim_status projdim_validate_tiling(const projdim_system* system, uint64_t samples, uint64_t seed,
                                       projdim_tiling_report* out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    const auto r = projdim::validate_tiling(system->system, samples, seed);
    out->total_volume = r.total_volume;
    out->covered_volume = r.covered_volume;
    out->volume_defect = r.volume_defect;
    out->samples = r.samples;
    out->collisions = r.collisions;
    out->volume_ok = r.volume_ok;
    out->disjoint_ok = r.disjoint_ok;
    out->holes_ok = r.holes_ok;
    out->passed = r.passed();
    copy_text(out->summary, sizeof out->summary, r.describe());
  });
}

void projdim_options_default(projdim_options* options) {
  if (!options) return;
  const projdim::EstimatorOptions d;
  options->sequential = d.traversal.sequential ? 1 : 0;
  options->threads = d.traversal.threads;
  options->top_fraction = d.top_fraction;
  options->tolerance = d.tolerance;
}

projdim_status projdim_estimate_sigma(const projdim_system* system, double lo, double hi, uint32_t depth,
                                      const projdim_options* options, projdim_exponent* out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    fill_exponent(projdim::estimate_sigma(system->system, lo, hi, depth, estimator_options(options)), out);
  });
}

projdim_status projdim_estimate_hausdorff(const projdim_system* system, double lo, double hi, uint32_t depth,
                                          projdim_singular_exponent variant, const projdim_options* options,
                                          projdim_exponent* out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    fill_exponent(projdim::estimate_hausdorff(system->system, lo, hi, depth, variant_of(variant),
                                              estimator_options(options)),
                  out);
  });
}

projdim_status projdim_counting_exponent(const projdim_system* system, const double* caps, size_t n,
                                         projdim_exponent* out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    if (n > 0) require(caps, "caps");
    fill_exponent(projdim::counting_exponent(system->system, std::span<const double>(caps, n)), out);
  });
}

projdim_status projdim_de_leo_lower_bound(size_t d, double rho, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = projdim::de_leo_lower_bound(d, rho);
  });
}

projdim_status projdim_box_count_oracle(const projdim_system* system, size_t points, uint64_t seed,
                                        projdim_box_count* out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    const auto r = projdim::box_count_oracle(system->system, points, seed);
    *out = projdim_box_count{};
    out->calibrated = r.calibrated;
    out->calibration_slope = r.calibration.slope;
    out->calibration_residual = r.calibration.residual;
    out->has_system = r.system.has_value();
    const auto& shown = r.system ? *r.system : r.calibration;
    out->slope = r.system ? r.system->slope : 0.0;
    out->residual = r.system ? r.system->residual : 0.0;
    out->scales = std::min<std::size_t>(shown.eps.size(), 16);
    for (std::size_t i = 0; i < out->scales; ++i) {
      out->eps[i] = shown.eps[i];
      out->counts[i] = shown.counts[i];
    }
  });
}

projdim_status projdim_series_compute(const projdim_system* system, projdim_series_kind kind, double parameter,
                                      projdim_policy policy, projdim_singular_exponent variant,
                                      const projdim_options* options, projdim_series** out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    const auto traversal = estimator_options(options).traversal;
    projdim::SeriesReport report;
    switch (kind) {
      case PROJDIM_HOLE_SERIES:
        report = projdim::hole_series(system->system, parameter, make_policy(policy), traversal);
        break;
      case PROJDIM_NORM_SERIES:
        if (policy.kind != PROJDIM_NORM_CAP)
          projdim::fail(projdim::ErrorCode::invalid_argument, "norm series needs a norm-cap policy");
        report = projdim::norm_series(system->system, parameter, policy.value);
        break;
      case PROJDIM_SINGULAR_SERIES:
        report = projdim::singular_series(system->system, parameter, variant_of(variant), make_policy(policy),
                                          traversal);
        break;
      default:
        projdim::fail(projdim::ErrorCode::invalid_argument, "use projdim_series_counting for the counting function");
    }
    auto* s = new projdim_series{std::move(report), {}};
    s->csv = projdim::series_csv(s->report);
    *out = s;
  });
}

projdim_status projdim_series_counting(const projdim_system* system, const double* caps, size_t n,
                                       projdim_series** out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    if (n > 0) require(caps, "caps");
    auto* s = new projdim_series{projdim::counting_function(system->system, std::span<const double>(caps, n)), {}};
    s->csv = projdim::series_csv(s->report);
    *out = s;
  });
}

void projdim_series_free(projdim_series* series) { delete series; }

projdim_series_kind projdim_series_get_kind(const projdim_series* series) {
  return series ? static_cast<projdim_series_kind>(static_cast<int>(series->report.kind)) : PROJDIM_HOLE_SERIES;
}

double projdim_series_parameter(const projdim_series* series) { return series ? series->report.parameter : 0.0; }

size_t projdim_series_levels(const projdim_series* series) {
  return series ? series->report.level_sum_log.size() : 0;
}

projdim_status projdim_series_level(const projdim_series* series, size_t level, double* level_sum_log,
                                    double* cumulative, uint64_t* terms) {
  return guarded([&] {
    require(series, "series");
    if (level >= series->report.level_sum_log.size())
      projdim::fail(projdim::ErrorCode::invalid_argument, "level out of range");
    if (level_sum_log) *level_sum_log = series->report.level_sum_log[level];
    if (cumulative) *cumulative = series->report.cumulative[level];
    if (terms) *terms = series->report.terms[level];
  });
}

const char* projdim_series_truncation(const projdim_series* series) {
  return series ? series->report.truncation.c_str() : "";
}

const char* projdim_series_csv(const projdim_series* series) { return series ? series->csv.c_str() : ""; }

projdim_status projdim_render_svg(const projdim_system* system, uint32_t depth, const char* path, uint64_t* cells,
                                  uint64_t* holes) {
  return guarded([&] {
    require(system, "system");
    require(path, "path");
    projdim::RenderStats stats;
    const std::string svg = projdim::render_svg(system->system, depth, &stats);
    std::ofstream file(path, std::ios::binary);
    if (!file) projdim::fail(projdim::ErrorCode::io, std::string("cannot open ") + path + " for writing");
    file << svg;
    if (!file) projdim::fail(projdim::ErrorCode::io, std::string("failed writing ") + path);
    if (cells) *cells = stats.cells;
    if (holes) *holes = stats.holes;
  });
}

}  // extern "C"
