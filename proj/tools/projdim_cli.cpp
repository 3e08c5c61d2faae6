// projdim command-line front end. Talks to the library through the C API only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "projdim/projdim.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitHypothesis = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(projdim_status status) { return status == PROJDIM_E_TILING ? kExitHypothesis : kExitError; }

void check(projdim_status status, const std::string& context) {
  if (status != PROJDIM_OK)
    throw Failure{exit_code_for(status), context + ": " + projdim_last_error()};
}

struct SystemDeleter {
  void operator()(projdim_system* s) const { projdim_system_free(s); }
};
struct SeriesDeleter {
  void operator()(projdim_series* s) const { projdim_series_free(s); }
};
using SystemPtr = std::unique_ptr<projdim_system, SystemDeleter>;
using SeriesPtr = std::unique_ptr<projdim_series, SeriesDeleter>;

struct Common {
  std::string preset;
  std::string config;
  std::uint64_t seed = 20261018;
  bool sequential = false;
  std::string out;
};

struct Args {
  Common common;
  std::uint32_t depth = 14;
  double norm_cap = 1e5;
  double param = 0;
  bool param_set = false;
  std::string method = "all";
  std::string kind = "hole";
  std::string variant = "s-1";
  std::vector<double> interval;
  std::size_t points = 1000000;
};

SystemPtr open_system(const Common& c, bool require_tiling) {
  if (c.preset.empty() == c.config.empty()) throw Failure{kExitError, "give exactly one of --preset or --config"};
  projdim_system* raw = nullptr;
  if (!c.preset.empty())
    check(projdim_system_preset(c.preset.c_str(), &raw), "loading preset '" + c.preset + "'");
  else
    check(projdim_system_load_file(c.config.c_str(), require_tiling ? 1 : 0, &raw), "loading " + c.config);
  return SystemPtr(raw);
}

projdim_options options_for(const Common& c) {
  projdim_options o;
  projdim_options_default(&o);
  o.sequential = c.sequential ? 1 : 0;
  return o;
}

projdim_singular_exponent variant_of(const std::string& v) {
  return v == "s-2" ? PROJDIM_S_MINUS_2 : PROJDIM_S_MINUS_1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{kExitError, "cannot open " + path + " for writing"};
  f << content;
  if (!f) throw Failure{kExitError, "failed writing " + path};
}

class Manifest {
 public:
  Manifest(std::string command, const Common& c, std::vector<std::string> argv)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["arguments"] = std::move(argv);
    if (!c.preset.empty())
      doc_["preset"] = c.preset;
    else
      doc_["config"] = c.config;
    doc_["seed"] = c.seed;
    doc_["sequential"] = c.sequential;
    doc_["policy"] = json::object();
    doc_["outputs"] = json::array();
  }

  json& policy() { return doc_["policy"]; }
  void output(const std::string& path) { doc_["outputs"].push_back(path); }

  void write_beside(const std::string& path) {
    json doc = doc_;
    doc["tool_version"] = projdim_version();
    doc["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(path + ".manifest.json", doc.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Dyadic schedule ending at the cap: cap / 2^5, ..., cap.
std::vector<double> counting_schedule(double cap) {
  std::vector<double> caps;
  for (int k = 5; k >= 0; --k) caps.push_back(cap / std::ldexp(1.0, k));
  return caps;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Args& a, const std::vector<std::string>& argv) {
  SystemPtr sys = open_system(a.common, false);
  projdim_tiling_report r;
  check(projdim_validate_tiling(sys.get(), 100000, a.common.seed, &r), "validating");
  std::ostringstream text;
  text << "system: " << projdim_system_name(sys.get()) << " (d = " << projdim_system_dimension(sys.get())
       << ", " << projdim_system_generator_count(sys.get()) << " generators, "
       << projdim_system_hole_count(sys.get()) << " holes)\n"
       << "tiling: " << r.summary << "\n"
       << "result: " << (r.passed ? "pass" : "FAIL") << "\n";
  std::cout << text.str();
  if (!a.common.out.empty()) {
    Manifest m("validate", a.common, argv);
    m.policy()["tiling_samples"] = 100000;
    write_file(a.common.out, text.str());
    m.output(a.common.out);
    m.write_beside(a.common.out);
  }
  return r.passed ? kExitOk : kExitHypothesis;
}

struct Row {
  std::string method;
  double point, lo, hi;
  std::string note;
};

int cmd_dimension(const Args& a, const std::vector<std::string>& argv) {
  SystemPtr sys = open_system(a.common, true);
  const projdim_options opts = options_for(a.common);
  const std::size_t d = projdim_system_dimension(sys.get());
  const bool all = a.method == "all";
  std::vector<Row> rows;
  std::ostringstream report;
  Manifest manifest("dimension", a.common, argv);
  manifest.policy()["method"] = a.method;

  if (all || a.method == "sigma") {
    const double lo = a.interval.empty() ? -1.0 : a.interval[0];
    const double hi = a.interval.empty() ? 0.0 : a.interval[1];
    projdim_exponent e;
    check(projdim_estimate_sigma(sys.get(), lo, hi, a.depth, &opts, &e), "sigma estimator");
    rows.push_back({"sigma", d + e.point, d + e.lo, d + e.hi, e.truncation});
    report << "sigma: " << fixed(e.point, 5) << " in [" << fixed(e.lo, 5) << ", " << fixed(e.hi, 5)
           << "]; box dimension d + sigma = " << fixed(d + e.point) << " in [" << fixed(d + e.lo) << ", "
           << fixed(d + e.hi) << "]\n";
    manifest.policy()["depth"] = a.depth;
  }
  if (all || a.method == "hausdorff") {
    const double lo = a.interval.empty() || a.method == "all" ? 1.01 : a.interval[0];
    const double hi = a.interval.empty() || a.method == "all" ? 1.99 : a.interval[1];
    projdim_exponent e;
    check(projdim_estimate_hausdorff(sys.get(), lo, hi, a.depth, variant_of(a.variant), &opts, &e),
          "Hausdorff estimator");
    rows.push_back({"hausdorff", e.point, e.lo, e.hi, e.truncation});
    report << "hausdorff: " << fixed(e.point) << " in [" << fixed(e.lo) << ", " << fixed(e.hi) << "] (exponent "
           << a.variant << ")\n";
    manifest.policy()["depth"] = a.depth;
    manifest.policy()["variant"] = a.variant;
  }
  if (all || a.method == "deleo") {
    const auto caps = counting_schedule(a.norm_cap);
    projdim_exponent rho;
    check(projdim_counting_exponent(sys.get(), caps.data(), caps.size(), &rho), "counting exponent");
    double value = 0, lo = 0, hi = 0;
    check(projdim_de_leo_lower_bound(d, rho.point, &value), "De Leo bound");
    check(projdim_de_leo_lower_bound(d, std::max(0.0, rho.lo), &lo), "De Leo bound");
    check(projdim_de_leo_lower_bound(d, std::max(0.0, rho.hi), &hi), "De Leo bound");
    rows.push_back({"deleo", value, lo, hi, rho.truncation});
    report << "rho: " << fixed(rho.point) << " in [" << fixed(rho.lo) << ", " << fixed(rho.hi) << "] ("
           << rho.truncation << ")\n"
           << "De Leo lower bound: " << fixed(value) << " in [" << fixed(lo) << ", " << fixed(hi) << "]\n";
    manifest.policy()["norm_cap"] = a.norm_cap;
  }
  if (all || a.method == "boxcount-oracle") {
    projdim_box_count b;
    check(projdim_box_count_oracle(sys.get(), a.points, a.common.seed, &b), "box-count oracle");
    report << "box-count calibration (Sierpinski): slope " << fixed(b.calibration_slope) << " vs "
           << fixed(std::log(3.0) / std::log(2.0)) << (b.calibrated ? " (pass)" : " (FAIL)") << "\n";
    if (!b.has_system) throw Failure{kExitError, "box-count calibration failed; system box count withheld"};
    rows.push_back({"boxcount-oracle", b.slope, b.slope - b.residual, b.slope + b.residual,
                    "grid eps 2^-3..2^-9, " + std::to_string(a.points) + " points"});
    report << "box-count oracle: slope " << fixed(b.slope) << " (fit residual " << fixed(b.residual) << ")\n";
    manifest.policy()["points"] = a.points;
  }
  if (rows.empty()) throw Failure{kExitError, "unknown method " + a.method};

  if (all) {
    report << "\nconsistency table\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %9s %9s %9s\n", "method", "estimate", "lo", "hi");
    report << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-16s %9.4f %9.4f %9.4f\n", r.method.c_str(), r.point, r.lo, r.hi);
      report << line;
    }
  }
  std::cout << report.str();

  if (!a.common.out.empty()) {
    std::ostringstream csv;
    csv << "method,estimate,lo,hi,truncation\n";
    for (const auto& r : rows)
      csv << r.method << ',' << fixed(r.point, 6) << ',' << fixed(r.lo, 6) << ',' << fixed(r.hi, 6) << ",\""
          << r.note << "\"\n";
    write_file(a.common.out, csv.str());
    manifest.output(a.common.out);
    manifest.write_beside(a.common.out);
  }
  return kExitOk;
}

int cmd_series(const Args& a, const std::vector<std::string>& argv) {
  SystemPtr sys = open_system(a.common, true);
  const projdim_options opts = options_for(a.common);
  Manifest manifest("series", a.common, argv);
  manifest.policy()["kind"] = a.kind;
  projdim_series* raw = nullptr;
  if (a.kind == "hole" || a.kind == "singular") {
    projdim_policy policy{PROJDIM_MAX_DEPTH, static_cast<double>(a.depth)};
    double param = a.param;
    if (a.kind == "singular" && !a.param_set) param = 1.5;
    const auto kind = a.kind == "hole" ? PROJDIM_HOLE_SERIES : PROJDIM_SINGULAR_SERIES;
    check(projdim_series_compute(sys.get(), kind, param, policy, variant_of(a.variant), &opts, &raw),
          a.kind + " series");
    manifest.policy()["depth"] = a.depth;
    manifest.policy()["parameter"] = param;
    if (a.kind == "singular") manifest.policy()["variant"] = a.variant;
  } else if (a.kind == "norm") {
    projdim_policy policy{PROJDIM_NORM_CAP, a.norm_cap};
    check(projdim_series_compute(sys.get(), PROJDIM_NORM_SERIES, a.param, policy, PROJDIM_S_MINUS_1, &opts, &raw),
          "norm series");
    manifest.policy()["norm_cap"] = a.norm_cap;
    manifest.policy()["parameter"] = a.param;
  } else if (a.kind == "counting") {
    // Caps at the dyadic shell ends, so the cumulative column matches the
    // norm series at r = 0 row for row.
    std::vector<double> caps;
    const double cap = std::floor(a.norm_cap);
    if (!(cap >= 1)) throw Failure{kExitError, "norm cap must be >= 1"};
    for (int k = 0; std::ldexp(1.0, k) <= cap; ++k) caps.push_back(std::min(std::ldexp(1.0, k + 1) - 1, cap));
    check(projdim_series_counting(sys.get(), caps.data(), caps.size(), &raw), "counting function");
    manifest.policy()["norm_cap"] = a.norm_cap;
  } else {
    throw Failure{kExitError, "unknown series kind " + a.kind};
  }
  SeriesPtr series(raw);
  const std::string csv = projdim_series_csv(series.get());
  if (a.common.out.empty()) {
    std::cout << csv;
  } else {
    write_file(a.common.out, csv);
    manifest.policy()["truncation"] = projdim_series_truncation(series.get());
    manifest.output(a.common.out);
    manifest.write_beside(a.common.out);
    std::cout << "wrote " << projdim_series_levels(series.get()) << " levels to " << a.common.out << "\n";
  }
  return kExitOk;
}

int cmd_render(const Args& a, const std::vector<std::string>& argv) {
  if (a.common.out.empty()) throw Failure{kExitError, "render needs --out PATH"};
  SystemPtr sys = open_system(a.common, true);
  std::uint64_t cells = 0, holes = 0;
  check(projdim_render_svg(sys.get(), a.depth, a.common.out.c_str(), &cells, &holes), "render");
  Manifest manifest("render", a.common, argv);
  manifest.policy()["depth"] = a.depth;
  manifest.output(a.common.out);
  manifest.write_beside(a.common.out);
  std::cout << "wrote " << a.common.out << ": " << cells << " filled cells, " << holes << " holes\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--preset", c.preset, "built-in system (rauzy)");
  cmd->add_option("--config", c.config, "system config JSON");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_flag("--sequential", c.sequential, "deterministic single-threaded traversal");
  cmd->add_option("--out", c.out, "output path (a manifest is written beside it)");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App app{"Dimension estimates for self-projective gaskets", "projdim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", projdim_version());
  Args a;

  auto* validate = app.add_subcommand("validate", "check the tiling hypotheses of a system");
  add_common(validate, a.common);

  auto* dimension = app.add_subcommand("dimension", "estimate the dimension");
  add_common(dimension, a.common);
  dimension->add_option("--method", a.method, "sigma | hausdorff | deleo | boxcount-oracle | all")
      ->check(CLI::IsMember({"sigma", "hausdorff", "deleo", "boxcount-oracle", "all"}));
  dimension->add_option("--depth", a.depth, "word depth for sigma and hausdorff");
  dimension->add_option("--norm-cap", a.norm_cap, "largest norm cap of the counting schedule");
  dimension->add_option("--interval", a.interval, "search interval LO HI")->expected(2);
  dimension->add_option("--variant", a.variant, "singular-series exponent: s-1 | s-2")
      ->check(CLI::IsMember({"s-1", "s-2"}));
  dimension->add_option("--points", a.points, "point-cloud size for the box-count oracle");

  auto* series = app.add_subcommand("series", "dump a series as CSV");
  add_common(series, a.common);
  series->add_option("--kind", a.kind, "hole | norm | singular | counting")
      ->check(CLI::IsMember({"hole", "norm", "singular", "counting"}));
  series->add_option("--param", a.param, "parameter t, r or s");
  series->add_option("--depth", a.depth, "word depth (hole and singular series)");
  series->add_option("--norm-cap", a.norm_cap, "norm cap (norm series and counting function)");
  series->add_option("--variant", a.variant, "singular-series exponent: s-1 | s-2")
      ->check(CLI::IsMember({"s-1", "s-2"}));

  auto* render = app.add_subcommand("render", "draw a d = 2 gasket as SVG");
  add_common(render, a.common);
  render->add_option("--depth", a.depth, "depth of the drawn cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }
  a.param_set = series->count("--param") > 0;
  if (render->parsed() && render->count("--depth") == 0) a.depth = 4;

  try {
    if (validate->parsed()) return cmd_validate(a, args);
    if (dimension->parsed()) return cmd_dimension(a, args);
    if (series->parsed()) {
      if (series->count("--depth") == 0) a.depth = 10;
      return cmd_series(a, args);
    }
    if (render->parsed()) return cmd_render(a, args);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
  return kExitError;
}
