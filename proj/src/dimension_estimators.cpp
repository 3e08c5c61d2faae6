#include "projdim/dimension_estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace projdim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

void fill_cumulative(SeriesReport& report) {
  report.cumulative.resize(report.level_sum_log.size());
  long double acc = 0;
  for (std::size_t n = 0; n < report.level_sum_log.size(); ++n) {
    if (report.level_sum_log[n] != kNegInf) acc += std::exp(static_cast<long double>(report.level_sum_log[n]));
    report.cumulative[n] = static_cast<double>(acc);
  }
}

// Slope of y against x by ordinary least squares.
double ls_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

struct TableVisitor {
  LevelTable table;
  void operator()(const HoleRecord& rec) {
    table.add(rec.word.word.size(), rec.log_volume, rec.log_inradius());
  }
  TableVisitor fork() const { return {}; }
  void merge(TableVisitor&& other) { table.merge(std::move(other.table)); }
};

struct SingularVisitor {
  LevelTable table;
  void operator()(const Word& word, const IntMatrix& product) {
    const auto sv = singular_values(product);
    table.add(word.size(), std::log(sv[1] / sv[0]), std::log(sv[2] / sv[0]));
  }
  SingularVisitor fork() const { return {}; }
  void merge(SingularVisitor&& other) { table.merge(std::move(other.table)); }
};

// Accumulates sum vol * In^t, sum vol, and per-level log sums.
struct HoleSumVisitor {
  double t = 0;
  std::vector<double> level_log;
  std::vector<std::uint64_t> terms;
  long double weighted = 0;
  long double volume = 0;

  void operator()(const HoleRecord& rec) {
    const std::size_t n = rec.word.word.size();
    if (level_log.size() <= n) {
      level_log.resize(n + 1, kNegInf);
      terms.resize(n + 1, 0);
    }
    const double lt = rec.log_volume + t * rec.log_inradius();
    level_log[n] = log_add(level_log[n], lt);
    ++terms[n];
    weighted += std::exp(static_cast<long double>(lt));
    volume += std::exp(static_cast<long double>(rec.log_volume));
  }
  HoleSumVisitor fork() const { return {t, {}, {}, 0, 0}; }
  void merge(HoleSumVisitor&& o) {
    if (level_log.size() < o.level_log.size()) {
      level_log.resize(o.level_log.size(), kNegInf);
      terms.resize(o.level_log.size(), 0);
    }
    for (std::size_t n = 0; n < o.level_log.size(); ++n) {
      level_log[n] = log_add(level_log[n], o.level_log[n]);
      terms[n] += o.terms[n];
    }
    weighted += o.weighted;
    volume += o.volume;
  }
};

void require_level_depth(std::uint32_t depth) {
  if (depth < 6) fail(ErrorCode::invalid_argument, "depth too small: the level-growth estimator needs depth >= 6");
}

std::string depth_label(std::size_t depth, double top_fraction) {
  std::ostringstream out;
  out << "max-depth " << depth << ", growth fitted on top " << top_fraction << " of levels";
  return out.str();
}

}  // namespace

const char* to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::hole_series: return "hole-series";
    case SeriesKind::norm_series: return "norm-series";
    case SeriesKind::singular_series: return "singular-series";
    case SeriesKind::counting_function: return "counting-function";
  }
  return "?";
}

const char* to_string(SingularExponent variant) {
  return variant == SingularExponent::s_minus_2 ? "s-2" : "s-1";
}

// ---------------------------------------------------------------------------

void LevelTable::add(std::size_t level, double c, double w) {
  if (levels_.size() <= level) levels_.resize(level + 1);
  levels_[level].emplace_back(c, w);
}

void LevelTable::merge(LevelTable&& other) {
  if (levels_.size() < other.levels_.size()) levels_.resize(other.levels_.size());
  for (std::size_t n = 0; n < other.levels_.size(); ++n) {
    auto& dst = levels_[n];
    auto& src = other.levels_[n];
    dst.insert(dst.end(), src.begin(), src.end());
  }
}

double LevelTable::level_sum_log(std::size_t level, double x) const {
  const auto& terms = levels_.at(level);
  if (terms.empty()) return kNegInf;
  double m = kNegInf;
  for (const auto& [c, w] : terms) m = std::max(m, c + x * w);
  double s = 0;
  for (const auto& [c, w] : terms) s += std::exp(c + x * w - m);
  return m + std::log(s);
}

double LevelTable::growth(double x, std::size_t max_level, double top_fraction) const {
  if (max_level >= levels_.size()) fail(ErrorCode::invalid_argument, "level table is shallower than requested");
  const std::size_t count = max_level + 1;
  std::size_t fitted = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(count)));
  fitted = std::clamp<std::size_t>(fitted, 3, count);
  std::vector<double> xs, ys;
  for (std::size_t n = count - fitted; n < count; ++n) {
    const double y = level_sum_log(n, x);
    if (y == kNegInf) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(y);
  }
  if (xs.size() < 2) fail(ErrorCode::degenerate, "too few non-empty levels for a growth fit");
  return ls_slope(xs, ys);
}

LevelTable hole_table(const IfsSystem& system, std::uint32_t depth, const TraversalOptions& options) {
  TableVisitor v;
  enumerate_holes(system, PruningPolicy::max_depth(depth), v, options);
  return std::move(v.table);
}

LevelTable singular_table(const IfsSystem& system, std::uint32_t depth, const TraversalOptions& options) {
  if (system.dimension() != 2)
    fail(ErrorCode::unsupported, "singular-value series is defined for d = 2 only");
  SingularVisitor v;
  enumerate_words(system.generators(), PruningPolicy::max_depth(depth), v, options);
  return std::move(v.table);
}

namespace {

std::optional<double> bisect_root(const LevelTable& table, double lo, double hi, std::size_t depth,
                                  const EstimatorOptions& options, bool throw_on_failure) {
  double glo = table.growth(lo, depth, options.top_fraction);
  double ghi = table.growth(hi, depth, options.top_fraction);
  if (!(glo > 0 && ghi < 0)) {
    if (!throw_on_failure) return std::nullopt;
    std::ostringstream msg;
    msg << "non-bracketing interval [" << lo << ", " << hi << "]: level growth " << glo << " and " << ghi
        << " (need a sign change from + to -)";
    fail(ErrorCode::non_bracketing, msg.str());
  }
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double g = table.growth(mid, depth, options.top_fraction);
    if (g > 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ExponentEstimate level_growth_root(const LevelTable& table, double lo, double hi, std::size_t depth,
                                   const EstimatorOptions& options) {
  if (!(lo < hi)) fail(ErrorCode::invalid_argument, "search interval must satisfy lo < hi");
  if (!(options.tolerance > 0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
  if (!(options.top_fraction > 0 && options.top_fraction <= 1))
    fail(ErrorCode::invalid_argument, "top fraction must lie in (0, 1]");

  ExponentEstimate out;
  out.method = "level-growth-root";
  out.truncation = depth_label(depth, options.top_fraction);
  out.point = *bisect_root(table, lo, hi, depth, options, true);
  out.lo = out.point - options.tolerance;
  out.hi = out.point + options.tolerance;
  if (depth >= 2) out.shallow_point = bisect_root(table, lo, hi, depth - 2, options, false);
  if (out.shallow_point) {
    out.lo = std::min(out.lo, *out.shallow_point - options.tolerance);
    out.hi = std::max(out.hi, *out.shallow_point + options.tolerance);
  }
  out.lo = std::max(out.lo, lo);
  out.hi = std::min(out.hi, hi);
  return out;
}

SeriesReport hole_series(const IfsSystem& system, double t, const PruningPolicy& policy,
                         const TraversalOptions& options) {
  if (!(t >= -1) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "hole series needs t >= -1");
  HoleSumVisitor v;
  v.t = t;
  enumerate_holes(system, policy, v, options);
  SeriesReport out;
  out.kind = SeriesKind::hole_series;
  out.parameter = t;
  out.level_sum_log = std::move(v.level_log);
  out.terms = std::move(v.terms);
  out.truncation = policy.describe();
  fill_cumulative(out);
  return out;
}

ExponentEstimate estimate_sigma(const IfsSystem& system, double lo, double hi, std::uint32_t depth,
                                const EstimatorOptions& options) {
  if (!(lo >= -1 && hi <= 0)) fail(ErrorCode::invalid_argument, "sigma search interval must lie in [-1, 0]");
  require_level_depth(depth);
  const LevelTable table = hole_table(system, depth, options.traversal);
  return level_growth_root(table, lo, hi, depth, options);
}

// ---------------------------------------------------------------------------

double bernoulli_coefficient(std::size_t d, double t) {
  if (!(t > 0)) fail(ErrorCode::invalid_argument, "Bernoulli coefficient needs t > 0");
  double value = 1;
  for (std::size_t k = 0; k <= d; ++k) value *= static_cast<double>(k == 0 ? 1 : k) / (t + static_cast<double>(k));
  return value;
}

LaplaceValue laplace_transform_closed(const IfsSystem& system, double t, const PruningPolicy& policy,
                                      const TraversalOptions& options) {
  if (!(t > 0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "Laplace transform needs t > 0");
  HoleSumVisitor v;
  v.t = t;
  enumerate_holes(system, policy, v, options);
  LaplaceValue out;
  out.coefficient = bernoulli_coefficient(system.dimension(), t);
  out.series_sum = static_cast<double>(v.weighted);
  out.truncated_volume = static_cast<double>(v.volume);
  out.value = system.simplex_volume() / t - out.coefficient * out.series_sum;
  out.lower = out.truncated_volume / t - out.coefficient * out.series_sum;
  return out;
}

NeighborhoodVolume neighborhood_volume(const IfsSystem& system, double eps, const PruningPolicy& policy,
                                       const TraversalOptions& options) {
  if (!(eps > 0) || !std::isfinite(eps)) fail(ErrorCode::invalid_argument, "neighborhood volume needs eps > 0");
  const double d = static_cast<double>(system.dimension());
  struct V {
    double eps, d;
    long double inner = 0, volume = 0;
    void operator()(const HoleRecord& rec) {
      const long double vol = std::exp(static_cast<long double>(rec.log_volume));
      const double keep = std::max(0.0, 1.0 - eps / rec.inradius);
      inner += vol * (1.0L - std::pow(static_cast<long double>(keep), d));
      volume += vol;
    }
    V fork() const { return {eps, d}; }
    void merge(V&& o) {
      inner += o.inner;
      volume += o.volume;
    }
  } v{eps, d};
  enumerate_holes(system, policy, v, options);
  NeighborhoodVolume out;
  out.lower = static_cast<double>(v.inner);
  out.upper = static_cast<double>(v.inner + std::max(0.0L, system.simplex_volume() - v.volume));
  return out;
}

// ---------------------------------------------------------------------------

SeriesReport norm_series(const IfsSystem& system, double r, double cap) {
  if (!(r >= 0) || !std::isfinite(r)) fail(ErrorCode::invalid_argument, "norm series needs r >= 0");
  if (!(cap >= 1) || !std::isfinite(cap)) fail(ErrorCode::invalid_argument, "norm cap must be >= 1");
  const auto hist = norm_histogram(system.generators(), static_cast<std::uint64_t>(std::floor(cap)));
  SeriesReport out;
  out.kind = SeriesKind::norm_series;
  out.parameter = r;
  std::ostringstream trunc;
  trunc << "norm-cap " << static_cast<std::uint64_t>(std::floor(cap)) << ", levels are dyadic norm shells";
  out.truncation = trunc.str();
  // Shell sums are accumulated directly so that r = 0 reproduces the integer
  // counts exactly.
  std::vector<long double> shell_sum;
  for (std::uint64_t v = 1; v < hist.counts.size(); ++v) {
    if (hist.counts[v] == 0) continue;
    const std::size_t shell = static_cast<std::size_t>(std::bit_width(v) - 1);
    if (shell_sum.size() <= shell) {
      shell_sum.resize(shell + 1, 0.0L);
      out.terms.resize(shell + 1, 0);
    }
    shell_sum[shell] += static_cast<long double>(hist.counts[v]) *
                        std::pow(static_cast<long double>(v), -static_cast<long double>(r));
    out.terms[shell] += hist.counts[v];
  }
  long double acc = 0;
  for (long double x : shell_sum) {
    out.level_sum_log.push_back(x > 0 ? static_cast<double>(std::log(x)) : kNegInf);
    acc += x;
    out.cumulative.push_back(static_cast<double>(acc));
  }
  return out;
}

SeriesReport counting_function(const IfsSystem& system, std::span<const double> caps) {
  const auto counts = count_words_by_norm(system.generators(), caps);
  SeriesReport out;
  out.kind = SeriesKind::counting_function;
  out.parameter = 0;
  std::ostringstream trunc;
  trunc << "norm caps";
  for (double c : caps) trunc << ' ' << c;
  trunc << "; level n is the n-th cap";
  out.truncation = trunc.str();
  std::uint64_t prev = 0;
  for (std::uint64_t c : counts.counts) {
    const std::uint64_t inc = c - prev;
    out.level_sum_log.push_back(inc == 0 ? kNegInf : static_cast<double>(std::log(static_cast<long double>(inc))));
    out.terms.push_back(inc);
    prev = c;
  }
  fill_cumulative(out);
  for (std::size_t n = 0; n < counts.counts.size(); ++n) out.cumulative[n] = static_cast<double>(counts.counts[n]);
  return out;
}

ExponentEstimate counting_exponent_from_counts(std::span<const double> caps, std::span<const std::uint64_t> counts) {
  if (caps.size() != counts.size()) fail(ErrorCode::invalid_argument, "caps and counts differ in length");
  if (caps.size() < 4) fail(ErrorCode::invalid_argument, "schedule too short: at least 4 caps are needed");
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!(caps[i] > 1) || !std::isfinite(caps[i]))
      fail(ErrorCode::invalid_argument, "schedule caps must be finite and > 1");
    if (i > 0 && !(caps[i] > caps[i - 1]))
      fail(ErrorCode::invalid_argument, "schedule must be strictly increasing");
    if (counts[i] == 0) fail(ErrorCode::invalid_argument, "counts must be positive");
  }
  const std::size_t n = caps.size();
  const std::size_t tail = std::max<std::size_t>(3, (n + 1) / 2);
  std::vector<double> lx, ly;
  for (std::size_t i = n - tail; i < n; ++i) {
    lx.push_back(std::log(caps[i]));
    ly.push_back(std::log(static_cast<double>(counts[i])));
  }
  ExponentEstimate out;
  out.method = "counting-regression";
  out.point = ls_slope(lx, ly);
  out.lo = out.hi = out.point;
  for (std::size_t i = 1; i < lx.size(); ++i) {
    const double s = (ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]);
    out.pair_slopes.push_back(s);
    out.lo = std::min(out.lo, s);
    out.hi = std::max(out.hi, s);
  }
  std::ostringstream trunc;
  trunc << "norm caps " << caps.front() << ".." << caps.back() << ", fitted on last " << tail;
  out.truncation = trunc.str();
  return out;
}

ExponentEstimate counting_exponent(const IfsSystem& system, std::span<const double> caps) {
  if (caps.size() < 4) fail(ErrorCode::invalid_argument, "schedule too short: at least 4 caps are needed");
  const auto counts = count_words_by_norm(system.generators(), caps);
  return counting_exponent_from_counts(caps, counts.counts);
}

// ---------------------------------------------------------------------------

double de_leo_lower_bound(std::size_t d, double rho) {
  if (!(rho >= 0)) fail(ErrorCode::invalid_argument, "rho must be non-negative");
  const double dd = static_cast<double>(d);
  return std::max(dd - 1, dd * rho / (dd + 1));
}

DeLeoBound de_leo_lower_bound(std::size_t d, const ExponentEstimate& rho) {
  return {de_leo_lower_bound(d, rho.point), de_leo_lower_bound(d, std::max(0.0, rho.lo)),
          de_leo_lower_bound(d, std::max(0.0, rho.hi))};
}

DimensionEstimate dimension_estimate(std::size_t d, const ExponentEstimate& sigma, const ExponentEstimate& rho) {
  DimensionEstimate out;
  out.d = d;
  const double dd = static_cast<double>(d);
  out.box = dd + sigma.point;
  out.box_lo = dd + sigma.lo;
  out.box_hi = dd + sigma.hi;
  out.de_leo = de_leo_lower_bound(d, rho);
  return out;
}

// ---------------------------------------------------------------------------

SeriesReport singular_series(const IfsSystem& system, double s, SingularExponent variant,
                             const PruningPolicy& policy, const TraversalOptions& options) {
  if (!(s > 1 && s < 2)) fail(ErrorCode::invalid_argument, "singular series needs s in (1, 2)");
  if (system.dimension() != 2)
    fail(ErrorCode::unsupported, "singular-value series is defined for d = 2 only");
  const double x = s - (variant == SingularExponent::s_minus_2 ? 2.0 : 1.0);
  struct V {
    double x;
    std::vector<double> level_log;
    std::vector<std::uint64_t> terms;
    void operator()(const Word& word, const IntMatrix& product) {
      const auto sv = singular_values(product);
      const double lt = std::log(sv[1] / sv[0]) + x * std::log(sv[2] / sv[0]);
      const std::size_t n = word.size();
      if (level_log.size() <= n) {
        level_log.resize(n + 1, kNegInf);
        terms.resize(n + 1, 0);
      }
      level_log[n] = log_add(level_log[n], lt);
      ++terms[n];
    }
    V fork() const { return {x, {}, {}}; }
    void merge(V&& o) {
      if (level_log.size() < o.level_log.size()) {
        level_log.resize(o.level_log.size(), kNegInf);
        terms.resize(o.level_log.size(), 0);
      }
      for (std::size_t n = 0; n < o.level_log.size(); ++n) {
        level_log[n] = log_add(level_log[n], o.level_log[n]);
        terms[n] += o.terms[n];
      }
    }
  } v{x, {}, {}};
  enumerate_words(system.generators(), policy, v, options);
  SeriesReport out;
  out.kind = SeriesKind::singular_series;
  out.parameter = s;
  out.level_sum_log = std::move(v.level_log);
  out.terms = std::move(v.terms);
  out.truncation = policy.describe() + ", exponent " + to_string(variant);
  fill_cumulative(out);
  return out;
}

ExponentEstimate estimate_hausdorff(const IfsSystem& system, double lo, double hi, std::uint32_t depth,
                                    SingularExponent variant, const EstimatorOptions& options) {
  if (!(lo > 1 && hi < 2)) fail(ErrorCode::invalid_argument, "Hausdorff search interval must lie in (1, 2)");
  require_level_depth(depth);
  const double shift = variant == SingularExponent::s_minus_2 ? 2.0 : 1.0;
  const LevelTable table = singular_table(system, depth, options.traversal);
  ExponentEstimate out = level_growth_root(table, lo - shift, hi - shift, depth, options);
  out.point += shift;
  out.lo += shift;
  out.hi += shift;
  if (out.shallow_point) *out.shallow_point += shift;
  out.truncation += std::string(", exponent ") + to_string(variant);
  return out;
}

}  // namespace projdim
