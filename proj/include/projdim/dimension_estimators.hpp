#pragma once

// Series over holes and words, critical-exponent estimation and the derived
// dimension estimates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "projdim/ifs_attractor.hpp"

namespace projdim {

enum class SeriesKind { hole_series, norm_series, singular_series, counting_function };
const char* to_string(SeriesKind kind);

// Exponent applied to sigma_3/sigma_1 in the singular-value series:
// phi_s = (s2/s1) (s3/s1)^(s - 2) or (s2/s1) (s3/s1)^(s - 1).
enum class SingularExponent { s_minus_2, s_minus_1 };
const char* to_string(SingularExponent variant);

struct SeriesReport {
  SeriesKind kind = SeriesKind::hole_series;
  double parameter = 0;
  // Level n is the word length for hole and singular series, the dyadic shell
  // 2^n <= ||N_i|| < 2^(n+1) for the norm series, and the cap index for the
  // counting function.
  std::vector<double> level_sum_log;  // log a_n; -inf for an empty level
  std::vector<double> cumulative;
  std::vector<std::uint64_t> terms;
  std::string truncation;

  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

struct ExponentEstimate {
  double point = 0;
  double lo = 0;
  double hi = 0;
  std::string method;  // level-growth-root | counting-regression
  std::string truncation;
  std::optional<double> shallow_point;  // level-growth root two levels shallower
  std::vector<double> pair_slopes;      // counting regression: consecutive log-log slopes
};

struct EstimatorOptions {
  // Fraction of the deepest levels fitted by the level-growth statistic.
  double top_fraction = 1.0 / 3.0;
  double tolerance = 1e-4;  // bisection width
  TraversalOptions traversal{};
};

// Terms exp(c + x w) grouped by word length; level sums are evaluated for any x
// without re-enumerating. Hole series: c = log vol, w = log In, x = t.
// Singular series: c = log(s2/s1), w = log(s3/s1), x = s - 2 or s - 1.
class LevelTable {
 public:
  void add(std::size_t level, double c, double w);
  void merge(LevelTable&& other);

  std::size_t levels() const noexcept { return levels_.size(); }
  std::uint64_t terms(std::size_t level) const { return levels_.at(level).size(); }
  double level_sum_log(std::size_t level, double x) const;
  // Least-squares slope of log a_n(x) against n over the top fraction of levels
  // 0..max_level (at least three levels).
  double growth(double x, std::size_t max_level, double top_fraction) const;

 private:
  std::vector<std::vector<std::pair<double, double>>> levels_;
};

LevelTable hole_table(const IfsSystem& system, std::uint32_t depth, const TraversalOptions& options = {});
LevelTable singular_table(const IfsSystem& system, std::uint32_t depth, const TraversalOptions& options = {});

// Root of the level-growth statistic for x in [lo, hi] (g decreasing in x).
ExponentEstimate level_growth_root(const LevelTable& table, double lo, double hi, std::size_t depth,
                                   const EstimatorOptions& options);

SeriesReport hole_series(const IfsSystem& system, double t, const PruningPolicy& policy,
                         const TraversalOptions& options = {});
ExponentEstimate estimate_sigma(const IfsSystem& system, double lo, double hi, std::uint32_t depth,
                                const EstimatorOptions& options = {});

// d! / (t (t+1) ... (t+d)) = integral_0^1 y^(t-1) (1-y)^d dy.
double bernoulli_coefficient(std::size_t d, double t);

struct LaplaceValue {
  double value = 0;             // vol(Delta)/t - B(t) * S(t)
  double lower = 0;             // (truncated hole volume)/t - B(t) * S(t)
  double coefficient = 0;       // B(t)
  double series_sum = 0;        // S(t) = sum vol(hole) In(hole)^t over the truncation
  double truncated_volume = 0;  // sum vol(hole) over the truncation
};

LaplaceValue laplace_transform_closed(const IfsSystem& system, double t, const PruningPolicy& policy,
                                      const TraversalOptions& options = {});

struct NeighborhoodVolume {
  double lower = 0;  // sum of vol(L_eps(hole)) over the truncation
  double upper = 0;  // lower + vol(Delta) - sum vol(hole)
};

NeighborhoodVolume neighborhood_volume(const IfsSystem& system, double eps, const PruningPolicy& policy,
                                       const TraversalOptions& options = {});

SeriesReport norm_series(const IfsSystem& system, double r, double cap);
SeriesReport counting_function(const IfsSystem& system, std::span<const double> caps);
ExponentEstimate counting_exponent(const IfsSystem& system, std::span<const double> caps);
ExponentEstimate counting_exponent_from_counts(std::span<const double> caps,
                                               std::span<const std::uint64_t> counts);

struct DeLeoBound {
  double value = 0;
  double lo = 0;
  double hi = 0;
};

// max(d - 1, d rho / (d + 1)).
double de_leo_lower_bound(std::size_t d, double rho);
DeLeoBound de_leo_lower_bound(std::size_t d, const ExponentEstimate& rho);

struct DimensionEstimate {
  std::size_t d = 0;
  double box = 0;  // d + sigma
  double box_lo = 0;
  double box_hi = 0;
  DeLeoBound de_leo;
};

DimensionEstimate dimension_estimate(std::size_t d, const ExponentEstimate& sigma, const ExponentEstimate& rho);

SeriesReport singular_series(const IfsSystem& system, double s, SingularExponent variant,
                             const PruningPolicy& policy, const TraversalOptions& options = {});
ExponentEstimate estimate_hausdorff(const IfsSystem& system, double lo, double hi, std::uint32_t depth,
                                    SingularExponent variant = SingularExponent::s_minus_1,
                                    const EstimatorOptions& options = {});

}  // namespace projdim
