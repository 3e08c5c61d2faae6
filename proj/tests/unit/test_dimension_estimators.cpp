#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "projdim/dimension_estimators.hpp"

using namespace projdim;
using doctest::Approx;

namespace {

IfsSystem single_generator() {
  std::vector<GeneratorMatrix> gens;
  gens.emplace_back(IntMatrix::from_rows({{1, 1, 1}, {0, 1, 0}, {0, 0, 1}}));
  std::vector<HoleMatrix> holes;
  holes.emplace_back(3, std::vector<long double>{1, 0, 0, 0, 1, 0, 0, 0, 1});
  return IfsSystem("single", std::move(gens), std::move(holes));
}

IfsSystem permutation_system() {
  std::vector<GeneratorMatrix> gens;
  gens.emplace_back(IntMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
  gens.emplace_back(IntMatrix::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}));
  std::vector<HoleMatrix> holes;
  holes.emplace_back(3, std::vector<long double>{1, 0, 0, 0, 1, 0, 0, 0, 1});
  return IfsSystem("permutations", std::move(gens), std::move(holes));
}

}  // namespace

TEST_CASE("level table") {
  LevelTable t;
  t.add(0, 0.0, 0.0);
  t.add(1, std::log(2.0), std::log(0.5));
  t.add(1, std::log(2.0), std::log(0.5));
  CHECK(t.levels() == 2);
  CHECK(t.terms(1) == 2);
  CHECK(t.level_sum_log(1, 1.0) == Approx(std::log(2.0)));
  CHECK(t.level_sum_log(1, 0.0) == Approx(std::log(4.0)));

  // a_n(x) = 3^n 2^(-n x) has growth log 3 - x log 2 everywhere.
  LevelTable g;
  for (std::size_t n = 0; n <= 8; ++n)
    for (int k = 0; k < std::pow(3, n); ++k) g.add(n, 0.0, -static_cast<double>(n) * std::log(2.0));
  CHECK(g.growth(1.0, 8, 1.0 / 3) == Approx(std::log(3.0) - std::log(2.0)));
  EstimatorOptions opts;
  const ExponentEstimate root = level_growth_root(g, 0.5, 3.0, 8, opts);
  CHECK(root.point == Approx(std::log(3.0) / std::log(2.0)).epsilon(2e-4));
  CHECK(root.lo <= root.point);
  CHECK(root.point <= root.hi);
  CHECK_THROWS_AS(level_growth_root(g, 2.0, 3.0, 8, opts), Error);
}

TEST_CASE("hole series volume exhaustion") {
  const IfsSystem sys = rauzy_system();
  const SeriesReport r = hole_series(sys, 0.0, PruningPolicy::max_depth(8));
  REQUIRE(r.cumulative.size() == 9);
  CHECK(r.cumulative[0] == Approx(sys.simplex_volume() / 4));
  for (std::size_t n = 1; n < r.cumulative.size(); ++n) CHECK(r.cumulative[n] > r.cumulative[n - 1]);
  CHECK(r.total() < sys.simplex_volume());
  CHECK(r.terms[3] == 27);

  // Depth 0: the single main-hole term vol * In^t.
  const SeriesReport d0 = hole_series(sys, -0.5, PruningPolicy::max_depth(0));
  const Simplex& main = sys.main_holes()[0];
  CHECK(d0.total() == Approx(main.volume() * std::pow(main.inradius(), -0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(hole_series(sys, -1.5, PruningPolicy::max_depth(2)), Error);
}

TEST_CASE("hole series is non-increasing in t") {
  const IfsSystem sys = rauzy_system();
  double previous = INFINITY;
  for (double t : {-0.9, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    const SeriesReport r = hole_series(sys, t, PruningPolicy::max_depth(7));
    CHECK(r.total() < previous);
    previous = r.total();
  }
}

TEST_CASE("sigma estimator") {
  const IfsSystem sys = rauzy_system();
  CHECK_THROWS_AS(estimate_sigma(sys, -1, 0, 5), Error);
  try {
    estimate_sigma(sys, -0.1, 0, 8);
    FAIL("expected non-bracketing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_bracketing);
  }
  const ExponentEstimate s = estimate_sigma(sys, -1, 0, 10);
  CHECK(2 + s.point > 1.19);
  CHECK(2 + s.point < 1.7415);
  CHECK(s.shallow_point.has_value());
  CHECK(s.lo <= s.point);
  CHECK(s.point <= s.hi);

  // Parallel and sequential traversal give the same estimate.
  EstimatorOptions par;
  par.traversal.sequential = false;
  par.traversal.threads = 3;
  const ExponentEstimate p = estimate_sigma(sys, -1, 0, 10, par);
  CHECK(p.point == Approx(s.point).epsilon(1e-9));

  // De Leo's lower bound sits below 2 + sigma.
  const std::vector<double> caps{125, 250, 500, 1000, 2000};
  const ExponentEstimate rho = counting_exponent(sys, caps);
  const DimensionEstimate dim = dimension_estimate(2, s, rho);
  CHECK(dim.box == Approx(2 + s.point));
  CHECK(dim.de_leo.value <= dim.box_hi);
}

TEST_CASE("bernoulli coefficient") {
  CHECK(bernoulli_coefficient(2, 1) == Approx(1.0 / 3));
  CHECK(bernoulli_coefficient(3, 2) == Approx(6.0 / (2 * 3 * 4 * 5)));
  CHECK(bernoulli_coefficient(2, 0.5) == Approx(2.0 / (0.5 * 1.5 * 2.5)));
}

TEST_CASE("laplace transform") {
  const IfsSystem sys = rauzy_system();
  const double vol = sys.simplex_volume();
  const LaplaceValue big = laplace_transform_closed(sys, 200.0, PruningPolicy::max_depth(4));
  CHECK(big.value * 200.0 == Approx(vol).epsilon(1e-6));
  const LaplaceValue one = laplace_transform_closed(sys, 1.0, PruningPolicy::max_depth(6));
  CHECK(one.value >= one.lower);
  CHECK(one.lower > 0);
  CHECK(one.coefficient == Approx(bernoulli_coefficient(2, 1.0)));
  CHECK_THROWS_AS(laplace_transform_closed(sys, 0.0, PruningPolicy::max_depth(2)), Error);
  CHECK_THROWS_AS(laplace_transform_closed(sys, -1.0, PruningPolicy::max_depth(2)), Error);
}

TEST_CASE("neighbourhood volume") {
  const IfsSystem sys = rauzy_system();
  const double vol = sys.simplex_volume();
  const Simplex& main = sys.main_holes()[0];
  const NeighborhoodVolume all = neighborhood_volume(sys, 1.0, PruningPolicy::max_depth(3));
  CHECK(all.upper == Approx(vol).epsilon(1e-13));
  const NeighborhoodVolume half = neighborhood_volume(sys, main.inradius() / 2, PruningPolicy::max_depth(0));
  CHECK(half.lower == Approx(0.75 * main.volume()).epsilon(1e-13));
  CHECK(half.upper == Approx(half.lower + vol - main.volume()).epsilon(1e-13));
  CHECK_THROWS_AS(neighborhood_volume(sys, 0.0, PruningPolicy::max_depth(1)), Error);
}

TEST_CASE("norm series and counting function") {
  const IfsSystem sys = rauzy_system();
  const SeriesReport one = norm_series(sys, 1.0, 1.0);
  CHECK(one.total() == 1.0);
  CHECK(one.terms[0] == 1);

  const SeriesReport raw = norm_series(sys, 0.0, 64);
  std::vector<double> caps;
  for (int k = 0; k <= 6; ++k) caps.push_back(std::min(std::ldexp(1.0, k + 1) - 1, 64.0));
  const SeriesReport count = counting_function(sys, caps);
  REQUIRE(raw.cumulative.size() == count.cumulative.size());
  for (std::size_t i = 0; i < raw.cumulative.size(); ++i) CHECK(raw.cumulative[i] == count.cumulative[i]);
  CHECK_THROWS_AS(norm_series(sys, -0.5, 10), Error);
}

TEST_CASE("counting exponent") {
  const IfsSystem sys = rauzy_system();
  const std::vector<double> caps{100, 200, 400, 800, 1600};
  const ExponentEstimate rho = counting_exponent(sys, caps);
  CHECK(rho.point > 2.0);
  CHECK(rho.point < 3.0);
  CHECK(rho.method == "counting-regression");

  // One parabolic generator: ||N^k|| = k + 1, so the count grows linearly.
  const ExponentEstimate lin = counting_exponent(single_generator(), std::vector<double>{1e3, 1e4, 1e5, 1e6});
  CHECK(lin.point == Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(counting_exponent(sys, std::vector<double>{100, 100, 100, 100}), Error);
  CHECK_THROWS_AS(counting_exponent(sys, std::vector<double>{100, 200}), Error);

  // Shell sums of the norm series decay above rho and grow below it.
  const SeriesReport above = norm_series(sys, rho.point + 0.2, 4096);
  const SeriesReport below = norm_series(sys, rho.point - 0.2, 4096);
  const std::size_t n = above.level_sum_log.size() - 2;
  CHECK(above.level_sum_log[n] < above.level_sum_log[n - 3]);
  CHECK(below.level_sum_log[n] > below.level_sum_log[n - 3]);
}

TEST_CASE("de leo bound") {
  CHECK(de_leo_lower_bound(2, 0.0) == 1.0);
  CHECK(de_leo_lower_bound(3, 0.0) == 2.0);
  CHECK(std::round(de_leo_lower_bound(2, 2.4294) * 1e4) / 1e4 == 1.6196);
  ExponentEstimate rho;
  rho.point = 2.43;
  rho.lo = 2.4;
  rho.hi = 2.46;
  const DeLeoBound b = de_leo_lower_bound(2, rho);
  CHECK(b.value == Approx(1.62));
  CHECK(b.lo == Approx(1.6));
  CHECK(b.hi == Approx(1.64));
}

TEST_CASE("singular series") {
  const IfsSystem sys = rauzy_system();
  for (auto variant : {SingularExponent::s_minus_2, SingularExponent::s_minus_1}) {
    const SeriesReport r = singular_series(sys, 1.5, variant, PruningPolicy::max_depth(0));
    CHECK(r.total() == 1.0);
  }
  const IfsSystem perm = permutation_system();
  const SeriesReport p = singular_series(perm, 1.3, SingularExponent::s_minus_2, PruningPolicy::max_depth(4));
  CHECK(p.total() == Approx(1 + 2 + 4 + 8 + 16));
  CHECK_THROWS_AS(singular_series(sys, 2.0, SingularExponent::s_minus_1, PruningPolicy::max_depth(2)), Error);
  CHECK_THROWS_AS(singular_series(sys, 1.0, SingularExponent::s_minus_1, PruningPolicy::max_depth(2)), Error);
}

TEST_CASE("hole series is dominated by the singular series") {
  const IfsSystem sys = rauzy_system();
  for (double s : {1.3, 1.6, 1.9}) {
    const SeriesReport holes = hole_series(sys, s - 2, PruningPolicy::max_depth(10));
    const SeriesReport sing = singular_series(sys, s, SingularExponent::s_minus_2, PruningPolicy::max_depth(10));
    double c = 0;
    for (std::size_t n = 0; n < holes.level_sum_log.size(); ++n)
      c = std::max(c, std::exp(holes.level_sum_log[n] - sing.level_sum_log[n]));
    MESSAGE("s = " << s << ": C = " << c);
    CHECK(std::isfinite(c));
    CHECK(holes.total() <= c * sing.total());
  }
}

TEST_CASE("hausdorff estimator") {
  const IfsSystem sys = rauzy_system();
  try {
    estimate_hausdorff(sys, 1.9, 1.95, 8);
    FAIL("expected non-bracketing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_bracketing);
  }
  CHECK_THROWS_AS(estimate_hausdorff(sys, 0.5, 1.5, 8), Error);
  const ExponentEstimate h = estimate_hausdorff(sys, 1.01, 1.99, 9);
  CHECK(h.point > 1.19);
  CHECK(h.point < 1.7415);
}

TEST_CASE("series kind names") {
  CHECK(std::string(to_string(SeriesKind::hole_series)) == "hole-series");
  CHECK(std::string(to_string(SeriesKind::counting_function)) == "counting-function");
  CHECK(std::string(to_string(SingularExponent::s_minus_2)) == "s-2");
}
