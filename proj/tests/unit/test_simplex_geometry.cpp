#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "internal/random.hpp"
#include "projdim/ifs_attractor.hpp"
#include "projdim/linear_program.hpp"
#include "projdim/oracles.hpp"
#include "projdim/simplex_geometry.hpp"

using namespace projdim;
using doctest::Approx;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

Simplex midpoint_triangle() { return Simplex({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}); }

Simplex scalene() { return Simplex({{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.15, 0.25, 0.6}}); }

}  // namespace

TEST_CASE("standard simplex") {
  const Simplex d = Simplex::standard(2);
  CHECK(d.volume() == Approx(kSqrt3 / 2).epsilon(1e-14));
  CHECK(standard_simplex_volume(2) == Approx(kSqrt3 / 2).epsilon(1e-14));
  for (double f : d.facet_measures()) CHECK(f == Approx(kSqrt2));
  CHECK(d.perimeter() == Approx(3 * kSqrt2));
  for (double c : d.incentre()) CHECK(c == Approx(1.0 / 3));
  CHECK(d.inradius() == Approx(1 / std::sqrt(6.0)).epsilon(1e-14));
  // vol of the standard d-simplex in the hyperplane is sqrt(d+1)/d!.
  CHECK(standard_simplex_volume(3) == Approx(2.0 / 6));
  CHECK(Simplex::standard(4).volume() == Approx(std::sqrt(5.0) / 24));
}

TEST_CASE("main hole") {
  const Simplex h = midpoint_triangle();
  CHECK(h.volume() == Approx(kSqrt3 / 8).epsilon(1e-14));
  for (double f : h.facet_measures()) CHECK(f == Approx(kSqrt2 / 2));
  CHECK(h.perimeter() == Approx(3 * kSqrt2 / 2));
  for (double c : h.incentre()) CHECK(c == Approx(1.0 / 3));
  CHECK(h.inradius() == Approx(0.5 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(h.inradius() == Approx(0.20412).epsilon(1e-5));
}

TEST_CASE("degenerate simplex") {
  const Simplex s({{1, 0, 0}, {1, 0, 0}, {0, 0, 1}});
  CHECK(s.degenerate());
  CHECK(s.volume() == 0);
  CHECK_THROWS_AS(s.perimeter(), Error);
  CHECK_THROWS_AS(s.inradius(), Error);
  CHECK_THROWS_AS(s.incentre(), Error);
}

TEST_CASE("incentre matches the LP Chebyshev centre") {
  const Simplex s = scalene();
  const ChebyshevCentre c = chebyshev_center(s);
  CHECK(c.radius == Approx(s.inradius()).epsilon(1e-9));
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(c.centre[i] - s.incentre()[i]) < 1e-9);
  // Equidistant from every facet: distance to facet j is b_j h_j.
  const auto b = s.barycentric(s.incentre());
  for (std::size_t j = 0; j < 3; ++j) CHECK(b[j] * s.height(j) == Approx(s.inradius()));
}

TEST_CASE("inradius scales with the simplex") {
  const Simplex s = scalene();
  for (double lambda : {0.25, 0.5, 0.9}) {
    const Simplex t = s.scaled_about_incentre(lambda);
    CHECK(t.inradius() == Approx(lambda * s.inradius()));
    CHECK(t.volume() == Approx(lambda * lambda * s.volume()));
  }
}

TEST_CASE("inner neighbourhood closed form") {
  const Simplex s = scalene();
  const double in = s.inradius();
  CHECK(inner_neighborhood_volume(s, in) == Approx(s.volume()));
  CHECK(inner_neighborhood_volume(s, 2 * in) == Approx(s.volume()));
  CHECK(inner_neighborhood_volume(s, in / 2) == Approx(0.75 * s.volume()));
  CHECK(inner_neighborhood_volume(s, 0) == 0);
  CHECK_THROWS_AS(inner_neighborhood_volume(s, -1e-3), Error);

  const Simplex t = Simplex::standard(3);
  CHECK(inner_neighborhood_volume(t, t.inradius() / 2) == Approx(t.volume() * (1 - 0.125)));
}

TEST_CASE("excision identity") {
  // L_eps(S) = S minus the copy scaled by 1 - eps/In about the incentre.
  const Simplex s = scalene();
  const double eps = 0.4 * s.inradius();
  const Simplex core = s.scaled_about_incentre(1 - eps / s.inradius());
  detail::Rng rng(7);
  int mismatches = 0;
  for (int i = 0; i < 20000; ++i) {
    const Point x = detail::uniform_in_hull(rng, s.vertices());
    const bool near = s.distance_to_boundary(x) <= eps;
    const double margin = std::abs(s.distance_to_boundary(x) - eps);
    if (margin < 1e-12) continue;
    if (near == core.contains(x)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("polytope upper bound") {
  const ConvexPolytope simplex_poly = ConvexPolytope::from_simplex(scalene());
  const Simplex s = scalene();
  for (double f : {0.1, 0.5, 0.9, 1.5})
    CHECK(inner_neighborhood_volume_upper(simplex_poly, f * s.inradius()) ==
          Approx(inner_neighborhood_volume(s, f * s.inradius())));

  // A convex quadrilateral (kite-like) inside the simplex.
  const ConvexPolytope quad({{0.6, 0.3, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.3, 0.6}, {0.45, 0.1, 0.45}});
  CHECK(quad.vertices().size() == 4);
  CHECK(inner_neighborhood_volume_upper(quad, quad.inradius()) == Approx(quad.volume()));
  const double eps = quad.inradius() / 2;
  const McEstimate mc = mc_inner_volume(quad, eps, 200000, 11);
  CHECK(inner_neighborhood_volume_upper(quad, eps) >= mc.value - 3 * mc.standard_error);

  // Concavity of eps -> bound: midpoint value >= average of endpoints.
  const double in = quad.inradius();
  for (double a = 0; a < 0.8; a += 0.1) {
    const double lo = inner_neighborhood_volume_upper(quad, a * in);
    const double hi = inner_neighborhood_volume_upper(quad, (a + 0.2) * in);
    const double mid = inner_neighborhood_volume_upper(quad, (a + 0.1) * in);
    CHECK(mid >= 0.5 * (lo + hi) - 1e-15);
  }
}

TEST_CASE("convex polytope drops interior points") {
  const ConvexPolytope p({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  CHECK(p.vertices().size() == 3);
  CHECK(p.is_simplex());
  CHECK(p.volume() == Approx(kSqrt3 / 2));
  CHECK(p.surface_measure() == Approx(3 * kSqrt2));
}

TEST_CASE("image simplex") {
  const IfsSystem sys = rauzy_system();
  const Simplex delta = Simplex::standard(2);
  const Simplex same = image_simplex(IntMatrix::identity(3), delta);
  CHECK(same.vertices() == delta.vertices());

  const Simplex c = image_simplex(sys.generators()[0].matrix(), delta);
  CHECK(c.vertices()[0] == Point{1, 0, 0});
  CHECK(c.vertices()[1][0] == Approx(0.5));
  CHECK(c.vertices()[1][1] == Approx(0.5));
  CHECK(c.vertices()[2][0] == Approx(0.5));
  CHECK(c.vertices()[2][2] == Approx(0.5));

  const Simplex h = image_simplex(sys.holes()[0], delta);
  // M e_j is the midpoint of the side opposite vertex j.
  const Simplex m({{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}});
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) CHECK(h.vertices()[j][i] == Approx(m.vertices()[j][i]).epsilon(1e-15));
}

TEST_CASE("volume ratio") {
  const IfsSystem sys = rauzy_system();
  const Simplex delta = Simplex::standard(2);
  CHECK(volume_ratio(IntMatrix::identity(3), delta) == 1);
  for (const auto& g : sys.generators()) {
    CHECK(volume_ratio(g.matrix(), delta) == Approx(0.25).epsilon(1e-15));
    CHECK(image_simplex(g.matrix(), delta).volume() == Approx(delta.volume() / 4).epsilon(1e-13));
  }
  CHECK(volume_ratio(sys.holes()[0], delta) == Approx(0.25).epsilon(1e-15));

  // The ratio formula holds on an arbitrary simplex as well.
  const Simplex s = scalene();
  const IntMatrix n = sys.generators()[0].matrix() * sys.generators()[2].matrix();
  CHECK(volume_ratio(n, s) * s.volume() == Approx(image_simplex(n, s).volume()).epsilon(1e-12));
  CHECK(std::exp(log_volume_ratio(n, s.vertices())) == Approx(volume_ratio(n, s)).epsilon(1e-14));
}

TEST_CASE("barycentric coordinates and containment") {
  const Simplex s = scalene();
  const auto b = s.barycentric(s.incentre());
  double total = 0;
  for (double v : b) {
    CHECK(v > 0);
    total += v;
  }
  CHECK(total == Approx(1));
  CHECK(s.contains(s.incentre()));
  CHECK_FALSE(s.contains(Point{0, 0, 1}));
  CHECK(s.distance_to_boundary(s.incentre()) == Approx(s.inradius()));
}

TEST_CASE("linear program") {
  // max x + y, x + 2y <= 4, 3x + y <= 6 -> (8/5, 6/5).
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 1;
  Eigen::VectorXd b(2), c(2);
  b << 4, 6;
  c << 1, 1;
  const LpResult r = maximize(a, b, c);
  CHECK(r.x(0) == Approx(1.6));
  CHECK(r.x(1) == Approx(1.2));
  CHECK(r.objective == Approx(2.8));

  Eigen::MatrixXd u(1, 2);
  u << 1, -1;
  Eigen::VectorXd ub(1);
  ub << 1;
  CHECK_THROWS_AS(maximize(u, ub, c), Error);
}
