#pragma once

// Geometry of simplices and convex polytopes inside the hyperplane |x| = 1.
// Volumes are d-dimensional Lebesgue measure in that hyperplane.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "projdim/matrix_words.hpp"

namespace projdim {

// Isometry between the hyperplane {x in R^{d+1} : sum x = 1} and R^d. The origin
// sits at the barycentre of the standard simplex.
class HyperplaneFrame {
 public:
  explicit HyperplaneFrame(std::size_t d);
  static const HyperplaneFrame& of(std::size_t d);

  std::size_t dimension() const noexcept { return d_; }
  Eigen::VectorXd to_local(std::span<const double> x) const;
  Point to_ambient(const Eigen::VectorXd& y) const;
  // Local image of an ambient direction (a vector with zero coordinate sum).
  Eigen::VectorXd direction_to_local(std::span<const double> v) const;

 private:
  std::size_t d_;
  Eigen::MatrixXd basis_;  // (d+1) x d, orthonormal columns spanning sum x = 0
};

double standard_simplex_volume(std::size_t d);

class Simplex {
 public:
  // d+1 points on the unit simplex. Degenerate inputs are accepted and
  // flagged; the derived quantities below then throw.
  explicit Simplex(std::vector<Point> vertices);
  static Simplex standard(std::size_t d);

  std::size_t dimension() const noexcept { return d_; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  bool degenerate() const noexcept { return degenerate_; }

  double volume() const noexcept { return volume_; }
  double log_volume() const noexcept { return log_volume_; }
  const std::vector<double>& facet_measures() const;  // facet j omits vertex j
  double perimeter() const;
  double inradius() const;  // d * vol / per
  const Point& incentre() const;

  // Barycentric coordinates (sum to 1; negative outside).
  std::vector<double> barycentric(std::span<const double> x) const;
  bool contains(std::span<const double> x, double tolerance = 0) const;
  // Signed distance to the nearest facet hyperplane; equals the distance to the
  // boundary for points inside.
  double distance_to_boundary(std::span<const double> x) const;
  Simplex scaled_about_incentre(double lambda) const;
  // Height of vertex j above facet j.
  double height(std::size_t j) const;

 private:
  void require_nondegenerate(const char* what) const;

  std::size_t d_;
  std::vector<Point> vertices_;
  Eigen::MatrixXd local_;  // d x (d+1) local vertex coordinates
  Eigen::MatrixXd barycentric_solver_;  // inverse of [local; 1...1]
  bool degenerate_ = false;
  double volume_ = 0;
  double log_volume_ = 0;
  std::vector<double> facets_;
  double perimeter_ = 0;
  Point incentre_;
};

// Facet n . y <= b of a polytope in local coordinates (|n| = 1).
struct Halfspace {
  Eigen::VectorXd normal;
  double offset;
};

// Convex hull of points on the unit simplex, kept as its extreme points.
class ConvexPolytope {
 public:
  explicit ConvexPolytope(std::vector<Point> points);
  static ConvexPolytope from_simplex(const Simplex& s);

  std::size_t dimension() const noexcept { return d_; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Halfspace>& facets() const noexcept { return facets_; }
  const std::vector<double>& facet_measures() const noexcept { return facet_measures_; }
  double volume() const noexcept { return volume_; }
  double surface_measure() const noexcept { return surface_; }

  bool contains(std::span<const double> x, double tolerance = 0) const;
  double distance_to_boundary(std::span<const double> x) const;
  // Chebyshev centre by linear programming.
  const Point& chebyshev_centre() const noexcept { return centre_; }
  double inradius() const noexcept { return inradius_; }
  bool is_simplex() const noexcept { return vertices_.size() == d_ + 1; }

 private:
  std::size_t d_;
  std::vector<Point> vertices_;
  std::vector<Eigen::VectorXd> local_;
  std::vector<Halfspace> facets_;
  std::vector<double> facet_measures_;
  double volume_ = 0;
  double surface_ = 0;
  Point centre_;
  double inradius_ = 0;
};

// Volume of the convex hull of points in R^k; also returns facet data when
// asked. Exposed for tests.
double convex_hull_volume(const std::vector<Eigen::VectorXd>& points,
                          std::vector<Halfspace>* facets = nullptr,
                          std::vector<double>* facet_measures = nullptr,
                          std::vector<std::size_t>* extreme = nullptr);

// vol(L_eps(S)) = vol(S) (1 - max(0, 1 - eps/In(S))^d).
double inner_neighborhood_volume(const Simplex& s, double eps);
// Same expression with the polytope inradius: an upper bound on vol(L_eps(P)).
// For simplices the Heron inradius is used and the value is exact.
double inner_neighborhood_volume_upper(const ConvexPolytope& p, double eps);

Simplex image_simplex(const IntMatrix& n, const Simplex& s);
Simplex image_simplex(const HoleMatrix& m, const Simplex& s);

// prod over vertices e of |N e|^{-1}.
double volume_ratio(const IntMatrix& n, const Simplex& s);
double volume_ratio(const HoleMatrix& m, const Simplex& s);
long double log_volume_ratio(const IntMatrix& n, std::span<const Point> vertices);
long double log_volume_ratio(const HoleMatrix& m, std::span<const Point> vertices);

}  // namespace projdim
