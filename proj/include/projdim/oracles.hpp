#pragma once

// Independent numerical checks: Monte Carlo volumes, LP Chebyshev centres,
// grid box counting and adaptive quadrature.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "projdim/ifs_attractor.hpp"

namespace projdim {

struct McEstimate {
  double value = 0;
  double standard_error = 0;  // sample standard deviation / sqrt(samples)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// vol{x in region : dist(x, boundary) <= eps} by uniform sampling of the
// region. One estimate per eps, all from the same sample.
std::vector<McEstimate> mc_inner_volume(const Simplex& s, std::span<const double> eps, std::uint64_t samples,
                                        std::uint64_t seed);
McEstimate mc_inner_volume(const Simplex& s, double eps, std::uint64_t samples, std::uint64_t seed);
std::vector<McEstimate> mc_inner_volume(const ConvexPolytope& p, std::span<const double> eps,
                                        std::uint64_t samples, std::uint64_t seed);
McEstimate mc_inner_volume(const ConvexPolytope& p, double eps, std::uint64_t samples, std::uint64_t seed);

// Facet halfspaces of a simplex in local hyperplane coordinates, built from
// the vertices alone.
std::vector<Halfspace> simplex_halfspaces(const Simplex& s);

struct ChebyshevCentre {
  Point centre;  // ambient coordinates
  double radius = 0;
};

ChebyshevCentre chebyshev_center(const Simplex& s);
ChebyshevCentre chebyshev_center(const ConvexPolytope& p);

// Points are rows of equal length k (any k >= 1).
using PointCloud = std::vector<std::vector<double>>;

struct BoxCountReport {
  std::vector<double> eps;
  std::vector<std::uint64_t> counts;
  double slope = 0;  // of log N(eps) against log(1/eps)
  double intercept = 0;
  double residual = 0;  // root-mean-square residual of the fit
};

BoxCountReport grid_box_count(const PointCloud& points, std::span<const double> eps);

// Chaos-game clouds. Sierpinski: planar, vertices (0,0), (1,0), (1/2, sqrt(3)/2).
PointCloud sierpinski_cloud(std::size_t n, std::uint64_t seed);
// Random compositions of the T_j applied to the incentre of the standard
// simplex, in local hyperplane coordinates.
PointCloud orbit_cloud(const IfsSystem& system, std::size_t n, std::uint64_t seed);

struct BoxCountOracle {
  BoxCountReport calibration;
  bool calibrated = false;  // Sierpinski slope within 0.05 of log 3 / log 2
  std::optional<BoxCountReport> system;  // only computed once calibrated
};

// Schedules: eps = 2^-k for k in [3, 9] on the Sierpinski cloud and for the
// system cloud.
BoxCountOracle box_count_oracle(const IfsSystem& system, std::size_t points, std::uint64_t seed);

struct QuadratureResult {
  double value = 0;
  double error = 0;
};

// integral_0^1 y^(t-1) (1-y)^d dy.
QuadratureResult quadrature_bernoulli(std::size_t d, double t, double tolerance = 1e-13);

// integral_0^1 eps^(t-1) vol_n(G_eps) d eps, with vol_n the truncated lower
// neighbourhood volume over the holes of words of length <= depth.
QuadratureResult quadrature_laplace(const IfsSystem& system, double t, std::uint32_t depth,
                                    double tolerance = 1e-9);

// vol{x in Delta : dist(x, G) <= eps}: each sample descends the cell tree
// until it falls in a hole or in a cell of diameter <= eps.
McEstimate mc_neighborhood_volume(const IfsSystem& system, double eps, std::uint64_t samples,
                                  std::uint64_t seed);

}  // namespace projdim
