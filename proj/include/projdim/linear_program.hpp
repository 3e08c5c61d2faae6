#pragma once

// Dense simplex method for small linear programs.

#include <Eigen/Dense>

namespace projdim {

struct LpResult {
  Eigen::VectorXd x;
  double objective = 0;
};

// maximize c.x subject to A x <= b, x >= 0, with b >= 0 so that the origin is
// feasible. Bland's rule; throws numerical on unboundedness or stalling.
LpResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

struct ChebyshevBall {
  Eigen::VectorXd centre;
  double radius = 0;
};

// Largest ball inside {y : normals.row(i) . y <= offsets(i)}; rows need not be
// normalised. `interior` must satisfy every constraint.
ChebyshevBall chebyshev_ball(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets,
                             const Eigen::VectorXd& interior);

}  // namespace projdim
