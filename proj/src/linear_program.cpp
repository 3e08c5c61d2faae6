#include "projdim/linear_program.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "projdim/error.hpp"

namespace projdim {

LpResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) fail(ErrorCode::invalid_argument, "maximize: shape mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < 0) fail(ErrorCode::invalid_argument, "maximize: origin is not feasible");

  // Tableau [A I | b] with objective row [-c 0 | 0].
  const Eigen::Index cols = n + m + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.col(cols - 1).head(m) = b;
  t.row(m).head(n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
  const double eps = 1e-12 * scale;
  const int max_iter = 50 * static_cast<int>(m + n + 1);
  for (int iter = 0;; ++iter) {
    if (iter > max_iter) fail(ErrorCode::numerical, "maximize: simplex method stalled");
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, cols - 1) / t(i, enter);
        const double tie = 1e-14 * std::max(1.0, std::fabs(best));
        if (leave < 0 || ratio < best - tie) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + tie &&
                   basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
    }
    if (leave < 0) fail(ErrorCode::numerical, "maximize: problem is unbounded");
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && t(i, enter) != 0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  LpResult out;
  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index v = basis[static_cast<std::size_t>(i)];
    if (v < n) out.x(v) = t(i, cols - 1);
  }
  out.objective = c.dot(out.x);
  return out;
}

ChebyshevBall chebyshev_ball(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets,
                             const Eigen::VectorXd& interior) {
  const Eigen::Index m = normals.rows();
  const Eigen::Index d = normals.cols();
  // y = interior + u+ - u-, variables (u+, u-, r) >= 0.
  Eigen::MatrixXd a(m, 2 * d + 1);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double len = normals.row(i).norm();
    if (len == 0) fail(ErrorCode::degenerate, "chebyshev_ball: zero constraint normal");
    a.row(i).head(d) = normals.row(i) / len;
    a.row(i).segment(d, d) = -normals.row(i) / len;
    a(i, 2 * d) = 1.0;
    b(i) = (offsets(i) - normals.row(i).dot(interior)) / len;
    if (b(i) < -1e-12) fail(ErrorCode::invalid_argument, "chebyshev_ball: start point is not interior");
    b(i) = std::max(b(i), 0.0);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * d + 1);
  c(2 * d) = 1.0;
  const LpResult lp = maximize(a, b, c);
  ChebyshevBall ball;
  ball.centre = interior + lp.x.head(d) - lp.x.segment(d, d);
  ball.radius = lp.x(2 * d);
  if (!(ball.radius > 0)) fail(ErrorCode::degenerate, "chebyshev_ball: region has empty interior");
  return ball;
}

}  // namespace projdim
