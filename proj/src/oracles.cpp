#include "projdim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "internal/random.hpp"
#include "projdim/linear_program.hpp"

namespace projdim {

namespace {

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> to_eigen(const IntMatrix& m) {
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> out(m.size(), m.size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) out(r, c) = static_cast<T>(m.to_long_double(r, c));
  return out;
}

McEstimate finish(std::uint64_t hits, std::uint64_t n, double volume, std::uint64_t seed) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  // Sample variance of the indicator scaled by the region volume.
  const double var = n > 1 ? p * (1 - p) * nn / (nn - 1) : 0.0;
  return {volume * p, volume * std::sqrt(var / nn), n, seed};
}

void check_mc_args(std::span<const double> eps, std::uint64_t samples) {
  if (samples < 10000) fail(ErrorCode::invalid_argument, "Monte Carlo needs at least 10^4 samples");
  for (double e : eps)
    if (!(e >= 0) || !std::isfinite(e)) fail(ErrorCode::invalid_argument, "eps must be finite and >= 0");
}

double min_slack(const std::vector<Halfspace>& hs, const Eigen::VectorXd& y) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : hs) best = std::min(best, h.offset - h.normal.dot(y));
  return best;
}

std::vector<McEstimate> tally(const std::vector<double>& dist, std::span<const double> eps, double volume,
                              std::uint64_t seed) {
  std::vector<McEstimate> out;
  for (double e : eps) {
    if (e == 0) {
      out.push_back({0.0, 0.0, dist.size(), seed});
      continue;
    }
    const auto hits = static_cast<std::uint64_t>(
        std::count_if(dist.begin(), dist.end(), [e](double v) { return v <= e; }));
    out.push_back(finish(hits, dist.size(), volume, seed));
  }
  return out;
}

}  // namespace

std::vector<Halfspace> simplex_halfspaces(const Simplex& s) {
  if (s.degenerate()) fail(ErrorCode::degenerate, "degenerate simplex has no facet description");
  const std::size_t d = s.dimension();
  const auto& frame = HyperplaneFrame::of(d);
  std::vector<Eigen::VectorXd> v;
  for (const auto& p : s.vertices()) v.push_back(frame.to_local(p));
  std::vector<Halfspace> out;
  for (std::size_t j = 0; j <= d; ++j) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i <= d; ++i)
      if (i != j) idx.push_back(i);
    Eigen::MatrixXd edges(d - 1, d);
    for (std::size_t r = 1; r < idx.size(); ++r) edges.row(r - 1) = (v[idx[r]] - v[idx[0]]).transpose();
    Eigen::VectorXd normal;
    if (d == 1) {
      normal = Eigen::VectorXd::Ones(1);
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(edges);
      const Eigen::MatrixXd kernel = lu.kernel();
      normal = kernel.col(0).normalized();
    }
    double offset = normal.dot(v[idx[0]]);
    if (normal.dot(v[j]) > offset) {
      normal = -normal;
      offset = -offset;
    }
    out.push_back({normal, offset});
  }
  return out;
}

std::vector<McEstimate> mc_inner_volume(const Simplex& s, std::span<const double> eps, std::uint64_t samples,
                                        std::uint64_t seed) {
  check_mc_args(eps, samples);
  const auto hs = simplex_halfspaces(s);
  const std::size_t d = s.dimension();
  const auto& frame = HyperplaneFrame::of(d);
  Eigen::MatrixXd local(d, d + 1);
  for (std::size_t i = 0; i <= d; ++i) local.col(i) = frame.to_local(s.vertices()[i]);
  detail::Rng rng(detail::mix_seed(seed, 0));
  std::vector<double> dist(samples);
  Eigen::VectorXd w(d + 1);
  for (auto& out : dist) {
    double total = 0;
    for (std::size_t i = 0; i <= d; ++i) total += (w[i] = detail::exponential(rng));
    out = min_slack(hs, local * (w / total));
  }
  return tally(dist, eps, s.volume(), seed);
}

McEstimate mc_inner_volume(const Simplex& s, double eps, std::uint64_t samples, std::uint64_t seed) {
  return mc_inner_volume(s, std::span<const double>(&eps, 1), samples, seed).front();
}

std::vector<McEstimate> mc_inner_volume(const ConvexPolytope& p, std::span<const double> eps,
                                        std::uint64_t samples, std::uint64_t seed) {
  check_mc_args(eps, samples);
  if (!(p.volume() > 0)) fail(ErrorCode::degenerate, "degenerate polytope");
  const std::size_t d = p.dimension();
  const auto& frame = HyperplaneFrame::of(d);
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& v : p.vertices()) {
    const Eigen::VectorXd y = frame.to_local(v);
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  detail::Rng rng(detail::mix_seed(seed, 0));
  std::vector<double> dist;
  dist.reserve(samples);
  Eigen::VectorXd y(d);
  while (dist.size() < samples) {
    for (std::size_t i = 0; i < d; ++i) y[i] = lo[i] + (hi[i] - lo[i]) * detail::uniform_open(rng);
    const double slack = min_slack(p.facets(), y);
    if (slack >= 0) dist.push_back(slack);
  }
  return tally(dist, eps, p.volume(), seed);
}

McEstimate mc_inner_volume(const ConvexPolytope& p, double eps, std::uint64_t samples, std::uint64_t seed) {
  return mc_inner_volume(p, std::span<const double>(&eps, 1), samples, seed).front();
}

namespace {

ChebyshevCentre lp_centre(const std::vector<Halfspace>& hs, const Eigen::VectorXd& interior, std::size_t d) {
  Eigen::MatrixXd a(hs.size(), d);
  Eigen::VectorXd b(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    a.row(i) = hs[i].normal.transpose();
    b[i] = hs[i].offset;
  }
  const ChebyshevBall ball = chebyshev_ball(a, b, interior);
  return {HyperplaneFrame::of(d).to_ambient(ball.centre), ball.radius};
}

}  // namespace

ChebyshevCentre chebyshev_center(const Simplex& s) {
  const auto hs = simplex_halfspaces(s);
  const auto& frame = HyperplaneFrame::of(s.dimension());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(s.dimension());
  for (const auto& v : s.vertices()) mean += frame.to_local(v);
  mean /= static_cast<double>(s.vertices().size());
  return lp_centre(hs, mean, s.dimension());
}

ChebyshevCentre chebyshev_center(const ConvexPolytope& p) {
  if (!(p.volume() > 0)) fail(ErrorCode::degenerate, "degenerate polytope");
  const auto& frame = HyperplaneFrame::of(p.dimension());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p.dimension());
  for (const auto& v : p.vertices()) mean += frame.to_local(v);
  mean /= static_cast<double>(p.vertices().size());
  return lp_centre(p.facets(), mean, p.dimension());
}

// ---------------------------------------------------------------------------

BoxCountReport grid_box_count(const PointCloud& points, std::span<const double> eps) {
  if (points.size() < 100000) fail(ErrorCode::invalid_argument, "box counting needs at least 10^5 points");
  if (eps.size() < 4) fail(ErrorCode::invalid_argument, "box counting needs at least 4 grid scales");
  const std::size_t k = points.front().size();
  if (k == 0) fail(ErrorCode::invalid_argument, "points must have at least one coordinate");
  for (const auto& p : points)
    if (p.size() != k) fail(ErrorCode::invalid_argument, "points differ in dimension");
  for (double e : eps)
    if (!(e > 0) || !std::isfinite(e)) fail(ErrorCode::invalid_argument, "grid sizes must be positive");

  BoxCountReport out;
  std::vector<std::uint64_t> keys(points.size());
  for (double e : eps) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::uint64_t h = 0x51ED270B27D3F5A1ULL;
      for (double c : points[i]) {
        const auto cell = static_cast<std::int64_t>(std::floor(c / e));
        h = detail::mix_seed(h, static_cast<std::uint64_t>(cell));
      }
      keys[i] = h;
    }
    std::sort(keys.begin(), keys.end());
    const auto distinct = static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    out.eps.push_back(e);
    out.counts.push_back(distinct);
  }

  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    x.push_back(-std::log(eps[i]));
    y.push_back(std::log(static_cast<double>(out.counts[i])));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0)) fail(ErrorCode::invalid_argument, "grid sizes must be distinct");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / n);
  return out;
}

PointCloud sierpinski_cloud(std::size_t n, std::uint64_t seed) {
  const double vx[3] = {0.0, 1.0, 0.5};
  const double vy[3] = {0.0, 0.0, std::sqrt(3.0) / 2};
  detail::Rng rng(detail::mix_seed(seed, 1));
  double x = 1.0 / 3, y = std::sqrt(3.0) / 6;
  PointCloud out;
  out.reserve(n);
  for (std::size_t i = 0; i < n + 64; ++i) {
    const auto k = static_cast<std::size_t>(rng() % 3);
    x = 0.5 * (x + vx[k]);
    y = 0.5 * (y + vy[k]);
    if (i >= 64) out.push_back({x, y});
  }
  return out;
}

PointCloud orbit_cloud(const IfsSystem& system, std::size_t n, std::uint64_t seed) {
  const std::size_t d = system.dimension();
  const auto gens = system.generators();
  std::vector<Eigen::MatrixXd> mats;
  for (const auto& g : gens) mats.push_back(to_eigen<double>(g.matrix()));
  const auto& frame = HyperplaneFrame::of(d);
  detail::Rng rng(detail::mix_seed(seed, 2));
  Eigen::VectorXd x = Eigen::VectorXd::Constant(d + 1, 1.0 / static_cast<double>(d + 1));
  PointCloud out;
  out.reserve(n);
  Point amb(d + 1);
  for (std::size_t i = 0; i < n + 64; ++i) {
    const auto j = static_cast<std::size_t>(rng() % gens.size());
    x = mats[j] * x;
    x /= x.sum();
    if (i < 64) continue;
    for (std::size_t c = 0; c <= d; ++c) amb[c] = x[c];
    const Eigen::VectorXd y = frame.to_local(amb);
    out.emplace_back(y.data(), y.data() + y.size());
  }
  return out;
}

BoxCountOracle box_count_oracle(const IfsSystem& system, std::size_t points, std::uint64_t seed) {
  std::vector<double> eps;
  for (int k = 3; k <= 9; ++k) eps.push_back(std::ldexp(1.0, -k));
  BoxCountOracle out;
  out.calibration = grid_box_count(sierpinski_cloud(points, seed), eps);
  out.calibrated = std::abs(out.calibration.slope - std::log(3.0) / std::log(2.0)) <= 0.05;
  if (out.calibrated) out.system = grid_box_count(orbit_cloud(system, points, seed), eps);
  return out;
}

// ---------------------------------------------------------------------------

QuadratureResult quadrature_bernoulli(std::size_t d, double t, double tolerance) {
  if (!(t > 0)) fail(ErrorCode::invalid_argument, "Bernoulli integral needs t > 0");
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double dd = static_cast<double>(d);
  auto f = [t, dd](double y, double complement) {
    const double one_minus = y <= 0.5 ? 1.0 - y : complement;
    return std::pow(y, t - 1) * std::pow(one_minus, dd);
  };
  QuadratureResult out;
  double l1 = 0;
  out.value = integrator.integrate(f, 0.0, 1.0, tolerance, &out.error, &l1);
  if (!(out.error <= std::max(1e-12, 100 * tolerance) * std::abs(out.value)))
    fail(ErrorCode::numerical, "Bernoulli quadrature did not reach the requested tolerance");
  return out;
}

QuadratureResult quadrature_laplace(const IfsSystem& system, double t, std::uint32_t depth, double tolerance) {
  if (!(t > 0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "Laplace quadrature needs t > 0");
  if (!(tolerance > 0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
  const std::size_t d = system.dimension();

  struct Collect {
    std::vector<std::pair<double, double>> holes;  // (In, vol)
    void operator()(const HoleRecord& r) { holes.emplace_back(r.inradius, r.volume()); }
  } collect;
  enumerate_holes(system, PruningPolicy::max_depth(depth), collect);
  auto& holes = collect.holes;
  std::sort(holes.begin(), holes.end());
  const std::size_t n = holes.size();

  // prefix[i] = total volume of holes[0..i); suffix[k][i] = sum_{j >= i} vol In^{-k}.
  std::vector<long double> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + holes[i].second;
  std::vector<std::vector<long double>> suffix(d + 1, std::vector<long double>(n + 1, 0));
  for (std::size_t k = 1; k <= d; ++k)
    for (std::size_t i = n; i-- > 0;)
      suffix[k][i] = suffix[k][i + 1] + holes[i].second * std::pow(static_cast<long double>(holes[i].first),
                                                                  -static_cast<long double>(k));
  std::vector<long double> binom(d + 1, 1);
  for (std::size_t k = 1; k <= d; ++k) binom[k] = binom[k - 1] * static_cast<long double>(d - k + 1) / k;

  // Lower neighbourhood volume: holes with In <= eps count whole, the rest
  // contribute vol (1 - (1 - eps/In)^d) expanded in powers of eps/In.
  auto g = [&](double eps) -> long double {
    const auto it = std::upper_bound(holes.begin(), holes.end(), std::make_pair(eps, HUGE_VAL));
    const auto i = static_cast<std::size_t>(it - holes.begin());
    long double value = prefix[i];
    long double ek = 1;
    for (std::size_t k = 1; k <= d; ++k) {
      ek *= eps;
      const long double term = binom[k] * ek * suffix[k][i];
      value += (k % 2 == 1) ? term : -term;
    }
    return value;
  };

  // Substituting eps = u^(1/t) gives (1/t) integral_0^1 g(u^(1/t)) du, smooth
  // between the breakpoints u = In^t.
  std::vector<double> cuts{0.0};
  for (const auto& h : holes) {
    const double u = std::pow(h.first, t);
    if (u > cuts.back() * (1 + 1e-12) && u < 1) cuts.push_back(u);
  }
  cuts.push_back(1.0);
  const double inv_t = 1 / t;
  auto integrand = [&](double u) { return static_cast<double>(g(std::pow(u, inv_t))); };
  // Global adaptive Gauss-Kronrod: bisect the piece with the largest error
  // estimate until the summed estimate meets the tolerance.
  using Gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto rule = [&](double a, double b) {
    double e = 0;
    const double v = Gk::integrate(integrand, a, b, 0, 0.0, &e);
    return Piece{a, b, v, e};
  };
  std::priority_queue<Piece> queue;
  long double total = 0, err = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Piece p = rule(cuts[i], cuts[i + 1]);
    total += p.value;
    err += p.error;
    queue.push(p);
  }
  const std::size_t budget = 64 * cuts.size() + 100000;
  for (std::size_t it = 0; it < budget && err > tolerance * std::abs(total) && !queue.empty(); ++it) {
    const Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    const Piece left = rule(worst.a, mid), right = rule(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  QuadratureResult out;
  out.value = static_cast<double>(total * inv_t);
  out.error = static_cast<double>(err * inv_t);
  if (!(out.error <= tolerance * std::abs(out.value) + 1e-300))
    fail(ErrorCode::numerical, "Laplace quadrature did not reach the requested tolerance");
  return out;
}

// ---------------------------------------------------------------------------

McEstimate mc_neighborhood_volume(const IfsSystem& system, double eps, std::uint64_t samples,
                                  std::uint64_t seed) {
  if (!(eps > 0) || !std::isfinite(eps)) fail(ErrorCode::invalid_argument, "eps must be positive");
  if (samples < 10000) fail(ErrorCode::invalid_argument, "Monte Carlo needs at least 10^4 samples");
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const std::size_t d = system.dimension();
  const std::size_t n = d + 1;

  std::vector<Mat> gens, gen_inv, holes, hole_inv;
  for (const auto& g : system.generators()) {
    gens.push_back(to_eigen<long double>(g.matrix()));
    gen_inv.push_back(to_eigen<long double>(g.inverse()));
  }
  for (const auto& h : system.holes()) {
    Mat m(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = h.entry(r, c);
    holes.push_back(m);
    hole_inv.push_back(m.inverse());
  }

  auto column_points = [n](const Mat& q) {
    std::vector<Point> pts(n, Point(n));
    for (std::size_t c = 0; c < n; ++c) {
      const long double s = q.col(c).sum();
      for (std::size_t r = 0; r < n; ++r) pts[c][r] = static_cast<double>(q(r, c) / s);
    }
    return pts;
  };
  auto diameter = [](const std::vector<Point>& pts) {
    double best = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        double s = 0;
        for (std::size_t i = 0; i < pts[a].size(); ++i) s += (pts[a][i] - pts[b][i]) * (pts[a][i] - pts[b][i]);
        best = std::max(best, std::sqrt(s));
      }
    return best;
  };
  auto min_ratio = [](const Vec& z) { return z.minCoeff() / z.sum(); };

  detail::Rng rng(detail::mix_seed(seed, 3));
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Point x = detail::uniform_on_simplex(rng, n);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i];
    Mat q = Mat::Identity(n, n);
    bool near = true;
    for (int step = 0; step < 100000; ++step) {
      if (diameter(column_points(q)) <= eps) break;
      bool in_hole = false;
      for (std::size_t k = 0; k < holes.size(); ++k) {
        if (min_ratio(hole_inv[k] * y) > 0) {
          const Simplex hole(column_points(q * holes[k]));
          near = hole.distance_to_boundary(x) <= eps;
          in_hole = true;
          break;
        }
      }
      if (in_hole) break;
      std::size_t best = 0;
      long double best_ratio = -INFINITY;
      Vec best_z;
      for (std::size_t j = 0; j < gens.size(); ++j) {
        Vec z = gen_inv[j] * y;
        const long double r = min_ratio(z);
        if (r > best_ratio) {
          best_ratio = r;
          best = j;
          best_z = std::move(z);
        }
      }
      y = best_z.cwiseMax(0.0L);
      y /= y.sum();
      q = q * gens[best];
    }
    if (near) ++hits;
  }
  return finish(hits, samples, system.simplex_volume(), seed);
}

}  // namespace projdim
