#include "projdim/simplex_geometry.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "projdim/linear_program.hpp"

namespace projdim {

namespace {

constexpr double kOnSimplexTolerance = 1e-9;
constexpr double kLogDegenerate = -690.7755278982137;  // log(1e-300)

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

void check_point(std::span<const double> x, std::size_t n, bool require_nonnegative) {
  if (x.size() != n) fail(ErrorCode::invalid_argument, "point has wrong dimension");
  double sum = 0;
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "point has a non-finite coordinate");
    if (require_nonnegative && v < -kOnSimplexTolerance)
      fail(ErrorCode::invalid_argument, "point has a negative coordinate");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kOnSimplexTolerance)
    fail(ErrorCode::invalid_argument, "point is not on the hyperplane |x| = 1");
}

// log of the (columns)-dimensional measure of the parallelotope spanned by the
// columns of e, and the ratio of that measure to the product of column norms.
std::pair<double, double> log_parallelotope(const Eigen::MatrixXd& e) {
  if (e.cols() == 0) return {0.0, 1.0};
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(e);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  double log_measure = 0;
  double log_norms = 0;
  for (Eigen::Index i = 0; i < e.cols(); ++i) {
    const double diag = std::fabs(r(i, i));
    const double len = e.col(i).norm();
    if (diag == 0 || len == 0) return {-std::numeric_limits<double>::infinity(), 0.0};
    log_measure += std::log(diag);
    log_norms += std::log(len);
  }
  return {log_measure, std::exp(log_measure - log_norms)};
}

// Orthonormal basis of the orthogonal complement of unit vector n in R^k.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& n) {
  const Eigen::Index k = n.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(n);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
  return q.rightCols(k - 1);
}

struct SubsetIter {
  std::vector<std::size_t> idx;
  std::size_t n;
  SubsetIter(std::size_t n_, std::size_t k) : idx(k), n(n_) { std::iota(idx.begin(), idx.end(), 0); }
  bool next() {
    const std::size_t k = idx.size();
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// HyperplaneFrame

HyperplaneFrame::HyperplaneFrame(std::size_t d) : d_(d), basis_(Eigen::MatrixXd::Zero(d + 1, d)) {
  if (d < 1) fail(ErrorCode::invalid_argument, "frame dimension must be positive");
  // Helmert basis.
  for (std::size_t k = 1; k <= d; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (std::size_t i = 0; i < k; ++i) basis_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1)) = scale;
    basis_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = -static_cast<double>(k) * scale;
  }
}

const HyperplaneFrame& HyperplaneFrame::of(std::size_t d) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<HyperplaneFrame>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<HyperplaneFrame>(d);
  return *slot;
}

Eigen::VectorXd HyperplaneFrame::to_local(std::span<const double> x) const {
  if (x.size() != d_ + 1) fail(ErrorCode::invalid_argument, "to_local: wrong dimension");
  const double c = 1.0 / static_cast<double>(d_ + 1);
  Eigen::VectorXd v(d_ + 1);
  for (std::size_t i = 0; i <= d_; ++i) v(static_cast<Eigen::Index>(i)) = x[i] - c;
  return basis_.transpose() * v;
}

Eigen::VectorXd HyperplaneFrame::direction_to_local(std::span<const double> v) const {
  Eigen::VectorXd w(d_ + 1);
  for (std::size_t i = 0; i <= d_; ++i) w(static_cast<Eigen::Index>(i)) = v[i];
  return basis_.transpose() * w;
}

Point HyperplaneFrame::to_ambient(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd v = basis_ * y;
  const double c = 1.0 / static_cast<double>(d_ + 1);
  Point out(d_ + 1);
  for (std::size_t i = 0; i <= d_; ++i) out[i] = v(static_cast<Eigen::Index>(i)) + c;
  return out;
}

double standard_simplex_volume(std::size_t d) {
  return std::exp(0.5 * std::log(static_cast<double>(d + 1)) - log_factorial(d));
}

// ---------------------------------------------------------------------------
// Simplex

Simplex::Simplex(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) fail(ErrorCode::invalid_argument, "a simplex needs at least 3 vertices (d >= 2)");
  d_ = vertices_.size() - 1;
  for (const auto& v : vertices_) check_point(v, d_ + 1, false);
  const auto& frame = HyperplaneFrame::of(d_);
  const Eigen::Index d = static_cast<Eigen::Index>(d_);
  local_.resize(d, d + 1);
  for (Eigen::Index j = 0; j <= d; ++j) local_.col(j) = frame.to_local(vertices_[static_cast<std::size_t>(j)]);

  Eigen::MatrixXd edges(d, d);
  for (Eigen::Index j = 0; j < d; ++j) edges.col(j) = local_.col(j + 1) - local_.col(0);
  const auto [log_det, shape] = log_parallelotope(edges);
  log_volume_ = log_det - log_factorial(d_);
  degenerate_ = !std::isfinite(log_volume_) || log_volume_ < kLogDegenerate || shape < 1e-14;
  if (degenerate_) {
    volume_ = 0;
    return;
  }
  volume_ = std::exp(log_volume_);

  Eigen::MatrixXd aug(d + 1, d + 1);
  aug.topRows(d) = local_;
  aug.row(d).setOnes();
  barycentric_solver_ = aug.inverse();

  facets_.resize(d_ + 1);
  for (std::size_t j = 0; j <= d_; ++j) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i <= d; ++i)
      if (static_cast<std::size_t>(i) != j) keep.push_back(i);
    Eigen::MatrixXd fe(d, d - 1);
    for (Eigen::Index i = 1; i < d; ++i) fe.col(i - 1) = local_.col(keep[static_cast<std::size_t>(i)]) - local_.col(keep[0]);
    facets_[j] = std::exp(log_parallelotope(fe).first - log_factorial(d_ - 1));
  }
  perimeter_ = std::accumulate(facets_.begin(), facets_.end(), 0.0);
  incentre_.assign(d_ + 1, 0.0);
  for (std::size_t j = 0; j <= d_; ++j)
    for (std::size_t i = 0; i <= d_; ++i) incentre_[i] += facets_[j] * vertices_[j][i] / perimeter_;
}

Simplex Simplex::standard(std::size_t d) {
  std::vector<Point> v(d + 1, Point(d + 1, 0.0));
  for (std::size_t i = 0; i <= d; ++i) v[i][i] = 1.0;
  return Simplex(std::move(v));
}

void Simplex::require_nondegenerate(const char* what) const {
  if (degenerate_) fail(ErrorCode::degenerate, std::string(what) + ": degenerate simplex");
}

const std::vector<double>& Simplex::facet_measures() const {
  require_nondegenerate("facet_measures");
  return facets_;
}

double Simplex::perimeter() const {
  require_nondegenerate("perimeter");
  return perimeter_;
}

double Simplex::inradius() const {
  require_nondegenerate("inradius");
  return static_cast<double>(d_) * volume_ / perimeter_;
}

const Point& Simplex::incentre() const {
  require_nondegenerate("incentre");
  return incentre_;
}

double Simplex::height(std::size_t j) const {
  require_nondegenerate("height");
  return static_cast<double>(d_) * volume_ / facets_.at(j);
}

std::vector<double> Simplex::barycentric(std::span<const double> x) const {
  require_nondegenerate("barycentric");
  const Eigen::VectorXd y = HyperplaneFrame::of(d_).to_local(x);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(d_ + 1));
  rhs.head(static_cast<Eigen::Index>(d_)) = y;
  rhs(static_cast<Eigen::Index>(d_)) = 1.0;
  const Eigen::VectorXd beta = barycentric_solver_ * rhs;
  return {beta.data(), beta.data() + beta.size()};
}

bool Simplex::contains(std::span<const double> x, double tolerance) const {
  for (double b : barycentric(x))
    if (b < -tolerance) return false;
  return true;
}

double Simplex::distance_to_boundary(std::span<const double> x) const {
  const auto beta = barycentric(x);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= d_; ++j) best = std::min(best, beta[j] * height(j));
  return best;
}

Simplex Simplex::scaled_about_incentre(double lambda) const {
  require_nondegenerate("scaled_about_incentre");
  if (!(lambda > 0)) fail(ErrorCode::invalid_argument, "scale factor must be positive");
  std::vector<Point> v = vertices_;
  for (auto& p : v)
    for (std::size_t i = 0; i <= d_; ++i) p[i] = incentre_[i] + lambda * (p[i] - incentre_[i]);
  return Simplex(std::move(v));
}

// ---------------------------------------------------------------------------
// Convex hulls

double convex_hull_volume(const std::vector<Eigen::VectorXd>& points, std::vector<Halfspace>* facets,
                          std::vector<double>* facet_measures, std::vector<std::size_t>* extreme) {
  if (points.empty()) fail(ErrorCode::degenerate, "convex hull of no points");
  const Eigen::Index k = points.front().size();
  const std::size_t n = points.size();
  double scale = 0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * std::max(scale, 1e-300);

  std::vector<Halfspace> found;
  std::vector<double> measures;
  if (k == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (points[i](0) < points[lo](0)) lo = i;
      if (points[i](0) > points[hi](0)) hi = i;
    }
    const double len = points[hi](0) - points[lo](0);
    if (!(len > tol)) fail(ErrorCode::degenerate, "convex hull has empty interior");
    found.push_back({Eigen::VectorXd::Constant(1, -1.0), -points[lo](0)});
    found.push_back({Eigen::VectorXd::Constant(1, 1.0), points[hi](0)});
    measures = {1.0, 1.0};
    if (facets) *facets = found;
    if (facet_measures) *facet_measures = measures;
    if (extreme) *extreme = {lo, hi};
    return len;
  }
  if (n < static_cast<std::size_t>(k) + 1) fail(ErrorCode::degenerate, "convex hull has empty interior");

  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);

  SubsetIter it(n, static_cast<std::size_t>(k));
  do {
    Eigen::MatrixXd diffs(k, k - 1);
    for (Eigen::Index j = 1; j < k; ++j) diffs.col(j - 1) = points[it.idx[static_cast<std::size_t>(j)]] - points[it.idx[0]];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(diffs);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    bool full_rank = true;
    for (Eigen::Index j = 0; j < k - 1; ++j)
      if (std::fabs(r(j, j)) <= tol) full_rank = false;
    if (!full_rank) continue;
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd normal = q.col(k - 1);
    double offset = normal.dot(points[it.idx[0]]);
    if (normal.dot(centroid) > offset) {
      normal = -normal;
      offset = -offset;
    }
    bool supporting = true;
    for (const auto& p : points) {
      if (normal.dot(p) > offset + tol) {
        supporting = false;
        break;
      }
    }
    if (!supporting) continue;
    bool duplicate = false;
    for (const auto& f : found) {
      if ((f.normal - normal).norm() < 1e-9 && std::fabs(f.offset - offset) < 1e-9 * std::max(1.0, scale)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) found.push_back({normal, offset});
  } while (it.next());

  if (found.size() < static_cast<std::size_t>(k) + 1) fail(ErrorCode::degenerate, "convex hull has empty interior");

  double volume = 0;
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t f = 0; f < found.size(); ++f) {
    const auto& h = found[f];
    const Eigen::MatrixXd basis = complement_basis(h.normal);
    std::vector<Eigen::VectorXd> on;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(h.normal.dot(points[i]) - h.offset) <= tol) {
        on.push_back(basis.transpose() * points[i]);
        incident[i].push_back(f);
      }
    }
    const double area = convex_hull_volume(on);
    measures.push_back(area);
    volume += (h.offset - h.normal.dot(centroid)) * area / static_cast<double>(k);
  }
  if (extreme) {
    extreme->clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (incident[i].size() < static_cast<std::size_t>(k)) continue;
      Eigen::MatrixXd normals(k, static_cast<Eigen::Index>(incident[i].size()));
      for (std::size_t j = 0; j < incident[i].size(); ++j) normals.col(static_cast<Eigen::Index>(j)) = found[incident[i][j]].normal;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(normals);
      lu.setThreshold(1e-9);
      if (lu.rank() == k) extreme->push_back(i);
    }
  }
  if (facets) *facets = std::move(found);
  if (facet_measures) *facet_measures = std::move(measures);
  return volume;
}

ConvexPolytope::ConvexPolytope(std::vector<Point> points) {
  if (points.size() < 3) fail(ErrorCode::invalid_argument, "a polytope needs at least 3 points");
  d_ = points.front().size() - 1;
  if (d_ < 2) fail(ErrorCode::invalid_argument, "polytope dimension must be at least 2");
  for (const auto& p : points) check_point(p, d_ + 1, true);
  const auto& frame = HyperplaneFrame::of(d_);
  std::vector<Eigen::VectorXd> local;
  for (const auto& p : points) local.push_back(frame.to_local(p));
  std::vector<std::size_t> extreme;
  convex_hull_volume(local, nullptr, nullptr, &extreme);
  // Recompute on the extreme points alone so the stored data is canonical.
  for (std::size_t i : extreme) {
    vertices_.push_back(points[i]);
    local_.push_back(local[i]);
  }
  volume_ = convex_hull_volume(local_, &facets_, &facet_measures_);
  surface_ = std::accumulate(facet_measures_.begin(), facet_measures_.end(), 0.0);

  Eigen::MatrixXd normals(static_cast<Eigen::Index>(facets_.size()), static_cast<Eigen::Index>(d_));
  Eigen::VectorXd offsets(static_cast<Eigen::Index>(facets_.size()));
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    normals.row(static_cast<Eigen::Index>(f)) = facets_[f].normal.transpose();
    offsets(static_cast<Eigen::Index>(f)) = facets_[f].offset;
  }
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
  for (const auto& y : local_) centroid += y;
  centroid /= static_cast<double>(local_.size());
  const ChebyshevBall ball = chebyshev_ball(normals, offsets, centroid);
  centre_ = frame.to_ambient(ball.centre);
  inradius_ = ball.radius;
}

ConvexPolytope ConvexPolytope::from_simplex(const Simplex& s) { return ConvexPolytope(s.vertices()); }

bool ConvexPolytope::contains(std::span<const double> x, double tolerance) const {
  return distance_to_boundary(x) >= -tolerance;
}

double ConvexPolytope::distance_to_boundary(std::span<const double> x) const {
  const Eigen::VectorXd y = HyperplaneFrame::of(d_).to_local(x);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : facets_) best = std::min(best, f.offset - f.normal.dot(y));
  return best;
}

// ---------------------------------------------------------------------------

double inner_neighborhood_volume(const Simplex& s, double eps) {
  if (!(eps >= 0)) fail(ErrorCode::invalid_argument, "inner neighbourhood: eps must be non-negative");
  const double in = s.inradius();
  if (eps >= in) return s.volume();
  return s.volume() * (1.0 - std::pow(1.0 - eps / in, static_cast<double>(s.dimension())));
}

double inner_neighborhood_volume_upper(const ConvexPolytope& p, double eps) {
  if (!(eps >= 0)) fail(ErrorCode::invalid_argument, "inner neighbourhood: eps must be non-negative");
  if (p.is_simplex()) return inner_neighborhood_volume(Simplex(p.vertices()), eps);
  const double in = p.inradius();
  if (eps >= in) return p.volume();
  return p.volume() * (1.0 - std::pow(1.0 - eps / in, static_cast<double>(p.dimension())));
}

Simplex image_simplex(const IntMatrix& n, const Simplex& s) {
  std::vector<Point> v;
  for (const auto& p : s.vertices()) v.push_back(projectivize(n, p));
  return Simplex(std::move(v));
}

Simplex image_simplex(const HoleMatrix& m, const Simplex& s) {
  std::vector<Point> v;
  for (const auto& p : s.vertices()) v.push_back(projectivize(m, p));
  return Simplex(std::move(v));
}

long double log_volume_ratio(const IntMatrix& n, std::span<const Point> vertices) {
  const std::size_t k = n.size();
  std::vector<long double> colsum(k, 0);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < k; ++r) colsum[c] += n.to_long_double(r, c);
  long double out = 0;
  for (const auto& v : vertices) {
    if (v.size() != k) fail(ErrorCode::invalid_argument, "volume_ratio: dimension mismatch");
    long double s = 0;
    for (std::size_t c = 0; c < k; ++c) s += colsum[c] * v[c];
    out -= std::log(s);
  }
  return out;
}

long double log_volume_ratio(const HoleMatrix& m, std::span<const Point> vertices) {
  const std::size_t k = m.size();
  long double out = 0;
  for (const auto& v : vertices) {
    if (v.size() != k) fail(ErrorCode::invalid_argument, "volume_ratio: dimension mismatch");
    long double s = 0;
    for (std::size_t c = 0; c < k; ++c) s += m.column_norms()[c] * v[c];
    out -= std::log(s);
  }
  return out;
}

double volume_ratio(const IntMatrix& n, const Simplex& s) {
  return static_cast<double>(std::exp(log_volume_ratio(n, s.vertices())));
}

double volume_ratio(const HoleMatrix& m, const Simplex& s) {
  return static_cast<double>(std::exp(log_volume_ratio(m, s.vertices())));
}

}  // namespace projdim
