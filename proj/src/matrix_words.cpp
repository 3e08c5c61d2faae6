#include "projdim/matrix_words.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace projdim {

namespace {

constexpr long double kSimplexTolerance = 1e-9L;

BigInt bareiss_determinant(std::vector<BigInt> a, std::size_t n) {
  if (n == 0) return BigInt(1);
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k] == 0) {
      std::size_t swap_row = n;
      for (std::size_t r = k + 1; r < n; ++r) {
        if (a[r * n + k] != 0) {
          swap_row = r;
          break;
        }
      }
      if (swap_row == n) return BigInt(0);
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[swap_row * n + c]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
      }
    }
    prev = a[k * n + k];
  }
  BigInt det = a[n * n - 1];
  return sign > 0 ? det : BigInt(-det);
}

std::vector<BigInt> big_entries(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<BigInt> out(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = m.at(r, c);
  return out;
}

long double big_to_long_double(const BigInt& v) { return v.convert_to<long double>(); }

void check_on_simplex(std::span<const double> x, std::size_t n) {
  if (x.size() != n) fail(ErrorCode::invalid_argument, "projectivize: point has wrong dimension");
  long double sum = 0;
  for (double v : x) {
    if (!(v >= -kSimplexTolerance))
      fail(ErrorCode::invalid_argument, "projectivize: point has a negative coordinate");
    sum += v;
  }
  if (std::fabs(sum - 1.0L) > kSimplexTolerance)
    fail(ErrorCode::invalid_argument, "projectivize: point is not on the unit simplex");
}

// Index sets of size k in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

long double minor_value(const IntMatrix& m, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
  const std::size_t k = rows.size();
  if (k == 1) return m.to_long_double(rows[0], cols[0]);
  if (k == 2 && !m.promoted()) {
    __int128 a = m.small_at(rows[0], cols[0]), b = m.small_at(rows[0], cols[1]);
    __int128 c = m.small_at(rows[1], cols[0]), d = m.small_at(rows[1], cols[1]);
    return static_cast<long double>(a * d - b * c);
  }
  std::vector<BigInt> sub(k * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) sub[r * k + c] = m.at(rows[r], cols[c]);
  return big_to_long_double(bareiss_determinant(std::move(sub), k));
}

// Largest singular value of the k-th compound matrix.
long double compound_top_singular(const IntMatrix& m, std::size_t k) {
  const std::size_t n = m.size();
  const auto sets = subsets(n, k);
  const std::size_t s = sets.size();
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Mat c(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) c(i, j) = minor_value(m, sets[i], sets[j]);
  if (s == 1) return std::fabs(c(0, 0));
  const long double scale = c.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  Mat g = (c / scale).transpose() * (c / scale);
  Eigen::SelfAdjointEigenSolver<Mat> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::numerical, "singular_values: eigen-solver did not converge");
  return std::sqrt(std::max<long double>(solver.eigenvalues()(s - 1), 0)) * scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t n) : n_(n), small_(n * n, 0) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.small_[i * n + i] = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t n = rows.size();
  IntMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) fail(ErrorCode::malformed_input, "matrix is not square");
    for (std::size_t c = 0; c < n; ++c) m.small_[r * n + c] = rows[r][c];
  }
  return m;
}

IntMatrix IntMatrix::from_big_rows(const std::vector<std::vector<BigInt>>& rows) {
  const std::size_t n = rows.size();
  IntMatrix m(n);
  bool fits = true;
  for (const auto& row : rows) {
    if (row.size() != n) fail(ErrorCode::malformed_input, "matrix is not square");
    for (const auto& v : row)
      if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        fits = false;
  }
  if (fits) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m.small_[r * n + c] = rows[r][c].convert_to<std::int64_t>();
    return m;
  }
  m.small_.clear();
  m.big_.resize(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m.big_[r * n + c] = rows[r][c];
  return m;
}

BigInt IntMatrix::at(std::size_t r, std::size_t c) const {
  return promoted() ? big_[r * n_ + c] : BigInt(small_[r * n_ + c]);
}

long double IntMatrix::to_long_double(std::size_t r, std::size_t c) const {
  return promoted() ? big_to_long_double(big_[r * n_ + c])
                    : static_cast<long double>(small_[r * n_ + c]);
}

bool IntMatrix::non_negative() const {
  if (promoted()) return std::all_of(big_.begin(), big_.end(), [](const BigInt& v) { return v >= 0; });
  return std::all_of(small_.begin(), small_.end(), [](std::int64_t v) { return v >= 0; });
}

BigInt IntMatrix::determinant() const { return bareiss_determinant(big_entries(*this), n_); }

BigInt IntMatrix::column_sum(std::size_t c) const {
  BigInt s = 0;
  for (std::size_t r = 0; r < n_; ++r) s += at(r, c);
  return s;
}

long double IntMatrix::max_abs_entry() const {
  long double best = 0;
  if (promoted()) {
    for (const auto& v : big_) best = std::max(best, std::fabs(big_to_long_double(v)));
  } else {
    for (auto v : small_) best = std::max(best, std::fabs(static_cast<long double>(v)));
  }
  return best;
}

void IntMatrix::promote() {
  if (promoted()) return;
  big_.assign(small_.begin(), small_.end());
  small_.clear();
}

void IntMatrix::multiply(const IntMatrix& a, const IntMatrix& b, IntMatrix& out) {
  if (a.n_ != b.n_) fail(ErrorCode::invalid_argument, "multiply: size mismatch");
  const std::size_t n = a.n_;
  out.n_ = n;
  if (!a.promoted() && !b.promoted()) {
    out.small_.resize(n * n);
    out.big_.clear();
    bool overflow = false;
    for (std::size_t r = 0; r < n && !overflow; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        std::int64_t acc = 0;
        for (std::size_t k = 0; k < n; ++k) {
          std::int64_t p;
          if (__builtin_mul_overflow(a.small_[r * n + k], b.small_[k * n + c], &p) ||
              __builtin_add_overflow(acc, p, &acc)) {
            overflow = true;
            break;
          }
        }
        if (overflow) break;
        out.small_[r * n + c] = acc;
      }
    }
    if (!overflow) return;
  }
  out.small_.clear();
  out.big_.assign(n * n, BigInt(0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      BigInt acc = 0;
      for (std::size_t k = 0; k < n; ++k) acc += a.at(r, k) * b.at(k, c);
      out.big_[r * n + c] = std::move(acc);
    }
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  IntMatrix out;
  multiply(*this, rhs, out);
  return out;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  if (a.n_ != b.n_) return false;
  if (!a.promoted() && !b.promoted()) return a.small_ == b.small_;
  for (std::size_t r = 0; r < a.n_; ++r)
    for (std::size_t c = 0; c < a.n_; ++c)
      if (a.at(r, c) != b.at(r, c)) return false;
  return true;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t r = 0; r < n_; ++r) {
    os << (r ? ",[" : "[");
    for (std::size_t c = 0; c < n_; ++c) os << (c ? "," : "") << at(r, c);
    os << ']';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// GeneratorMatrix / HoleMatrix

GeneratorMatrix::GeneratorMatrix(IntMatrix m) : m_(std::move(m)) {
  const std::size_t n = m_.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "generator must be at least 2x2");
  if (!m_.non_negative()) fail(ErrorCode::invalid_argument, "generator has a negative entry");
  const BigInt det = m_.determinant();
  if (det != 1 && det != -1)
    fail(ErrorCode::invalid_argument, "unimodularity violated: generator determinant is " + det.str());
  det_sign_ = det > 0 ? 1 : -1;
  for (std::size_t c = 0; c < n; ++c)
    if (m_.column_sum(c) < 1) fail(ErrorCode::invalid_argument, "generator has a zero column");

  // Adjugate divided by the determinant.
  std::vector<std::vector<BigInt>> inv(n, std::vector<BigInt>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<BigInt> sub;
      sub.reserve((n - 1) * (n - 1));
      for (std::size_t i = 0; i < n; ++i) {
        if (i == r) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (j != c) sub.push_back(m_.at(i, j));
      }
      BigInt cof = bareiss_determinant(std::move(sub), n - 1);
      if ((r + c) % 2) cof = -cof;
      inv[c][r] = det_sign_ > 0 ? cof : BigInt(-cof);
    }
  }
  inverse_ = IntMatrix::from_big_rows(inv);
}

HoleMatrix::HoleMatrix(std::size_t n, std::vector<long double> row_major)
    : n_(n), entries_(std::move(row_major)) {
  if (n < 2 || entries_.size() != n * n)
    fail(ErrorCode::malformed_input, "hole matrix must be square of size >= 2");
  for (auto v : entries_) {
    if (!std::isfinite(v)) fail(ErrorCode::malformed_input, "hole matrix entry is not finite");
    if (v < 0) fail(ErrorCode::invalid_argument, "hole matrix has a negative entry");
  }
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = entries_[r * n + c];
  det_ = m.partialPivLu().determinant();
  if (std::fabs(std::fabs(det_) - 1.0L) > 1e-12L)
    fail(ErrorCode::invalid_argument, "hole matrix determinant has magnitude " +
                                          std::to_string(static_cast<double>(std::fabs(det_))) +
                                          ", expected 1");
  column_norms_.resize(n);
  vertices_.assign(n, Point(n));
  for (std::size_t c = 0; c < n; ++c) {
    long double s = 0;
    for (std::size_t r = 0; r < n; ++r) s += entries_[r * n + c];
    column_norms_[c] = s;
    for (std::size_t r = 0; r < n; ++r) vertices_[c][r] = static_cast<double>(entries_[r * n + c] / s);
  }
}

long double HoleMatrix::l1_operator_norm() const {
  return *std::max_element(column_norms_.begin(), column_norms_.end());
}

// ---------------------------------------------------------------------------
// Words

void Word::check_alphabet(std::size_t alphabet) const {
  for (auto l : letters_)
    if (l >= alphabet)
      fail(ErrorCode::invalid_argument,
           "letter " + std::to_string(l + 1) + " outside alphabet of size " + std::to_string(alphabet));
}

std::uint64_t Word::letter_mask() const noexcept {
  std::uint64_t mask = 0;
  for (auto l : letters_)
    if (l < 64) mask |= std::uint64_t{1} << l;
  return mask;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "()";
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(letters_[i] + 1);
  }
  return s;
}

MatrixProduct compose(const MatrixProduct& prefix, std::span<const GeneratorMatrix> generators,
                      std::size_t letter) {
  if (letter >= generators.size())
    fail(ErrorCode::invalid_argument, "compose: letter outside alphabet");
  MatrixProduct out;
  IntMatrix::multiply(prefix.matrix, generators[letter].matrix(), out.matrix);
  out.word = prefix.word;
  out.word.push_back(static_cast<Word::Letter>(letter));
  return out;
}

Point projectivize(const IntMatrix& n, std::span<const double> x) {
  const std::size_t k = n.size();
  check_on_simplex(x, k);
  std::vector<long double> y(k, 0);
  long double total = 0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) y[r] += n.to_long_double(r, c) * std::max(0.0, x[c]);
    total += y[r];
  }
  Point out(k);
  for (std::size_t r = 0; r < k; ++r) out[r] = static_cast<double>(y[r] / total);
  return out;
}

Point projectivize(const HoleMatrix& m, std::span<const double> x) {
  const std::size_t k = m.size();
  check_on_simplex(x, k);
  std::vector<long double> y(k, 0);
  long double total = 0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) y[r] += m.entry(r, c) * std::max(0.0, x[c]);
    total += y[r];
  }
  Point out(k);
  for (std::size_t r = 0; r < k; ++r) out[r] = static_cast<double>(y[r] / total);
  return out;
}

BigInt l1_operator_norm(const IntMatrix& n) {
  BigInt best = 0;
  for (std::size_t c = 0; c < n.size(); ++c) {
    BigInt s = 0;
    for (std::size_t r = 0; r < n.size(); ++r) {
      BigInt v = n.at(r, c);
      s += v < 0 ? BigInt(-v) : v;
    }
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> singular_values(const IntMatrix& n) {
  const std::size_t k = n.size();
  std::vector<long double> tops(k + 1, 1.0L);
  for (std::size_t j = 1; j <= k; ++j) tops[j] = compound_top_singular(n, j);
  std::vector<double> out(k);
  for (std::size_t j = 1; j <= k; ++j) {
    if (tops[j - 1] == 0) fail(ErrorCode::numerical, "singular_values: singular matrix");
    out[j - 1] = static_cast<double>(tops[j] / tops[j - 1]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traversal

PruningPolicy PruningPolicy::max_depth(std::uint32_t depth) { return {Kind::max_depth, depth, 0}; }

PruningPolicy PruningPolicy::norm_cap(double cap) {
  if (!(cap > 0) || !std::isfinite(cap))
    fail(ErrorCode::invalid_argument, "norm cap must be positive and finite");
  return {Kind::norm_cap, 0, cap};
}

PruningPolicy PruningPolicy::volume_floor(double floor) {
  if (!(floor > 0) || !std::isfinite(floor))
    fail(ErrorCode::invalid_argument, "volume floor must be positive and finite");
  return {Kind::volume_floor, 0, floor};
}

std::string PruningPolicy::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::max_depth: os << "max-depth " << depth_; break;
    case Kind::norm_cap: os << "norm-cap " << value_; break;
    case Kind::volume_floor: os << "volume-floor " << value_; break;
  }
  return os.str();
}

std::uint64_t TraversalSummary::total() const {
  return std::accumulate(visits_per_depth.begin(), visits_per_depth.end(), std::uint64_t{0});
}

void TraversalSummary::record(std::size_t depth, const IntMatrix& m) {
  if (visits_per_depth.size() <= depth) visits_per_depth.resize(depth + 1, 0);
  ++visits_per_depth[depth];
  max_entry = std::max(max_entry, m.max_abs_entry());
  promoted = promoted || m.promoted();
}

void TraversalSummary::merge(const TraversalSummary& other) {
  if (visits_per_depth.size() < other.visits_per_depth.size())
    visits_per_depth.resize(other.visits_per_depth.size(), 0);
  for (std::size_t i = 0; i < other.visits_per_depth.size(); ++i)
    visits_per_depth[i] += other.visits_per_depth[i];
  max_entry = std::max(max_entry, other.max_entry);
  promoted = promoted || other.promoted;
}

unsigned resolve_threads(const TraversalOptions& options) {
  if (options.sequential) return 1;
  unsigned t = options.threads;
  if (t == 0) {
    if (const char* env = std::getenv("PROJDIM_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v > 0) t = static_cast<unsigned>(v);
    }
  }
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

namespace detail {

PolicyGate::PolicyGate(std::span<const GeneratorMatrix> gens, const PruningPolicy& policy)
    : policy_(policy) {
  for (const auto& g : gens) {
    if (g.size() != gens.front().size()) fail(ErrorCode::invalid_argument, "generators differ in size");
  }
  if (policy.kind() == PruningPolicy::Kind::norm_cap) {
    int_cap_ = static_cast<std::int64_t>(std::min(std::floor(policy.cap()), 9.0e18));
  } else if (policy.kind() == PruningPolicy::Kind::volume_floor) {
    const std::size_t n = gens.front().size();
    const std::size_t d = n - 1;
    long double lv = 0.5L * std::log(static_cast<long double>(n));
    for (std::size_t k = 2; k <= d; ++k) lv -= std::log(static_cast<long double>(k));
    log_volume_budget_ = lv - std::log(static_cast<long double>(policy.floor()));
  }
}

bool PolicyGate::admits(const IntMatrix& product, std::size_t depth) const {
  switch (policy_.kind()) {
    case PruningPolicy::Kind::max_depth:
      return depth <= policy_.depth();
    case PruningPolicy::Kind::norm_cap: {
      const std::size_t n = product.size();
      if (!product.promoted()) {
        for (std::size_t c = 0; c < n; ++c) {
          std::int64_t s = 0;
          for (std::size_t r = 0; r < n; ++r) {
            if (__builtin_add_overflow(s, product.small_at(r, c), &s)) return false;
          }
          if (s > int_cap_) return false;
        }
        return true;
      }
      return l1_operator_norm(product) <= int_cap_;
    }
    case PruningPolicy::Kind::volume_floor: {
      // vol(Delta_i) = vol(Delta) / prod_c colsum_c.
      long double lsum = 0;
      for (std::size_t c = 0; c < product.size(); ++c) {
        if (!product.promoted()) {
          std::int64_t s = 0;
          for (std::size_t r = 0; r < product.size(); ++r) s += product.small_at(r, c);
          lsum += std::log(static_cast<long double>(s));
        } else {
          lsum += std::log(big_to_long_double(product.column_sum(c)));
        }
      }
      return lsum <= log_volume_budget_ + 1e-15L;
    }
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Norm counting

std::uint64_t NormHistogram::at_most(double cap) const {
  if (!(cap >= 1)) return 0;
  const std::size_t top = std::min<std::size_t>(counts.size() - 1, static_cast<std::size_t>(std::floor(cap)));
  std::uint64_t s = 0;
  for (std::size_t v = 0; v <= top; ++v) s += counts[v];
  return s;
}

std::optional<std::vector<std::size_t>> arnoux_rauzy_rows(std::span<const GeneratorMatrix> gens) {
  if (gens.empty()) return std::nullopt;
  const std::size_t n = gens.front().size();
  if (gens.size() > n) return std::nullopt;
  std::vector<std::size_t> rows;
  std::vector<bool> used(n, false);
  for (const auto& g : gens) {
    const IntMatrix& m = g.matrix();
    if (m.promoted() || m.size() != n) return std::nullopt;
    std::optional<std::size_t> row;
    for (std::size_t r = 0; r < n; ++r) {
      bool ones = true, unit = true;
      for (std::size_t c = 0; c < n; ++c) {
        ones = ones && m.small_at(r, c) == 1;
        unit = unit && m.small_at(r, c) == (r == c ? 1 : 0);
      }
      if (unit) continue;
      if (!ones || row) return std::nullopt;
      row = r;
    }
    if (!row || used[*row]) return std::nullopt;
    used[*row] = true;
    rows.push_back(*row);
  }
  return rows;
}

namespace {

constexpr std::size_t kMaxFastComponents = 8;

// Per-norm histogram.
struct HistogramSink {
  std::vector<std::uint64_t>& hist;

  void add(std::int64_t norm) { ++hist[static_cast<std::size_t>(norm)]; }
  // Norms start, start + step, ..., start + last*step.
  std::size_t locate(std::int64_t, std::size_t) const { return 0; }
  void add(std::int64_t start, std::int64_t step, std::int64_t last, std::size_t = 0, std::uint64_t mult = 1) {
    for (std::int64_t v = start, e = start + last * step; v <= e; v += step) hist[static_cast<std::size_t>(v)] += mult;
  }
};

// Total count under a single cap.
struct TotalSink {
  std::uint64_t total = 0;

  std::size_t locate(std::int64_t, std::size_t) const { return 0; }
  void add(std::int64_t, std::int64_t, std::int64_t last, std::size_t = 0, std::uint64_t mult = 1) {
    total += (static_cast<std::uint64_t>(last) + 1) * mult;
  }
};

// Counting by runs. A word whose last letter has row r has column-sum vector
// lambda with lambda_r the strict minimum a; repeating that letter adds a to
// every other component. Switching to the letter of row i at run position k
// gives norm o_i + max_{l != i} o_l + 2ka, and that child has descendants iff
// its norm plus its new minimum o_i + ka still fits under the cap.
template <class Sink, std::size_t W>
class RunCounter {
 public:
  RunCounter(std::int64_t cap, Sink& sink) : cap_(cap), sink_(sink) {}

  // `others` holds the W components other than the run component `a`.
  // `hint` is a cap index at or below the one bounding this node's norm.
  void run(std::int64_t a, const std::int64_t* others, std::size_t hint = 0) {
    constexpr std::size_t w = W;
    std::int64_t mx = 0;
    for (std::size_t l = 0; l < w; ++l) mx = std::max(mx, others[l]);
    hint = sink_.locate(mx, hint);
    sink_.add(mx, a, (cap_ - mx) / a, hint);
    std::int64_t child[W];
    for (std::size_t i = 0; i < w; ++i) {
      std::int64_t rest = a;
      for (std::size_t l = 0; l < w; ++l)
        if (l != i) rest = std::max(rest, others[l]);
      const std::int64_t base = others[i] + rest;
      if (base > cap_) continue;
      std::int64_t k = 0;
      for (std::int64_t grown = base + others[i]; grown <= cap_; grown += 3 * a, ++k) {
        const std::int64_t p = others[i] + k * a;
        std::size_t c = 0;
        child[c++] = a + p;  // the old run component
        for (std::size_t l = 0; l < w; ++l)
          if (l != i) child[c++] = others[l] + k * a + p;
        run(p, child, hint);
      }
      const std::int64_t first = base + 2 * a * k;
      if (first <= cap_) sink_.add(first, 2 * a, (cap_ - first) / (2 * a), hint);
    }
  }

 private:
  std::int64_t cap_;
  Sink& sink_;
};

// Three components, others kept sorted (b <= c). Both children at run position
// k have norm b + c + 2ka, and the child from b keeps descendants longest.
template <class Sink>
class RunCounter3 {
 public:
  RunCounter3(std::int64_t cap, Sink& sink) : cap_(cap), sink_(sink) {}

  void run(std::int64_t a, std::int64_t b, std::int64_t c, std::size_t hint) {
    hint = sink_.locate(c, hint);
    sink_.add(c, a, (cap_ - c) / a, hint);
    std::int64_t s = b + c;
    std::size_t q = hint;
    for (std::int64_t k = 0; s <= cap_; ++k, s += 2 * a) {
      const std::int64_t mb = b + k * a, mc = c + k * a;
      if (s + mb > cap_) break;
      run(mb, a + mb, s, hint);
      if (s + mc <= cap_) {
        run(mc, a + mc, s, hint);
      } else {
        q = sink_.locate(s, q);
        sink_.add(s, 1, 0, q);
      }
    }
    if (s <= cap_) sink_.add(s, 2 * a, (cap_ - s) / (2 * a), hint, 2);
  }

 private:
  std::int64_t cap_;
  Sink& sink_;
};

template <class Sink, std::size_t W = 2>
void count_runs(std::size_t components, std::int64_t cap, Sink& sink) {
  if constexpr (W == 2) {
    if (components == 3) {
      RunCounter3<Sink>(cap, sink).run(1, 2, 2, 0);
      return;
    }
  }
  if constexpr (W + 1 < kMaxFastComponents) {
    if (components != W + 1) return count_runs<Sink, W + 1>(components, cap, sink);
  }
  RunCounter<Sink, W> counter(cap, sink);
  std::int64_t others[W];
  std::fill(others, others + W, 2);
  counter.run(1, others);
}

bool accelerable(std::span<const GeneratorMatrix> gens) {
  const auto rows = arnoux_rauzy_rows(gens);
  const std::size_t n = gens.front().size();
  return rows && rows->size() == n && n <= kMaxFastComponents;
}

void generic_norm_walk(std::span<const GeneratorMatrix> gens, std::uint64_t cap,
                       std::vector<std::uint64_t>& hist) {
  const std::size_t n = gens.front().size();
  const std::size_t m = gens.size();
  for (const auto& g : gens)
    if (g.matrix().promoted()) fail(ErrorCode::unsupported, "norm counting needs int64 generators");
  const std::int64_t icap = static_cast<std::int64_t>(cap);
  std::vector<std::vector<std::int64_t>> lam(1, std::vector<std::int64_t>(n, 1));
  std::vector<std::size_t> next(1, 0);
  hist[1] += 1;
  std::size_t level = 0;
  while (true) {
    if (next[level] == m) {
      if (level == 0) break;
      --level;
      continue;
    }
    const IntMatrix& g = gens[next[level]++].matrix();
    if (lam.size() <= level + 1) {
      lam.emplace_back(n);
      next.push_back(0);
    }
    auto& child = lam[level + 1];
    const auto& parent = lam[level];
    std::int64_t norm = 0;
    bool over = false;
    for (std::size_t c = 0; c < n && !over; ++c) {
      std::int64_t s = 0;
      for (std::size_t r = 0; r < n; ++r) {
        std::int64_t p;
        if (__builtin_mul_overflow(parent[r], g.small_at(r, c), &p) || __builtin_add_overflow(s, p, &s)) {
          over = true;
          break;
        }
      }
      child[c] = s;
      norm = std::max(norm, s);
      if (norm > icap) over = true;
    }
    if (over) continue;
    if (level + 1 >= (1u << 20))
      fail(ErrorCode::invalid_argument, "norm counting: visit set is unbounded for these generators");
    ++hist[static_cast<std::size_t>(norm)];
    ++level;
    next[level] = 0;
  }
}

}  // namespace

NormHistogram norm_histogram(std::span<const GeneratorMatrix> gens, std::uint64_t cap,
                             bool allow_acceleration) {
  if (gens.empty()) fail(ErrorCode::invalid_argument, "norm_histogram: no generators");
  if (cap < 1) fail(ErrorCode::invalid_argument, "norm cap must be at least 1");
  if (cap > (std::uint64_t{1} << 32)) fail(ErrorCode::invalid_argument, "norm cap too large for a histogram");
  NormHistogram out;
  out.counts.assign(cap + 1, 0);
  const std::size_t n = gens.front().size();
  if (allow_acceleration && accelerable(gens)) {
    out.accelerated = true;
    out.counts[1] = 1;  // empty word
    if (cap >= 2) {
      // The subtrees below the m one-letter words are permutations of each other.
      HistogramSink sink{out.counts};
      count_runs(n, static_cast<std::int64_t>(cap), sink);
      for (std::size_t v = 2; v <= cap; ++v) out.counts[v] *= gens.size();
    }
    return out;
  }
  generic_norm_walk(gens, cap, out.counts);
  return out;
}

NormCounts count_words_by_norm(std::span<const GeneratorMatrix> gens, std::span<const double> caps,
                               bool allow_acceleration) {
  if (gens.empty()) fail(ErrorCode::invalid_argument, "count_words_by_norm: no generators");
  if (caps.empty()) fail(ErrorCode::invalid_argument, "count_words_by_norm: empty cap list");
  std::vector<std::int64_t> icaps;
  for (std::size_t q = 0; q < caps.size(); ++q) {
    if (!(caps[q] >= 1) || !std::isfinite(caps[q]) || caps[q] > 4.0e18)
      fail(ErrorCode::invalid_argument, "norm caps must be finite and at least 1");
    if (q && !(caps[q] > caps[q - 1])) fail(ErrorCode::invalid_argument, "norm caps must increase");
    icaps.push_back(static_cast<std::int64_t>(std::floor(caps[q])));
  }
  NormCounts out;
  out.caps.assign(caps.begin(), caps.end());
  const std::size_t n = gens.front().size();
  if (allow_acceleration && accelerable(gens)) {
    out.accelerated = true;
    for (std::int64_t cap : icaps) {
      TotalSink sink;
      if (cap >= 2) count_runs(n, cap, sink);
      out.counts.push_back(sink.total * gens.size() + 1);
    }
    return out;
  }
  const auto hist = norm_histogram(gens, static_cast<std::uint64_t>(icaps.back()), false);
  for (double c : caps) out.counts.push_back(hist.at_most(c));
  return out;
}

}  // namespace projdim
