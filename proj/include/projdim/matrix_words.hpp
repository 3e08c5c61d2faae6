#pragma once

// Exact matrix algebra over the generator semigroup and traversal of the word tree.

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "projdim/error.hpp"

namespace projdim {

using BigInt = boost::multiprecision::cpp_int;

// A point of R^{d+1}; points of the standard simplex have non-negative
// coordinates summing to one.
using Point = std::vector<double>;

// Square integer matrix. Entries are held as int64 until an operation would
// overflow, after which the matrix switches to arbitrary precision.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(std::size_t n);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);
  static IntMatrix from_big_rows(const std::vector<std::vector<BigInt>>& rows);

  std::size_t size() const noexcept { return n_; }
  bool promoted() const noexcept { return !big_.empty(); }

  BigInt at(std::size_t r, std::size_t c) const;
  // Precondition: !promoted().
  std::int64_t small_at(std::size_t r, std::size_t c) const noexcept { return small_[r * n_ + c]; }
  long double to_long_double(std::size_t r, std::size_t c) const;
  double to_double(std::size_t r, std::size_t c) const {
    return static_cast<double>(to_long_double(r, c));
  }

  bool non_negative() const;
  BigInt determinant() const;
  BigInt column_sum(std::size_t c) const;
  // Largest absolute entry, as a floating value (entries may exceed double range
  // only at absurd depths).
  long double max_abs_entry() const;

  // out = a * b. `out` must not alias `a` or `b`; its storage is reused.
  static void multiply(const IntMatrix& a, const IntMatrix& b, IntMatrix& out);
  IntMatrix operator*(const IntMatrix& rhs) const;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b);

  std::string to_string() const;

 private:
  void promote();

  std::size_t n_ = 0;
  std::vector<std::int64_t> small_;
  std::vector<BigInt> big_;
};

// Non-negative integer matrix with |det| = 1 and every column sum >= 1.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(IntMatrix m);

  const IntMatrix& matrix() const noexcept { return m_; }
  // Exact integer inverse (entries may be negative).
  const IntMatrix& inverse() const noexcept { return inverse_; }
  int det_sign() const noexcept { return det_sign_; }
  std::size_t size() const noexcept { return m_.size(); }

 private:
  IntMatrix m_;
  IntMatrix inverse_;
  int det_sign_ = 1;
};

// Non-negative real matrix with |det| = 1 up to 1e-12. Hole matrices are
// usually irrational (a cube root of two for the Rauzy main hole).
class HoleMatrix {
 public:
  HoleMatrix(std::size_t n, std::vector<long double> row_major);

  std::size_t size() const noexcept { return n_; }
  long double entry(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }
  long double determinant() const noexcept { return det_; }
  // Columns normalised to unit l1 norm: the vertices of the main hole.
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  // l1 norms of the columns.
  const std::vector<long double>& column_norms() const noexcept { return column_norms_; }
  long double l1_operator_norm() const;

 private:
  std::size_t n_;
  std::vector<long double> entries_;
  long double det_ = 0;
  std::vector<Point> vertices_;
  std::vector<long double> column_norms_;
};

// Finite word over the generator alphabet. Letters are stored 0-based; the
// textual form is 1-based.
class Word {
 public:
  using Letter = std::uint32_t;

  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const noexcept { return letters_; }

  void push_back(Letter l) { letters_.push_back(l); }
  void pop_back() { letters_.pop_back(); }
  void clear() noexcept { letters_.clear(); }

  // Throws invalid_argument if some letter is >= alphabet.
  void check_alphabet(std::size_t alphabet) const;
  // Bit k set iff letter k occurs (alphabets up to 64 letters).
  std::uint64_t letter_mask() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

struct ExtendedWord {
  Word word;
  std::uint32_t hole = 0;  // 0-based hole index
};

struct MatrixProduct {
  IntMatrix matrix;
  Word word;

  static MatrixProduct identity(std::size_t n) { return {IntMatrix::identity(n), Word{}}; }
};

MatrixProduct compose(const MatrixProduct& prefix, std::span<const GeneratorMatrix> generators,
                      std::size_t letter);

// N*x / |N*x| for x on the standard simplex.
Point projectivize(const IntMatrix& n, std::span<const double> x);
Point projectivize(const HoleMatrix& m, std::span<const double> x);

// Max column sum; equals the l1 -> l1 operator norm for non-negative matrices.
BigInt l1_operator_norm(const IntMatrix& n);

// Descending singular values. Each sigma_k is the ratio of the top singular
// values of consecutive exterior powers, whose entries are exact integer
// minors, so small singular values keep full relative accuracy.
std::vector<double> singular_values(const IntMatrix& n);

// ---------------------------------------------------------------------------
// Word-tree traversal

class PruningPolicy {
 public:
  enum class Kind { max_depth, norm_cap, volume_floor };

  static PruningPolicy max_depth(std::uint32_t depth);
  // Visit exactly the words with l1 operator norm <= cap.
  static PruningPolicy norm_cap(double cap);
  // Visit exactly the words whose image cell Delta_i has volume >= floor. Cells
  // are nested along extensions, so pruning a subtree never drops a word
  // that satisfies the floor.
  static PruningPolicy volume_floor(double floor);

  Kind kind() const noexcept { return kind_; }
  std::uint32_t depth() const noexcept { return depth_; }
  double cap() const noexcept { return value_; }
  double floor() const noexcept { return value_; }
  // Traversal aborts once a word this long is reached under norm-cap or
  // volume-floor policies (signals an infinite visit set).
  std::uint32_t depth_guard() const noexcept { return guard_; }
  PruningPolicy& with_depth_guard(std::uint32_t guard) {
    guard_ = guard;
    return *this;
  }

  std::string describe() const;

 private:
  PruningPolicy(Kind k, std::uint32_t depth, double value) : kind_(k), depth_(depth), value_(value) {}

  Kind kind_;
  std::uint32_t depth_;
  double value_;
  std::uint32_t guard_ = 1u << 20;
};

struct TraversalSummary {
  std::vector<std::uint64_t> visits_per_depth;
  long double max_entry = 0;
  bool promoted = false;

  std::uint64_t total() const;
  void record(std::size_t depth, const IntMatrix& m);
  void merge(const TraversalSummary& other);
};

struct TraversalOptions {
  // Deterministic single-threaded pre-order traversal.
  bool sequential = true;
  // 0: take PROJDIM_THREADS, else hardware concurrency.
  unsigned threads = 0;
};

unsigned resolve_threads(const TraversalOptions& options);

// Visitors that can be split across subtrees and folded back together.
template <class V>
concept MergeableVisitor = requires(V v, const V cv, const Word& w, const IntMatrix& m) {
  v(w, m);
  { cv.fork() } -> std::same_as<V>;
  v.merge(std::move(v));
};

namespace detail {

class PolicyGate {
 public:
  PolicyGate(std::span<const GeneratorMatrix> gens, const PruningPolicy& policy);
  // Whether the word of the given length with this product is in the visit set.
  bool admits(const IntMatrix& product, std::size_t depth) const;

 private:
  PruningPolicy policy_;
  long double log_volume_budget_ = 0;  // for volume floors: log(vol(Delta)/floor)
  std::int64_t int_cap_ = 0;
};

// Pre-order DFS below (prefix, product). Calls visit(word, product) for the
// root and every admitted descendant.
template <class Visit>
void walk_subtree(std::span<const GeneratorMatrix> gens, const PolicyGate& gate,
                  const PruningPolicy& policy, Word prefix, const IntMatrix& product, Visit&& visit,
                  TraversalSummary& summary) {
  const std::size_t m = gens.size();
  const std::size_t base = prefix.size();
  std::vector<IntMatrix> mats;
  std::vector<std::size_t> next;
  mats.push_back(product);
  next.push_back(0);
  Word path = std::move(prefix);
  summary.record(base, product);
  visit(static_cast<const Word&>(path), static_cast<const IntMatrix&>(mats[0]));
  std::size_t level = 0;
  while (true) {
    if (next[level] == m) {
      if (level == 0) break;
      path.pop_back();
      --level;
      continue;
    }
    const std::size_t j = next[level]++;
    if (mats.size() <= level + 1) {
      mats.emplace_back();
      next.push_back(0);
    }
    IntMatrix::multiply(mats[level], gens[j].matrix(), mats[level + 1]);
    const std::size_t depth = base + level + 1;
    if (!gate.admits(mats[level + 1], depth)) continue;
    if (policy.kind() != PruningPolicy::Kind::max_depth && depth >= policy.depth_guard()) {
      fail(ErrorCode::invalid_argument,
           "word traversal exceeded depth guard " + std::to_string(policy.depth_guard()) +
               "; the pruning policy does not bound the visit set");
    }
    path.push_back(static_cast<Word::Letter>(j));
    ++level;
    next[level] = 0;
    summary.record(depth, mats[level]);
    visit(static_cast<const Word&>(path), static_cast<const IntMatrix&>(mats[level]));
  }
}

struct FrontierNode {
  Word word;
  IntMatrix product;
};

// Visits every admitted word shorter than `split` and returns the admitted
// words of length exactly `split`, in pre-order.
template <class Visit>
std::vector<FrontierNode> expand_frontier(std::span<const GeneratorMatrix> gens,
                                          const PolicyGate& gate, std::size_t split,
                                          Visit&& visit, TraversalSummary& summary) {
  std::vector<FrontierNode> layer;
  const std::size_t n = gens.front().size();
  IntMatrix id = IntMatrix::identity(n);
  if (!gate.admits(id, 0)) return {};
  layer.push_back({Word{}, std::move(id)});
  for (std::size_t depth = 0; depth < split; ++depth) {
    std::vector<FrontierNode> next;
    for (auto& node : layer) {
      summary.record(depth, node.product);
      visit(static_cast<const Word&>(node.word), static_cast<const IntMatrix&>(node.product));
      for (std::size_t j = 0; j < gens.size(); ++j) {
        FrontierNode child{node.word, node.product * gens[j].matrix()};
        if (!gate.admits(child.product, depth + 1)) continue;
        child.word.push_back(static_cast<Word::Letter>(j));
        next.push_back(std::move(child));
      }
    }
    layer = std::move(next);
    if (layer.empty()) break;
  }
  return layer;
}

}  // namespace detail

// Depth-first traversal of the words admitted by `policy`, delivering
// (word, N_word) to `visitor`. With a mergeable visitor and a non-sequential
// option, subtrees are folded on worker threads and merged in a fixed order.
template <class Visitor>
TraversalSummary enumerate_words(std::span<const GeneratorMatrix> gens, const PruningPolicy& policy,
                                 Visitor& visitor, const TraversalOptions& options = {}) {
  if (gens.empty()) fail(ErrorCode::invalid_argument, "enumerate_words: no generators");
  detail::PolicyGate gate(gens, policy);
  TraversalSummary summary;
  const std::size_t n = gens.front().size();

  const unsigned threads = options.sequential ? 1u : resolve_threads(options);
  if constexpr (MergeableVisitor<Visitor>) {
    if (threads > 1) {
      std::size_t split = 1;
      std::size_t width = gens.size();
      while (width < 8 * threads && split < 6) {
        width *= gens.size();
        ++split;
      }
      if (policy.kind() == PruningPolicy::Kind::max_depth) split = std::min<std::size_t>(split, policy.depth());
      auto frontier = detail::expand_frontier(gens, gate, split, visitor, summary);
      std::vector<Visitor> parts;
      std::vector<TraversalSummary> sums(frontier.size());
      parts.reserve(frontier.size());
      for (std::size_t i = 0; i < frontier.size(); ++i) parts.push_back(visitor.fork());
      std::atomic<std::size_t> cursor{0};
      std::vector<std::exception_ptr> errors(threads);
      auto work = [&](unsigned id) {
        try {
          for (std::size_t i = cursor++; i < frontier.size(); i = cursor++) {
            detail::walk_subtree(gens, gate, policy, frontier[i].word, frontier[i].product, parts[i],
                                 sums[i]);
          }
        } catch (...) {
          errors[id] = std::current_exception();
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
      work(0);
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        visitor.merge(std::move(parts[i]));
        summary.merge(sums[i]);
      }
      return summary;
    }
  }
  IntMatrix id = IntMatrix::identity(n);
  if (!gate.admits(id, 0)) return summary;
  detail::walk_subtree(gens, gate, policy, Word{}, id, visitor, summary);
  return summary;
}

// ---------------------------------------------------------------------------
// Norm counting. Only the row vector of column sums of N_i matters for
// ||N_i||, so counting runs on that vector instead of full products.

struct NormHistogram {
  // counts[v] = #{i : ||N_i|| = v} for v <= cap; counts[0] = 0.
  std::vector<std::uint64_t> counts;
  bool accelerated = false;

  std::uint64_t at_most(double cap) const;
};

// Generators of Arnoux-Rauzy shape (N_j is the identity with row r(j) replaced
// by ones, r injective) take a closed form for runs of a repeated letter;
// everything else walks the tree of column-sum vectors.
NormHistogram norm_histogram(std::span<const GeneratorMatrix> gens, std::uint64_t cap,
                             bool allow_acceleration = true);

struct NormCounts {
  std::vector<double> caps;           // strictly increasing
  std::vector<std::uint64_t> counts;  // #{i : ||N_i|| <= caps[q]}, empty word included
  bool accelerated = false;
};

// Same counts as norm_histogram, at a short list of caps; the closed form adds
// whole runs at once, so this scales to much larger caps.
NormCounts count_words_by_norm(std::span<const GeneratorMatrix> gens, std::span<const double> caps,
                               bool allow_acceleration = true);

// Row index r(j) per generator when the family has Arnoux-Rauzy shape.
std::optional<std::vector<std::size_t>> arnoux_rauzy_rows(std::span<const GeneratorMatrix> gens);

}  // namespace projdim
