#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "projdim/ifs_attractor.hpp"
#include "projdim/matrix_words.hpp"

using namespace projdim;

namespace {

IntMatrix n1() { return IntMatrix::from_rows({{1, 1, 1}, {0, 1, 0}, {0, 0, 1}}); }
IntMatrix n2() { return IntMatrix::from_rows({{1, 0, 0}, {1, 1, 1}, {0, 0, 1}}); }

struct Collect {
  std::vector<Word> words;
  std::vector<IntMatrix> products;
  void operator()(const Word& w, const IntMatrix& m) {
    words.push_back(w);
    products.push_back(m);
  }
};

}  // namespace

TEST_CASE("compose") {
  const IfsSystem sys = rauzy_system();
  const auto gens = sys.generators();
  const MatrixProduct a = compose(MatrixProduct::identity(3), gens, 0);
  CHECK(a.matrix == n1());
  CHECK(a.word.to_string() == "1");

  const MatrixProduct ab = compose(a, gens, 1);
  CHECK(ab.matrix == IntMatrix::from_rows({{2, 1, 2}, {1, 1, 1}, {0, 0, 1}}));
  CHECK(ab.matrix == n1() * n2());
  CHECK(ab.word.to_string() == "1.2");

  const MatrixProduct aa = compose(a, gens, 0);
  CHECK(aa.matrix == IntMatrix::from_rows({{1, 2, 2}, {0, 1, 0}, {0, 0, 1}}));
}

TEST_CASE("powers grow linearly and promote past int64") {
  const IfsSystem sys = rauzy_system();
  MatrixProduct p = MatrixProduct::identity(3);
  for (int k = 0; k < 50; ++k) p = compose(p, sys.generators(), 0);
  CHECK(p.matrix.at(0, 1) == 50);
  CHECK_FALSE(p.matrix.promoted());

  // Fibonacci-like growth along 1212... overflows int64 near length 90.
  MatrixProduct q = MatrixProduct::identity(3);
  for (int k = 0; k < 200; ++k) q = compose(q, sys.generators(), k % 2);
  CHECK(q.matrix.promoted());
  CHECK(abs(q.matrix.determinant()) == 1);
  // Promoted and unpromoted arithmetic agree.
  MatrixProduct r = MatrixProduct::identity(3);
  for (int k = 0; k < 200; ++k) r.matrix = r.matrix * sys.generators()[k % 2].matrix();
  CHECK(r.matrix == q.matrix);
}

TEST_CASE("projectivize") {
  const IfsSystem sys = rauzy_system();
  const Point a = projectivize(n1(), std::vector<double>{1, 0, 0});
  CHECK(a == Point{1, 0, 0});
  const Point b = projectivize(n1(), std::vector<double>{0, 1, 0});
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[1] == doctest::Approx(0.5));
  CHECK(b[2] == 0);
  const Point c = projectivize(sys.holes()[0], std::vector<double>{1, 0, 0});
  CHECK(c[0] == 0);
  CHECK(c[1] == doctest::Approx(0.5));
  CHECK(c[2] == doctest::Approx(0.5));

  // T_1(x, y, z) = (1, y, z) / (2 - x) on the simplex.
  const std::vector<double> x{0.2, 0.5, 0.3};
  const Point t = projectivize(n1(), x);
  CHECK(t[0] == doctest::Approx(1 / 1.8));
  CHECK(t[1] == doctest::Approx(0.5 / 1.8));

  CHECK_THROWS_AS(projectivize(n1(), std::vector<double>{-0.1, 0.6, 0.5}), Error);
  CHECK_THROWS_AS(projectivize(n1(), std::vector<double>{0.5, 0.6, 0.5}), Error);
}

TEST_CASE("l1 operator norm") {
  CHECK(l1_operator_norm(IntMatrix::identity(3)) == 1);
  CHECK(l1_operator_norm(n1()) == 2);
  CHECK(l1_operator_norm(n1() * n2()) == 4);
}

TEST_CASE("singular values") {
  auto id = singular_values(IntMatrix::identity(3));
  for (double s : id) CHECK(s == doctest::Approx(1.0));

  auto perm = singular_values(IntMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
  for (double s : perm) CHECK(s == doctest::Approx(1.0));

  auto s = singular_values(n1());
  REQUIRE(s.size() == 3);
  CHECK(s[0] >= s[1]);
  CHECK(s[1] >= s[2]);
  CHECK(std::abs(s[0] * s[1] * s[2] - 1) < 1e-9);

  // A long product keeps the small singular value accurate: product stays 1.
  const IfsSystem sys = rauzy_system();
  IntMatrix m = IntMatrix::identity(3);
  for (int k = 0; k < 40; ++k) m = m * sys.generators()[(k * 7 + k / 3) % 3].matrix();
  auto t = singular_values(m);
  CHECK(std::abs(std::log(t[0]) + std::log(t[1]) + std::log(t[2])) < 1e-9);
}

TEST_CASE("generator validation") {
  CHECK_THROWS_WITH_AS(GeneratorMatrix(IntMatrix::from_rows({{2, 0, 0}, {0, 1, 0}, {0, 0, 1}})),
                       doctest::Contains("unimodularity violated"), Error);
  CHECK_THROWS_AS(GeneratorMatrix(IntMatrix::from_rows({{1, -1, 0}, {0, 1, 0}, {0, 0, 1}})), Error);
  GeneratorMatrix g(n1());
  CHECK(g.matrix() * g.inverse() == IntMatrix::identity(3));
}

TEST_CASE("enumerate max depth") {
  const IfsSystem sys = rauzy_system();
  Collect c;
  const auto summary = enumerate_words(sys.generators(), PruningPolicy::max_depth(2), c);
  CHECK(c.words.size() == 13);
  CHECK(summary.total() == 13);
  CHECK(c.words.front().empty());
  CHECK(summary.visits_per_depth == std::vector<std::uint64_t>{1, 3, 9});
}

TEST_CASE("enumerate norm cap") {
  const IfsSystem sys = rauzy_system();
  {
    Collect c;
    enumerate_words(sys.generators(), PruningPolicy::norm_cap(1), c);
    REQUIRE(c.words.size() == 1);
    CHECK(c.words[0].empty());
  }
  // Brute force: every letter raises the norm by at least one, so words of
  // length <= 9 cover norm <= 10.
  std::uint64_t brute = 0;
  std::function<void(const IntMatrix&, int)> rec = [&](const IntMatrix& m, int len) {
    if (l1_operator_norm(m) <= 10) ++brute;
    if (len == 9) return;
    for (const auto& g : sys.generators()) rec(m * g.matrix(), len + 1);
  };
  rec(IntMatrix::identity(3), 0);
  Collect c;
  enumerate_words(sys.generators(), PruningPolicy::norm_cap(10), c);
  CHECK(c.words.size() == brute);
  for (const auto& m : c.products) CHECK(l1_operator_norm(m) <= 10);

  // Histogram and accelerated counts agree with the traversal.
  const auto hist = norm_histogram(sys.generators(), 10);
  CHECK(hist.at_most(10) == brute);
  const std::vector<double> caps{3, 6, 10};
  const auto slow = count_words_by_norm(sys.generators(), caps, false);
  const auto fast = count_words_by_norm(sys.generators(), caps, true);
  CHECK(fast.accelerated);
  CHECK(slow.counts == fast.counts);
  CHECK(fast.counts.back() == brute);
}

TEST_CASE("policy errors") {
  CHECK_THROWS_AS(PruningPolicy::norm_cap(0), Error);
  CHECK_THROWS_AS(PruningPolicy::norm_cap(-3), Error);
  CHECK_THROWS_AS(PruningPolicy::volume_floor(0), Error);
}

TEST_CASE("volume floor visits exactly the large cells") {
  const IfsSystem sys = rauzy_system();
  Collect floor_words;
  enumerate_words(sys.generators(), PruningPolicy::volume_floor(2e-2), floor_words);
  for (const auto& w : floor_words.words) CHECK(w.size() < 10);
  Collect all;
  enumerate_words(sys.generators(), PruningPolicy::max_depth(10), all);
  std::size_t expected = 0;
  for (const auto& m : all.products) {
    long double prod = 1;
    for (std::size_t c = 0; c < 3; ++c) prod *= static_cast<long double>(m.column_sum(c));
    if (sys.simplex_volume() / prod >= 2e-2) ++expected;
  }
  CHECK(floor_words.words.size() == expected);
}

TEST_CASE("parallel traversal matches sequential") {
  struct Count {
    std::uint64_t n = 0;
    long double total = 0;
    void operator()(const Word&, const IntMatrix& m) {
      ++n;
      total += static_cast<long double>(l1_operator_norm(m));
    }
    Count fork() const { return {}; }
    void merge(Count&& o) {
      n += o.n;
      total += o.total;
    }
  };
  const IfsSystem sys = rauzy_system();
  Count seq, par;
  enumerate_words(sys.generators(), PruningPolicy::max_depth(8), seq);
  TraversalOptions opts;
  opts.sequential = false;
  opts.threads = 4;
  enumerate_words(sys.generators(), PruningPolicy::max_depth(8), par, opts);
  CHECK(seq.n == par.n);
  CHECK(seq.total == par.total);
}

TEST_CASE("word helpers") {
  Word w({0, 2, 2});
  CHECK(w.to_string() == "1.3.3");
  CHECK(w.letter_mask() == 0b101);
  CHECK_THROWS_AS(w.check_alphabet(2), Error);
  CHECK_NOTHROW(w.check_alphabet(3));
}

TEST_CASE("arnoux rauzy shape") {
  const IfsSystem sys = rauzy_system();
  const auto rows = arnoux_rauzy_rows(sys.generators());
  REQUIRE(rows);
  CHECK(*rows == std::vector<std::size_t>{0, 1, 2});
}
