#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "projdim/ifs_attractor.hpp"

using namespace projdim;
using doctest::Approx;

#ifndef PROJDIM_TEST_DATA
#define PROJDIM_TEST_DATA "tests/data"
#endif

namespace {

std::string data(const char* name) { return std::string(PROJDIM_TEST_DATA) + "/" + name; }

struct Holes {
  std::vector<HoleRecord> records;
  void operator()(const HoleRecord& r) { records.push_back(r); }
};

}  // namespace

TEST_CASE("rauzy preset") {
  const IfsSystem sys = load_preset("rauzy");
  CHECK(sys.name() == "rauzy");
  CHECK(sys.dimension() == 2);
  CHECK(sys.generators().size() == 3);
  CHECK(sys.holes().size() == 1);
  CHECK(std::abs(sys.holes()[0].determinant() - 1) < 1e-15);
  CHECK_THROWS_AS(load_preset("apollonian"), Error);
}

TEST_CASE("config loading") {
  const IfsSystem sys = load_system_file(data("rauzy.json"));
  CHECK(sys.name() == "rauzy-explicit");
  const IfsSystem ref = rauzy_system();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(static_cast<double>(sys.holes()[0].entry(r, c)) == static_cast<double>(ref.holes()[0].entry(r, c)));
  CHECK(load_system_json(R"({"preset": "rauzy"})").name() == "rauzy");
}

TEST_CASE("config errors") {
  try {
    load_system_file(data("det2.json"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("unimodularity violated") != std::string::npos);
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
  const char* no_holes = R"({"dimension": 2, "generators": [[[1,1,1],[0,1,0],[0,0,1]]], "holes": []})";
  CHECK_THROWS_AS(load_system_json(no_holes), Error);
  const char* negative = R"({"dimension": 2, "generators": [[[1,-1,0],[0,1,0],[0,0,1]]],
                             "holes": [[[1,0,0],[0,1,0],[0,0,1]]]})";
  CHECK_THROWS_AS(load_system_json(negative), Error);

  try {
    load_system_file(data("malformed.json"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_input);
  }
  try {
    load_system_file(data("overlap.json"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::tiling_failure);
  }
  try {
    load_system_file(data("no-such-file.json"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("hole entry expressions") {
  CHECK(parse_entry("0") == 0);
  CHECK(static_cast<double>(parse_entry("1/2")) == 0.5);
  CHECK(static_cast<double>(parse_entry("2^(-1/3)")) == Approx(std::cbrt(0.5)).epsilon(1e-15));
  CHECK(static_cast<double>(parse_entry("3/4*2^(1/3)")) == Approx(0.75 * std::cbrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(parse_entry("2^^3"), Error);
  CHECK_THROWS_AS(parse_entry("x"), Error);
}

TEST_CASE("tiling validation") {
  const TilingReport r = validate_tiling(rauzy_system(), 20000, 3);
  CHECK(r.passed());
  CHECK(r.collisions == 0);
  CHECK(std::abs(r.covered_volume - r.total_volume) < 1e-12);
  for (double c : r.cell_ratios) CHECK(c == Approx(0.25).epsilon(1e-14));
  for (double c : r.hole_ratios) CHECK(c == Approx(0.25).epsilon(1e-14));

  LoadOptions lax;
  lax.require_tiling = false;
  const TilingReport overlap = validate_tiling(load_system_file(data("overlap.json"), lax), 20000, 3);
  CHECK(overlap.volume_ok);
  CHECK_FALSE(overlap.disjoint_ok);
  CHECK(overlap.collisions > 0);
  CHECK_FALSE(overlap.passed());

  const char* single = R"({"dimension": 2, "generators": [[[1,1,1],[0,1,0],[0,0,1]]],
                           "holes": [[[1,0,0],[0,1,0],[0,0,1]]]})";
  const TilingReport bad = validate_tiling(load_system_json(single, lax), 20000, 3);
  CHECK_FALSE(bad.volume_ok);
  CHECK_FALSE(bad.passed());
}

TEST_CASE("holes at depth 0 and 1") {
  const IfsSystem sys = rauzy_system();
  const double vol = sys.simplex_volume();
  Holes h0;
  enumerate_holes(sys, PruningPolicy::max_depth(0), h0);
  REQUIRE(h0.records.size() == 1);
  CHECK(h0.records[0].volume() == Approx(vol / 4).epsilon(1e-14));
  CHECK(h0.records[0].inradius == Approx(0.5 / std::sqrt(6.0)).epsilon(1e-14));

  Holes h1;
  const HoleSummary s = enumerate_holes(sys, PruningPolicy::max_depth(1), h1);
  REQUIRE(h1.records.size() == 4);
  for (std::size_t k = 1; k < 4; ++k) {
    const HoleRecord& r = h1.records[k];
    const double expected = vol / 4 * volume_ratio(sys.generators()[r.word.word[0]].matrix(), sys.main_holes()[0]);
    CHECK(r.volume() == Approx(expected).epsilon(1e-13));
    // The product formula agrees with re-triangulating the vertices.
    CHECK(r.volume() == Approx(r.simplex().volume()).epsilon(1e-12));
  }
  CHECK(static_cast<double>(s.total_volume()) < vol);
}

TEST_CASE("hole volumes agree with vertex geometry at depth 10") {
  const IfsSystem sys = rauzy_system();
  struct Check {
    double worst = 0;
    void operator()(const HoleRecord& r) {
      worst = std::max(worst, std::abs(r.volume() - r.simplex().volume()) / r.volume());
    }
  } check;
  enumerate_holes(sys, PruningPolicy::max_depth(10), check);
  CHECK(check.worst < 1e-6);
}

TEST_CASE("norm volume comparability constants are finite") {
  const IfsSystem sys = rauzy_system();
  const double main = sys.main_holes()[0].volume();
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0;
  struct Visit {
    const IfsSystem* sys;
    double main;
    double* c1;
    double* c2;
    void operator()(const Word& w, const IntMatrix& m) {
      const HoleRecord r = detail::make_hole(*sys, w, m, 0);
      const double norm = static_cast<double>(l1_operator_norm(m));
      const double v = r.volume() / main * norm * norm * norm;
      *c1 = std::min(*c1, v);
      *c2 = std::max(*c2, v);
    }
  } visit{&sys, main, &c1, &c2};
  enumerate_words(sys.generators(), PruningPolicy::max_depth(9), visit);
  MESSAGE("c1 = " << c1 << ", c2 = " << c2);
  CHECK(c1 > 0);
  CHECK(std::isfinite(c2));
}
