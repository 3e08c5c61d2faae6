#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "projdim/export.hpp"

using namespace projdim;

#ifndef PROJDIM_TEST_DATA
#define PROJDIM_TEST_DATA "tests/data"
#endif

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("series csv") {
  const SeriesReport r = hole_series(rauzy_system(), 0.0, PruningPolicy::max_depth(3));
  const std::string csv = series_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,parameter,level,level_sum_log,cumulative");
  std::getline(in, line);
  CHECK(line.rfind("hole-series,0,0,", 0) == 0);
  CHECK(count(csv, "\n") == 5);

  std::ostringstream no_header;
  write_series_csv(no_header, r, false);
  CHECK(no_header.str() == csv.substr(csv.find('\n') + 1));

  SeriesReport empty;
  empty.level_sum_log = {-INFINITY};
  empty.cumulative = {0};
  empty.terms = {0};
  CHECK(series_csv(empty).find("-inf") != std::string::npos);
}

TEST_CASE("render") {
  const IfsSystem sys = rauzy_system();
  RenderStats s0;
  const std::string svg0 = render_svg(sys, 0, &s0);
  CHECK(s0.cells == 3);
  CHECK(s0.holes == 1);
  CHECK(count(svg0, "<polygon") == 5);  // outline, 3 cells, 1 hole
  CHECK(svg0.rfind("<svg", 0) == 0);

  RenderStats s1;
  render_svg(sys, 1, &s1);
  CHECK(s1.cells == 9);
  CHECK(s1.holes == 4);

  CHECK(render_svg(sys, 3) == render_svg(sys, 3));
  CHECK_THROWS_AS(render_svg(sys, 13), Error);

  LoadOptions lax;
  lax.require_tiling = false;
  const IfsSystem tetra = load_system_file(std::string(PROJDIM_TEST_DATA) + "/tetra.json", lax);
  CHECK_THROWS_WITH_AS(render_svg(tetra, 1), "render supports d = 2 only", Error);
}
