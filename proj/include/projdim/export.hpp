#pragma once

// CSV and SVG output.

#include <cstdint>
#include <ostream>
#include <string>

#include "projdim/dimension_estimators.hpp"

namespace projdim {

// Header "kind,parameter,level,level_sum_log,cumulative", one row per level.
void write_series_csv(std::ostream& out, const SeriesReport& report, bool header = true);
std::string series_csv(const SeriesReport& report);

struct RenderStats {
  std::uint64_t cells = 0;
  std::uint64_t holes = 0;
};

// Cells T_i(Delta) with |i| = depth + 1 filled, holes of words |i| <= depth
// outlined, in the equilateral projection of Delta. d = 2 only.
std::string render_svg(const IfsSystem& system, std::uint32_t depth, RenderStats* stats = nullptr);

}  // namespace projdim
