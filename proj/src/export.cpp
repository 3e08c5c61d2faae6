#include "projdim/export.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace projdim {

namespace {

std::string number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr double kWidth = 1000;
constexpr double kMargin = 20;
const double kHeight = kWidth * std::sqrt(3.0) / 2;

// Barycentric weights -> planar point; vertex 0 bottom left, 1 bottom right,
// 2 top.
std::string planar(const Point& x) {
  const double px = kMargin + kWidth * (x[1] + 0.5 * x[2]);
  const double py = kMargin + kHeight * (1 - x[2]);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f,%.4f", px, py);
  return buf;
}

std::vector<Point> columns(const IntMatrix& m) {
  std::vector<Point> out(3, Point(3));
  for (std::size_t c = 0; c < 3; ++c) {
    long double s = 0;
    for (std::size_t r = 0; r < 3; ++r) s += m.to_long_double(r, c);
    for (std::size_t r = 0; r < 3; ++r) out[c][r] = static_cast<double>(m.to_long_double(r, c) / s);
  }
  return out;
}

std::string polygon(const std::vector<Point>& v, const char* style) {
  std::string out = "<polygon points=\"";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += planar(v[i]);
  }
  out += "\" ";
  out += style;
  out += "/>\n";
  return out;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f4e79", "#2e75b6", "#3b8fc4", "#5aa9d6", "#7cc0e3", "#9fd3ec"};

}  // namespace

void write_series_csv(std::ostream& out, const SeriesReport& report, bool header) {
  if (header) out << "kind,parameter,level,level_sum_log,cumulative\n";
  for (std::size_t n = 0; n < report.level_sum_log.size(); ++n)
    out << to_string(report.kind) << ',' << number(report.parameter) << ',' << n << ','
        << number(report.level_sum_log[n]) << ',' << number(report.cumulative[n]) << '\n';
}

std::string series_csv(const SeriesReport& report) {
  std::ostringstream out;
  write_series_csv(out, report);
  return out.str();
}

std::string render_svg(const IfsSystem& system, std::uint32_t depth, RenderStats* stats) {
  if (system.dimension() != 2) fail(ErrorCode::unsupported, "render supports d = 2 only");
  if (depth > 12) fail(ErrorCode::invalid_argument, "render depth must be <= 12");

  std::string cells, holes;
  RenderStats count;
  const std::string fill = std::string("fill=\"") + kPalette[depth % 6] + "\" stroke=\"none\"";
  struct Visitor {
    const IfsSystem* system;
    std::uint32_t depth;
    std::string* cells;
    std::string* holes;
    const std::string* fill;
    RenderStats* count;
    void operator()(const Word& word, const IntMatrix& product) {
      if (word.size() == depth + 1) {
        *cells += polygon(columns(product), fill->c_str());
        ++count->cells;
        return;
      }
      for (std::size_t k = 0; k < system->holes().size(); ++k) {
        const HoleRecord rec = detail::make_hole(*system, word, product, k);
        *holes += polygon(rec.vertices, "fill=\"#ffffff\" stroke=\"#444444\" stroke-width=\"0.5\"");
        ++count->holes;
      }
    }
  } visitor{&system, depth, &cells, &holes, &fill, &count};
  enumerate_words(system.generators(), PruningPolicy::max_depth(depth + 1), visitor, TraversalOptions{});

  char head[256];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                kWidth + 2 * kMargin, kHeight + 2 * kMargin, kWidth + 2 * kMargin, kHeight + 2 * kMargin);
  std::string out = head;
  out += "<title>" + xml_escape(system.name()) + " depth " + std::to_string(depth) + "</title>\n";
  out += polygon({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, "fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"");
  out += "<g id=\"cells\">\n" + cells + "</g>\n";
  out += "<g id=\"holes\">\n" + holes + "</g>\n";
  out += "</svg>\n";
  if (stats) *stats = count;
  return out;
}

}  // namespace projdim
