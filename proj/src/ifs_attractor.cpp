#include "projdim/ifs_attractor.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "internal/random.hpp"

namespace projdim {

namespace {

std::vector<Point> standard_vertices(std::size_t n) {
  std::vector<Point> v(n, Point(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  return v;
}

class EntryParser {
 public:
  explicit EntryParser(std::string_view s) : s_(s) {}

  long double parse() {
    long double v = term();
    skip();
    while (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      v *= term();
      skip();
    }
    if (pos_ != s_.size()) error("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCode::malformed_input, "hole entry \"" + std::string(s_) + "\": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  long double number() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    const std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty() || tok == "-" || tok == "+") error("expected a number");
    try {
      std::size_t used = 0;
      long double v = std::stold(tok, &used);
      if (used != tok.size()) error("bad number");
      return v;
    } catch (const std::logic_error&) {
      error("bad number");
    }
  }

  long double rational() {
    long double v = number();
    if (peek('/')) {
      ++pos_;
      const long double q = number();
      if (q == 0) error("division by zero");
      v /= q;
    }
    return v;
  }

  long double primary() {
    if (peek('(')) {
      ++pos_;
      long double v = rational();
      if (!peek(')')) error("missing ')'");
      ++pos_;
      return v;
    }
    return rational();
  }

  long double term() {
    const long double base = primary();
    if (!peek('^')) return base;
    ++pos_;
    const long double e = primary();
    if (base < 0 && e != std::floor(e)) error("fractional power of a negative number");
    return std::pow(base, e);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

const nlohmann::json& member(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) fail(ErrorCode::malformed_input, std::string("config is missing \"") + key + "\"");
  return *it;
}

IntMatrix read_generator(const nlohmann::json& m, std::size_t n) {
  if (!m.is_array() || m.size() != n) fail(ErrorCode::malformed_input, "generator must have d+1 rows");
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& row : m) {
    if (!row.is_array() || row.size() != n) fail(ErrorCode::malformed_input, "generator row must have d+1 entries");
    std::vector<std::int64_t> r;
    for (const auto& v : row) {
      if (!v.is_number_integer()) fail(ErrorCode::malformed_input, "generator entries must be integers");
      r.push_back(v.get<std::int64_t>());
    }
    rows.push_back(std::move(r));
  }
  return IntMatrix::from_rows(rows);
}

HoleMatrix read_hole(const nlohmann::json& m, std::size_t n) {
  if (!m.is_array() || m.size() != n) fail(ErrorCode::malformed_input, "hole matrix must have d+1 rows");
  std::vector<long double> entries;
  for (const auto& row : m) {
    if (!row.is_array() || row.size() != n) fail(ErrorCode::malformed_input, "hole row must have d+1 entries");
    for (const auto& v : row) {
      if (v.is_number()) {
        entries.push_back(v.get<long double>());
      } else if (v.is_string()) {
        entries.push_back(parse_entry(v.get<std::string>()));
      } else {
        fail(ErrorCode::malformed_input, "hole entries must be numbers or expression strings");
      }
    }
  }
  return HoleMatrix(n, std::move(entries));
}

}  // namespace

long double parse_entry(std::string_view text) { return EntryParser(text).parse(); }

IfsSystem::IfsSystem(std::string name, std::vector<GeneratorMatrix> generators, std::vector<HoleMatrix> holes)
    : name_(std::move(name)), generators_(std::move(generators)), holes_(std::move(holes)) {
  if (generators_.empty()) fail(ErrorCode::invalid_argument, "system needs at least one generator");
  if (holes_.empty()) fail(ErrorCode::invalid_argument, "system needs at least one hole matrix");
  const std::size_t n = generators_.front().size();
  if (n < 3) fail(ErrorCode::invalid_argument, "system dimension must be at least 2");
  d_ = n - 1;
  for (const auto& g : generators_)
    if (g.size() != n) fail(ErrorCode::invalid_argument, "generators differ in size");
  for (const auto& h : holes_)
    if (h.size() != n) fail(ErrorCode::invalid_argument, "hole matrix size differs from generators");
  const Simplex delta = Simplex::standard(d_);
  for (const auto& g : generators_) cells_.push_back(image_simplex(g.matrix(), delta));
  for (const auto& h : holes_) main_holes_.push_back(image_simplex(h, delta));
}

IfsSystem rauzy_system() {
  std::vector<GeneratorMatrix> gens;
  gens.emplace_back(IntMatrix::from_rows({{1, 1, 1}, {0, 1, 0}, {0, 0, 1}}));
  gens.emplace_back(IntMatrix::from_rows({{1, 0, 0}, {1, 1, 1}, {0, 0, 1}}));
  gens.emplace_back(IntMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {1, 1, 1}}));
  const long double alpha = std::cbrt(0.5L);
  std::vector<HoleMatrix> holes;
  holes.emplace_back(3, std::vector<long double>{0, alpha, alpha, alpha, 0, alpha, alpha, alpha, 0});
  return IfsSystem("rauzy", std::move(gens), std::move(holes));
}

IfsSystem load_preset(std::string_view name) {
  if (name == "rauzy") return rauzy_system();
  fail(ErrorCode::malformed_input, "unknown preset \"" + std::string(name) + "\"");
}

IfsSystem load_system_json(std::string_view text, const LoadOptions& options) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::malformed_input, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::malformed_input, "config must be a JSON object");
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) fail(ErrorCode::malformed_input, "\"preset\" must be a string");
    return load_preset(doc["preset"].get<std::string>());
  }
  std::string name = "custom";
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(ErrorCode::malformed_input, "\"name\" must be a string");
    name = doc["name"].get<std::string>();
  }
  const auto& dim = member(doc, "dimension");
  if (!dim.is_number_integer() || dim.get<std::int64_t>() < 2)
    fail(ErrorCode::malformed_input, "\"dimension\" must be an integer >= 2");
  const std::size_t n = static_cast<std::size_t>(dim.get<std::int64_t>()) + 1;
  const auto& gens_json = member(doc, "generators");
  const auto& holes_json = member(doc, "holes");
  if (!gens_json.is_array() || !holes_json.is_array())
    fail(ErrorCode::malformed_input, "\"generators\" and \"holes\" must be arrays");
  std::vector<GeneratorMatrix> gens;
  for (const auto& g : gens_json) gens.emplace_back(read_generator(g, n));
  std::vector<HoleMatrix> holes;
  for (const auto& h : holes_json) holes.push_back(read_hole(h, n));
  IfsSystem system(std::move(name), std::move(gens), std::move(holes));
  if (options.require_tiling) {
    const TilingReport report = validate_tiling(system, options.tiling_samples, options.seed);
    if (!report.passed()) fail(ErrorCode::tiling_failure, "tiling validation failed: " + report.describe());
  }
  return system;
}

IfsSystem load_system_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_system_json(buf.str(), options);
}

// ---------------------------------------------------------------------------
// Tiling

std::string TilingReport::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << "volume defect " << volume_defect << (volume_ok ? " (ok)" : " (FAIL)") << "; " << collisions
     << " interior collisions in " << samples << " samples" << (disjoint_ok ? " (ok)" : " (FAIL)")
     << "; main holes " << (holes_ok ? "non-degenerate (ok)" : "degenerate (FAIL)");
  return os.str();
}

TilingReport validate_tiling(const IfsSystem& system, std::uint64_t samples, std::uint64_t seed) {
  TilingReport report;
  const std::size_t n = system.dimension() + 1;
  const auto basis = standard_vertices(n);
  report.total_volume = system.simplex_volume();
  long double covered = 0;
  for (const auto& g : system.generators()) {
    const long double r = std::exp(log_volume_ratio(g.matrix(), basis));
    report.cell_ratios.push_back(static_cast<double>(r));
    covered += r;
  }
  for (const auto& h : system.holes()) {
    const long double r = std::exp(log_volume_ratio(h, basis));
    report.hole_ratios.push_back(static_cast<double>(r));
    covered += r;
  }
  report.covered_volume = static_cast<double>(covered * report.total_volume);
  report.volume_defect = static_cast<double>(std::fabs(covered - 1.0L));
  report.volume_ok = report.volume_defect <= 1e-9;

  report.holes_ok = true;
  for (const auto& h : system.main_holes()) report.holes_ok = report.holes_ok && !h.degenerate();

  std::vector<const Simplex*> regions;
  for (const auto& c : system.cells())
    if (!c.degenerate()) regions.push_back(&c);
  for (const auto& h : system.main_holes())
    if (!h.degenerate()) regions.push_back(&h);
  detail::Rng rng(detail::mix_seed(seed, 0));
  report.samples = samples;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Point x = detail::uniform_on_simplex(rng, n);
    int inside = 0;
    for (const Simplex* r : regions) {
      bool interior = true;
      for (double b : r->barycentric(x)) {
        if (!(b > 1e-12)) {
          interior = false;
          break;
        }
      }
      if (interior && ++inside > 1) break;
    }
    if (inside > 1) ++report.collisions;
  }
  report.disjoint_ok = report.collisions == 0;
  return report;
}

// ---------------------------------------------------------------------------
// Holes

void HoleSummary::add(std::size_t level, double log_volume) {
  if (level_volume.size() <= level) level_volume.resize(level + 1, 0.0L);
  level_volume[level] += std::exp(static_cast<long double>(log_volume));
}

void HoleSummary::merge(const HoleSummary& other) {
  traversal.merge(other.traversal);
  if (level_volume.size() < other.level_volume.size()) level_volume.resize(other.level_volume.size(), 0.0L);
  for (std::size_t i = 0; i < other.level_volume.size(); ++i) level_volume[i] += other.level_volume[i];
}

long double HoleSummary::total_volume() const {
  long double s = 0;
  for (auto v : level_volume) s += v;
  return s;
}

namespace detail {

HoleRecord make_hole(const IfsSystem& system, const Word& word, const IntMatrix& product, std::size_t hole) {
  const std::size_t n = system.dimension() + 1;
  const std::size_t d = n - 1;
  const HoleMatrix& m = system.holes()[hole];
  const Simplex& base = system.main_holes()[hole];
  const auto& verts = m.vertices();

  // Image vertices N_i v_j / |N_i v_j| in extended precision.
  std::vector<std::vector<long double>> img(n, std::vector<long double>(n, 0.0L));
  long double log_ratio = 0;
  for (std::size_t j = 0; j < n; ++j) {
    long double total = 0;
    for (std::size_t r = 0; r < n; ++r) {
      long double acc = 0;
      for (std::size_t c = 0; c < n; ++c) acc += product.to_long_double(r, c) * verts[j][c];
      img[j][r] = acc;
      total += acc;
    }
    for (auto& v : img[j]) v /= total;
    log_ratio -= std::log(total);
  }

  HoleRecord rec;
  rec.word.word = word;
  rec.word.hole = static_cast<std::uint32_t>(hole);
  rec.vertices.assign(n, Point(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < n; ++r) rec.vertices[j][r] = static_cast<double>(img[j][r]);
  rec.log_volume = static_cast<double>(static_cast<long double>(base.log_volume()) + log_ratio);

  // Facet j omits vertex j; its measure is sqrt(det Gram)/(d-1)! of the edges
  // from its first vertex.
  long double per = 0;
  std::vector<std::vector<long double>> edges;
  for (std::size_t j = 0; j < n; ++j) {
    edges.clear();
    std::size_t first = j == 0 ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j || i == first) continue;
      std::vector<long double> e(n);
      for (std::size_t r = 0; r < n; ++r) e[r] = img[i][r] - img[first][r];
      edges.push_back(std::move(e));
    }
    const std::size_t k = edges.size();
    // Cholesky of the Gram matrix.
    std::vector<long double> g(k * k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        long double s = 0;
        for (std::size_t r = 0; r < n; ++r) s += edges[a][r] * edges[b][r];
        g[a * k + b] = s;
      }
    long double log_measure = 0;
    for (std::size_t a = 0; a < k; ++a) {
      long double diag = g[a * k + a];
      for (std::size_t c = 0; c < a; ++c) diag -= g[a * k + c] * g[a * k + c];
      if (!(diag > 0)) fail(ErrorCode::numerical, "hole " + word.to_string() + " has a degenerate facet");
      diag = std::sqrt(diag);
      g[a * k + a] = diag;
      for (std::size_t b = a + 1; b < k; ++b) {
        long double s = g[b * k + a];
        for (std::size_t c = 0; c < a; ++c) s -= g[b * k + c] * g[a * k + c];
        g[b * k + a] = s / diag;
      }
      log_measure += std::log(diag);
    }
    per += std::exp(log_measure - std::lgamma(static_cast<long double>(k) + 1.0L));
  }
  rec.inradius = static_cast<double>(static_cast<long double>(d) * std::exp(static_cast<long double>(rec.log_volume)) / per);
  return rec;
}

}  // namespace detail

}  // namespace projdim
