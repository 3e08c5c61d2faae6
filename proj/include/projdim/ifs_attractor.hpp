#pragma once

// Self-projective iterated function systems: loading, tiling validation and
// enumeration of the hole simplices T_i(hole_k).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "projdim/matrix_words.hpp"
#include "projdim/simplex_geometry.hpp"

namespace projdim {

class IfsSystem {
 public:
  IfsSystem(std::string name, std::vector<GeneratorMatrix> generators, std::vector<HoleMatrix> holes);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return d_; }
  std::span<const GeneratorMatrix> generators() const noexcept { return generators_; }
  std::span<const HoleMatrix> holes() const noexcept { return holes_; }
  // First-level images of the standard simplex.
  const std::vector<Simplex>& cells() const noexcept { return cells_; }
  const std::vector<Simplex>& main_holes() const noexcept { return main_holes_; }
  double simplex_volume() const noexcept { return standard_simplex_volume(d_); }

 private:
  std::string name_;
  std::size_t d_;
  std::vector<GeneratorMatrix> generators_;
  std::vector<HoleMatrix> holes_;
  std::vector<Simplex> cells_;
  std::vector<Simplex> main_holes_;
};

IfsSystem rauzy_system();

struct LoadOptions {
  // Reject systems failing validate_tiling (error code tiling_failure).
  bool require_tiling = true;
  std::uint64_t tiling_samples = 100000;
  std::uint64_t seed = 1;
};

// Config document: {"name", "dimension", "generators": [matrix...],
// "holes": [matrix...]}. Hole entries are numbers or strings such as "1/2",
// "2^(-1/3)" or "3/4*2^(1/3)".
IfsSystem load_system_json(std::string_view text, const LoadOptions& options = {});
IfsSystem load_system_file(const std::string& path, const LoadOptions& options = {});
IfsSystem load_preset(std::string_view name);

// Parses one hole-matrix entry.
long double parse_entry(std::string_view text);

struct TilingReport {
  double total_volume = 0;      // vol(Delta)
  double covered_volume = 0;    // sum of cell and main-hole volumes
  double volume_defect = 0;     // |covered - total| / total
  bool volume_ok = false;
  std::uint64_t samples = 0;
  std::uint64_t collisions = 0;  // samples inside two or more first-level interiors
  bool disjoint_ok = false;
  bool holes_ok = false;         // every main hole non-degenerate
  std::vector<double> cell_ratios;  // vol(T_j(Delta)) / vol(Delta)
  std::vector<double> hole_ratios;

  bool passed() const noexcept { return volume_ok && disjoint_ok && holes_ok; }
  std::string describe() const;
};

TilingReport validate_tiling(const IfsSystem& system, std::uint64_t samples = 100000, std::uint64_t seed = 1);

struct HoleRecord {
  ExtendedWord word;
  std::vector<Point> vertices;
  double log_volume = 0;  // from the product formula, never re-triangulated
  double inradius = 0;    // d * vol / per with the same volume

  double volume() const { return std::exp(log_volume); }
  double log_inradius() const { return std::log(inradius); }
  Simplex simplex() const { return Simplex(vertices); }
};

struct HoleSummary {
  TraversalSummary traversal;
  std::vector<long double> level_volume;  // total hole volume per word length

  void add(std::size_t level, double log_volume);
  void merge(const HoleSummary& other);
  long double total_volume() const;
};

namespace detail {

// Builds the record for T_i(hole k) from the exact product N_i.
HoleRecord make_hole(const IfsSystem& system, const Word& word, const IntMatrix& product, std::size_t hole);

template <class Visitor>
struct HoleAdapter {
  const IfsSystem* system;
  Visitor* visitor;
  std::optional<Visitor> owned{};
  HoleSummary summary{};

  Visitor& target() { return owned ? *owned : *visitor; }

  void operator()(const Word& word, const IntMatrix& product) {
    for (std::size_t k = 0; k < system->holes().size(); ++k) {
      HoleRecord rec = make_hole(*system, word, product, k);
      summary.add(word.size(), rec.log_volume);
      target()(static_cast<const HoleRecord&>(rec));
    }
  }

  HoleAdapter fork() const
    requires requires(const Visitor& v) { v.fork(); }
  {
    HoleAdapter out{system, visitor};
    out.owned.emplace(visitor->fork());
    return out;
  }

  void merge(HoleAdapter&& other)
    requires requires(Visitor& v, Visitor&& w) { v.merge(std::move(w)); }
  {
    target().merge(std::move(other.target()));
    summary.merge(other.summary);
  }
};

}  // namespace detail

// Visits every hole T_i(hole_k) for the words i admitted by `policy`.
template <class Visitor>
HoleSummary enumerate_holes(const IfsSystem& system, const PruningPolicy& policy, Visitor& visitor,
                            const TraversalOptions& options = {}) {
  detail::HoleAdapter<Visitor> adapter{&system, &visitor};
  auto traversal = enumerate_words(system.generators(), policy, adapter, options);
  adapter.summary.traversal = std::move(traversal);
  return std::move(adapter.summary);
}

}  // namespace projdim
