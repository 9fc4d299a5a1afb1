#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fatou/cycles.hpp"
#include "fatou/geometry.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

/// Cell-centred sampling of a box.  Row 0 is the top edge (largest imaginary
/// part), matching image orientation.
class Grid {
 public:
  Grid(const Box& box, int nx, int ny);

  const Box& box() const noexcept { return box_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  double cell_width() const noexcept { return box_.width / nx_; }
  double cell_height() const noexcept { return box_.height / ny_; }
  double cell_area() const noexcept { return cell_width() * cell_height(); }
  /// Larger of the two cell sides; the unit for pixel tolerances.
  double cell_size() const noexcept;

  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
  }
  int ix(std::size_t idx) const noexcept { return static_cast<int>(idx % static_cast<std::size_t>(nx_)); }
  int iy(std::size_t idx) const noexcept { return static_cast<int>(idx / static_cast<std::size_t>(nx_)); }
  cplx center(int ix, int iy) const noexcept;
  cplx center(std::size_t idx) const noexcept { return center(ix(idx), iy(idx)); }
  /// Cell containing z, or nullopt outside the box.
  std::optional<std::size_t> cell_of(cplx z) const noexcept;
  /// Fractional cell coordinates (x to the right, y downwards).
  std::pair<double, double> to_cell_coords(cplx z) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  Box box_;
  int nx_;
  int ny_;
};

enum class CellKind : std::uint8_t { escaping = 0, bounded = 1, basin = 2, graph_cut = 3 };

struct Cell {
  CellKind kind = CellKind::bounded;
  /// Escape iteration for escaping cells, attractor index for basin cells.
  std::int32_t value = 0;
};

/// An attracting or parabolic cycle used to capture bounded orbits.
struct Attractor {
  CycleRecord cycle;
  bool parabolic = false;
  /// Capture disk radius (attracting) or petal radius (parabolic).
  double capture_radius = 1e-3;
  /// Parabolic only: f^{pq}(a + w) = a + w + A w^{n+1} + ..., per cycle point.
  std::vector<cplx> petal_coefficient;
  int petals = 0;
  int return_period = 1;  // p q

  /// Whether z has entered the capture region of this attractor.
  bool captures(cplx z) const noexcept;
};

Attractor make_attractor(const Polynomial& f, const CycleRecord& cycle, double capture_radius = 1e-3);

struct ClassifyOptions {
  int budget = 200;
  int max_cycle_period = 4;
  double capture_radius = 1e-3;
  int parabolic_budget_factor = 20;
  bool compute_potential = false;
  /// Cycles to use as attractors; searched with find_cycles when absent.
  std::optional<std::vector<CycleRecord>> cycles;
};

struct Raster {
  Grid grid;
  std::vector<Cell> cells;
  std::vector<Attractor> attractors;
  std::vector<double> potential;  // empty unless requested
  int budget = 0;
  double escape_radius = 0.0;

  const Cell& at(std::size_t idx) const { return cells[idx]; }
  /// Index of the attractor whose cycle contains 0, if any.
  std::optional<int> origin_attractor() const;
  std::vector<std::uint8_t> mask_of(CellKind kind) const;
  /// Cells that are not escaping.
  std::vector<std::uint8_t> bounded_mask() const;
  std::vector<std::uint8_t> basin_mask(int attractor) const;
};

/// max(3, 2 (1 + sum |a_k|)); beyond it |f(z)| >= 2|z|.
double escape_radius(const Polynomial& f);

Raster classify_grid(const Polynomial& f, const Box& box, int nx, int ny,
                     const ClassifyOptions& opts = {});

/// Green's function lim d^-n log+|f^n(z)|, 0 when z has not escaped within budget.
double green_function(const Polynomial& f, cplx z, int budget = 2000);

/// Escape iteration of z (first n with |f^n(z)| > R), or -1 within budget.
int escape_time(const Polynomial& f, cplx z, int budget, double radius);

}  // namespace fatou
