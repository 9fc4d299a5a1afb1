#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fatou/components.hpp"
#include "fatou/cycles.hpp"
#include "fatou/raster.hpp"
#include "fatou/roots.hpp"

namespace fatou {

struct TreeOptions {
  /// Distance (cells) at which a critical or parabolic point counts as
  /// lying on the boundary of a tree.
  double boundary_tol = 2.0;
  double defect_tol = 0.02;
  int max_stages = 200;
};

/// U_f(0) on a raster: the basin-of-0 component containing the cell of 0.
struct BasinRef {
  int attractor = -1;
  int component = -1;
  Mask mask;
};

/// Throws NotAttracting when |f'(0)| >= 1 or the raster has no basin of 0,
/// OutOfBox when 0 lies outside the raster.
BasinRef immediate_basin(const Polynomial& f, const Raster& raster);

struct ParabolicLayer {
  CycleRecord cycle;
  Mask mask;  // periodic basin components attached at the cycle
};

/// Which new stage component touches the previous stage, and where.
struct StageLink {
  int stage = 0;
  int component = 0;
  std::size_t touch_cell = 0;
};

struct FatouTree {
  int level = 0;
  Grid grid;
  std::vector<Mask> stages;  // X_0, X_1, ..., nested
  std::vector<StageLink> adjacency;
  Mask limit_mask;
  std::vector<ParabolicLayer> layers;  // n^k = layers.size()
  /// Critical points and parabolic cycles consumed to reach this level.
  std::vector<cplx> used_critical;
  std::vector<cplx> used_parabolic;
  bool converged = false;  // reached a cell-wise fixed point

  const Mask& mask() const { return stages.back(); }
  int parabolic_layer_count() const { return static_cast<int>(layers.size()); }
};

/// Seed X_0^k.  Level 0 is the closure of U_f(0); level k >= 1 needs the
/// level k-1 tree and throws NotInYk (with the measured distances in the
/// message) unless an unused critical point or parabolic cycle lies on its
/// boundary.
FatouTree build_X0(const Polynomial& f, const Raster& raster, int level, const FatouTree* previous,
                   const TreeOptions& opts = {});

/// X_{n+1} = components of f^-1(X_n) meeting X_n, until a fixed point or
/// max_stages.  A cell is in f^-1(X) when it is not escaping and f of its
/// centre falls in X dilated by one cell.
void grow_tree_level(const Polynomial& f, const Raster& raster, FatouTree& tree, int max_stages);

enum class Maximality { equal, not_equal, inconclusive };
std::string_view to_string(Maximality m);

enum class CriticalPlacement { inside, boundary, outside, escaping };
std::string_view to_string(CriticalPlacement p);

struct CriticalCoverage {
  cplx point;
  int multiplicity = 1;
  CriticalPlacement placement = CriticalPlacement::outside;
  double distance_cells = 0.0;  // to the tree mask
};

struct TreeLevelReport {
  int k_of_f = 0;
  std::vector<int> n_k;  // parabolic layer counts per level
  std::vector<std::vector<CriticalCoverage>> critical_coverage;  // per level
  std::vector<int> critical_count;  // critical points (with multiplicity) inside Y^k
  Maximality maximality = Maximality::inconclusive;
  double defect_fraction = 1.0;
  std::string stop_reason;
  std::vector<FatouTree> trees;
};

/// Runs the level sequence up to max_level.  Violating k(f) <= d - 2 throws
/// std::logic_error.
TreeLevelReport tree_report(const Polynomial& f, const Raster& raster, int max_level, int max_stages,
                            const TreeOptions& opts = {});

/// Diameters, largest first, of the components of the non-escaping cells
/// outside U_f(0): the raster stand-in for the limbs of K attached to U_f(0).
std::vector<double> limb_diameters(const Polynomial& f, const Raster& raster);

}  // namespace fatou
