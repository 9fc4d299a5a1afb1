#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fatou/components.hpp"
#include "fatou/cycles.hpp"
#include "fatou/raster.hpp"
#include "fatou/rays.hpp"
#include "fatou/roots.hpp"

namespace fatou {

struct PuzzleOptions {
  /// Distance (cells) from a cycle point to U_f(0) accepted as "on the boundary".
  double cycle_tol = 2.0;
  double landing_tol = 1e-6;
  int max_cycle_period = 4;
  /// Level of the inner curve in the linearising coordinate of 0 (log|phi|
  /// or the Boettcher log-modulus); chosen automatically when absent.
  std::optional<double> inner_level;
};

/// Exact polyline segments of the graph, bucketed by the cells they cross.
struct SegmentIndex {
  std::vector<std::pair<cplx, cplx>> segments;
  std::unordered_map<std::size_t, std::vector<int>> by_cell;

  /// Whether the segment [a, b] meets any indexed segment (touching counts).
  bool crosses(const Grid& grid, cplx a, cplx b) const;
};

struct PuzzleGraph {
  Grid grid{Box{}, 16, 16};
  double outer_level = 0.5;
  double inner_level = 0.0;
  bool superattracting = false;
  RayPath inner_curve;  // boundary cells of Omega_0, ordered by argument
  CycleRecord cycle;
  std::vector<RayPath> external_tails;
  std::vector<RayPath> internal_rays;  // gamma_k, starting at the cycle point z_k
  std::vector<RayPath> parabolic_cuts;  // unused: parabolic layers are not cut

  Mask omega;  // cells of Omega, cut cells included
  Mask omega0;
  Mask cut;
  std::vector<CellKind> kinds;  // raster classification, for boundary typing
  std::vector<std::int32_t> depth0;  // depth-0 piece, -1 off Omega or on a cut
  int depth0_count = 0;
  std::shared_ptr<const SegmentIndex> segments;
  std::vector<MultipleRoot> critical;
};

/// Throws NotAttracting, NoBoundaryCycle, NoLandingRays.
PuzzleGraph build_graph(const Polynomial& f, const Raster& raster, double outer_level,
                        int cycle_period_hint, const PuzzleOptions& opts = {});

/// Depth-0 piece of the point z, resolving points inside cut cells by which
/// side of the exact polylines they lie on.
inline constexpr std::int32_t kOutsideOmega = -1;
inline constexpr std::int32_t kOnGraph = -2;
std::int32_t exact_depth0_label(const PuzzleGraph& g, cplx z);

struct PuzzlePiece {
  int depth = 0;
  int id = 0;
  int parent = -1;  // depth-(n-1) piece
  std::uint64_t itinerary = 0;
  std::int64_t cells = 0;
  double diameter = 0.0;
  cplx sample{};  // a cell centre of the piece
  std::vector<cplx> contains_critical;
  int critical_multiplicity = 0;
  /// deg(f|P) = 1 + critical multiplicity (meaningful for depth >= 1).
  int degree() const { return 1 + critical_multiplicity; }
  std::vector<cplx> marked_boundary_points;
  bool touches_basin = false;
  bool touches_escaping = false;
};

/// A piece containing a given point.  id < 0 marks a piece below raster
/// resolution, identified by its itinerary and a reference point only.
struct PieceRef {
  int depth = 0;
  int id = -1;
  std::uint64_t itinerary = 0;
  cplx point{};
  double diameter = 0.0;
  bool resolved() const { return id >= 0; }
};

struct Nest {
  cplx target{};
  std::vector<PieceRef> pieces;  // depth 0, 1, ...
  std::vector<int> degree_sequence;  // deg(f^n | P_n)
  bool critical_nest = false;
  bool shrinking = false;  // some piece below 3 cells
  bool finite = false;     // the orbit left Omega before max_depth
};

struct FirstEntry {
  int r = 0;
  int degree = 1;
};

struct DepthStats {
  int depth = 0;
  int pieces = 0;
  std::int64_t cells = 0;
  int refinement_violations = 0;  // pieces meeting more than one parent
  double markov_defect = 0.0;     // image cells outside the parent image's dilation
  int degree_sum = 0;             // sum of deg(f|P) over the pieces
};

/// Depth rasters 0..max_depth of one graph.  Cells are labelled by the
/// itinerary of their centre through the depth-0 pieces; a depth-n piece is a
/// 4-connected set of cells with one itinerary.
class PuzzleSet {
 public:
  /// Throws DepthBudget when one depth loses more than depth_guard of the
  /// surviving cells to graph preimages.
  PuzzleSet(const Polynomial& f, const PuzzleGraph& graph, int max_depth, double depth_guard = 0.5);

  int max_depth() const { return static_cast<int>(labels_.size()) - 1; }
  const PuzzleGraph& graph() const { return *graph_; }
  const std::vector<PuzzlePiece>& pieces(int depth) const;
  std::int32_t label(int depth, std::size_t cell) const { return labels_.at(static_cast<std::size_t>(depth))[cell]; }
  const DepthStats& stats(int depth) const { return stats_.at(static_cast<std::size_t>(depth)); }

  /// Piece of depth n containing z; nullopt when the orbit leaves Omega by
  /// then.  Throws OnGraph.
  std::optional<PieceRef> locate(cplx z, int depth) const;
  bool contains(const PieceRef& piece, cplx z) const;
  /// deg(f|P) for the piece of depth >= 1.
  int local_degree(const PieceRef& piece) const;

  Nest nest(cplx z, int max_depth) const;
  /// Throws InsufficientDepth when the nest is shorter than the target depth.
  std::optional<FirstEntry> first_entry(const Nest& nest, const PieceRef& target) const;

 private:
  std::optional<std::vector<std::int32_t>> itinerary(cplx z, int depth) const;
  std::optional<PieceRef> locate_in(cplx z, int depth, const PieceRef* parent) const;
  bool same_piece(const PieceRef& a, const PieceRef& b) const;

  Polynomial f_;
  std::shared_ptr<const PuzzleGraph> graph_;
  std::vector<std::vector<std::int32_t>> labels_;
  std::vector<std::vector<std::optional<PieceRef>>> critical_refs_;  // [depth][critical point]
  std::vector<std::vector<PuzzlePiece>> pieces_;
  std::vector<DepthStats> stats_;
};

std::vector<PuzzlePiece> pieces_at_depth(const Polynomial& f, const PuzzleGraph& graph, int depth);
Nest nest_of_point(const Polynomial& f, const PuzzleGraph& graph, cplx z, int max_depth);
std::optional<FirstEntry> first_entry_time(const PuzzleSet& set, const Nest& nest, const PieceRef& target);

struct BoundedDegreeEvidence {
  bool witnessed = false;
  int bound = 0;
  std::vector<int> depths;
};

/// Witnessed when the degree sequence ends in a run of at least five equal
/// values (the sequence is nondecreasing, so this is the plateau proxy).
BoundedDegreeEvidence bounded_degree_evidence(const Nest& nest);

/// Points of J(f): 30 random inverse branches applied to a repelling fixed
/// point.  Deterministic for a given seed.
std::vector<cplx> julia_samples(const Polynomial& f, int count, std::uint64_t seed);

/// Elevator evidence: bounded degree plus first entries into one target found
/// at three or more depths.  Never a proof.
struct ElevatorEvidence {
  bool observed = false;
  std::vector<std::pair<int, FirstEntry>> entries;  // (k, entry)
};
ElevatorEvidence elevator_evidence(const PuzzleSet& set, const Nest& nest);

/// max / min distance from x to the boundary of the region, measured to the
/// midpoints of the edges between region cells and outside cells.
/// Throws NotInterior.
double shape_of(const Grid& grid, std::span<const std::uint8_t> mask, cplx x);
double shape_of(const ComponentMap& map, int id, cplx x);

/// Supercover traversal: every cell the segment passes through.
void supercover(const Grid& grid, cplx a, cplx b, const std::function<void(std::size_t)>& visit);

}  // namespace fatou
