#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fatou/raster.hpp"

namespace fatou {

using Mask = std::vector<std::uint8_t>;

/// 4-connected components of a cell predicate.
struct ComponentMap {
  static constexpr std::int32_t kNone = -1;

  Grid grid;
  std::vector<std::int32_t> labels;  // kNone where the predicate fails
  int count = 0;
  std::vector<std::int64_t> sizes;
  /// Symmetric touching relation: components whose cells come within
  /// `gap` cells (Chebyshev) of each other.
  std::vector<std::vector<int>> adjacency;

  Mask mask(int id) const;
};

ComponentMap label_components(const Grid& grid, std::span<const std::uint8_t> mask, int gap = 2);

/// Component id at z, ComponentMap::kNone if the cell fails the predicate.
/// Throws OutOfBox.
int component_of(const ComponentMap& map, cplx z);

struct RegionMetrics {
  double area = 0.0;
  double diameter = 0.0;
  std::int64_t boundary_cells = 0;
};

/// Throws UnknownComponent for an invalid id.
RegionMetrics region_metrics(const ComponentMap& map, int id);

/// Metrics of an arbitrary mask (treated as one region).
RegionMetrics mask_metrics(const Grid& grid, std::span<const std::uint8_t> mask);

/// Cells of the mask with a 4-neighbour outside it (or on the grid edge).
std::vector<std::size_t> boundary_cells(const Grid& grid, std::span<const std::uint8_t> mask);

/// Chebyshev dilation / erosion by r cells.
Mask dilate(const Grid& grid, std::span<const std::uint8_t> mask, int r = 1);
Mask erode(const Grid& grid, std::span<const std::uint8_t> mask, int r = 1);

/// Max pairwise distance among points (convex hull + exhaustive hull pairs).
double point_set_diameter(std::vector<cplx> pts);

/// Distance (plane units) from z to the nearest set cell centre, +inf if empty.
double distance_to_mask(const Grid& grid, std::span<const std::uint8_t> mask, cplx z);

std::int64_t count(std::span<const std::uint8_t> mask);

}  // namespace fatou
