#include "fatou/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fatou/error.hpp"
#include "parallel.hpp"

namespace fatou {

namespace {

bool listed(const std::vector<cplx>& pts, cplx z) {
  return std::any_of(pts.begin(), pts.end(), [&](cplx p) { return std::abs(p - z) < 1e-9; });
}

double distance_cells(const Grid& grid, const Mask& mask, cplx z) {
  return distance_to_mask(grid, mask, z) / grid.cell_size();
}

bool in_mask(const Grid& grid, const Mask& mask, cplx z) {
  const auto cell = grid.cell_of(z);
  return cell && mask[*cell];
}

/// Cell index of f(centre) for every cell, -1 when it leaves the box.
std::vector<std::int64_t> image_cells(const Polynomial& f, const Grid& grid) {
  std::vector<std::int64_t> img(grid.size(), -1);
  detail::parallel_rows(grid.ny(), [&](int iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const std::size_t i = grid.index(ix, iy);
      if (const auto c = grid.cell_of(f(grid.center(i)))) img[i] = static_cast<std::int64_t>(*c);
    }
  });
  return img;
}

Mask or_masks(const Mask& a, const Mask& b) {
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

/// Whether some point whose orbit is captured by one of `own` attractors
/// lies within a cell of the parabolic point p. Components touching p do so
/// in horns along the repelling directions that are much thinner than a cell,
/// so the directions are walked outward from sub-cell distance until a cell
/// of the tree mask is reached.
bool parabolic_attached(const Polynomial& f, const Raster& raster, const Attractor& att, std::size_t j,
                        const Mask& tree, const std::vector<int>& own) {
  const Grid& grid = raster.grid;
  const cplx p = att.cycle.points[j];
  const int n = std::max(att.petals, 1);
  const cplx a = j < att.petal_coefficient.size() ? att.petal_coefficient[j] : cplx(1.0);
  if (a == cplx(0.0)) return false;
  const double radius = raster.escape_radius;
  auto captured = [&](cplx z) {
    for (int it = 0; it < 50000; ++it) {
      for (int k : own) {
        if (raster.attractors[static_cast<std::size_t>(k)].captures(z)) return true;
      }
      if (std::abs(z) > radius) return false;
      z = f(z);
    }
    return false;
  };
  const double s0 = std::min(1e-3, 0.5 * grid.cell_size());
  for (int k = 0; k < n; ++k) {
    // repelling directions: a w^n real positive
    const cplx u = std::polar(1.0, (std::arg(1.0 / a) + 2.0 * M_PI * k) / n);
    for (double s = s0; s < 64.0 * grid.cell_size(); s *= 1.1) {
      bool inside = false;
      for (double phi : {0.0, 0.25, -0.25, 0.5, -0.5}) {
        const cplx z = p + s * u * std::polar(1.0, phi * s / grid.cell_size());
        const auto cell = grid.cell_of(z);
        if (cell && tree[*cell]) return true;
        if (captured(z)) {
          inside = true;
          break;
        }
      }
      if (!inside) break;
    }
  }
  return false;
}

}  // namespace

BasinRef immediate_basin(const Polynomial& f, const Raster& raster) {
  if (std::abs(f.coefficient(1)) >= 1.0) throw Error(ErrorCode::NotAttracting, "|f'(0)| >= 1");
  const auto origin = raster.origin_attractor();
  if (!origin) throw Error(ErrorCode::NotAttracting, "no basin of 0 on the raster");
  const auto cell = raster.grid.cell_of(0.0);
  if (!cell) throw Error(ErrorCode::OutOfBox, "0 outside the raster box");
  const Mask basin = raster.basin_mask(*origin);
  const ComponentMap map = label_components(raster.grid, basin, 0);
  const int id = map.labels[*cell];
  if (id < 0) throw Error(ErrorCode::NotAttracting, "cell of 0 is not captured by its basin");
  return BasinRef{*origin, id, map.mask(id)};
}

FatouTree build_X0(const Polynomial& f, const Raster& raster, int level, const FatouTree* previous,
                   const TreeOptions& opts) {
  const Grid& grid = raster.grid;
  FatouTree tree{level, grid, {}, {}, {}, {}, {}, {}, false};
  if (level == 0) {
    tree.stages.push_back(immediate_basin(f, raster).mask);
    return tree;
  }
  if (!previous || previous->level != level - 1) {
    throw Error(ErrorCode::InvalidArgument, "level k needs the tree of level k-1");
  }
  tree.used_critical = previous->used_critical;
  tree.used_parabolic = previous->used_parabolic;
  const Mask& prev = previous->mask();
  const Mask interior = erode(grid, prev, 1);

  std::vector<cplx> boundary_critical;
  double nearest_critical = std::numeric_limits<double>::infinity();
  for (const auto& c : critical_points(f).points) {
    if (listed(tree.used_critical, c.z) || in_mask(grid, interior, c.z)) continue;
    const double dist = distance_cells(grid, prev, c.z);
    nearest_critical = std::min(nearest_critical, dist);
    if (dist <= opts.boundary_tol) boundary_critical.push_back(c.z);
  }

  // parabolic layers, added until no unused parabolic cycle touches the set
  Mask current = prev;
  std::vector<int> own;
  if (const auto origin = raster.origin_attractor()) own.push_back(*origin);
  for (std::size_t a = 0; a < raster.attractors.size(); ++a) {
    if (raster.attractors[a].parabolic && listed(tree.used_parabolic, raster.attractors[a].cycle.points.front())) {
      own.push_back(static_cast<int>(a));
    }
  }
  double nearest_parabolic = std::numeric_limits<double>::infinity();
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t a = 0; a < raster.attractors.size(); ++a) {
      const Attractor& att = raster.attractors[a];
      if (!att.parabolic || listed(tree.used_parabolic, att.cycle.points.front())) continue;
      double dist = std::numeric_limits<double>::infinity();
      bool attached = false;
      for (std::size_t j = 0; j < att.cycle.points.size(); ++j) {
        dist = std::min(dist, distance_cells(grid, current, att.cycle.points[j]));
        attached = attached || parabolic_attached(f, raster, att, j, current, own);
      }
      nearest_parabolic = std::min(nearest_parabolic, dist);
      if (dist > opts.boundary_tol && !attached) continue;
      own.push_back(static_cast<int>(a));
      const ComponentMap comps = label_components(grid, raster.basin_mask(static_cast<int>(a)), 0);
      Mask layer(grid.size(), 0);
      for (int id = 0; id < comps.count; ++id) {
        const Mask m = comps.mask(id);
        bool attached = false;
        for (cplx p : att.cycle.points) attached |= distance_cells(grid, m, p) <= opts.boundary_tol;
        if (attached) layer = or_masks(layer, m);
      }
      current = or_masks(current, layer);
      tree.used_parabolic.push_back(att.cycle.points.front());
      tree.layers.push_back(ParabolicLayer{att.cycle, std::move(layer)});
      grew = true;
    }
  }

  if (boundary_critical.empty() && tree.layers.empty()) {
    std::ostringstream os;
    os << "no unused critical point within " << opts.boundary_tol
       << " cells of the level " << level - 1 << " tree (nearest " << nearest_critical
       << " cells) and no parabolic boundary cycle (nearest " << nearest_parabolic << " cells)";
    throw Error(ErrorCode::NotInYk, os.str());
  }
  for (cplx c : boundary_critical) tree.used_critical.push_back(c);
  for (const auto& c : critical_points(f).points) {
    if (!listed(tree.used_critical, c.z) && in_mask(grid, current, c.z)) tree.used_critical.push_back(c.z);
  }
  tree.stages.push_back(std::move(current));
  return tree;
}

void grow_tree_level(const Polynomial& f, const Raster& raster, FatouTree& tree, int max_stages) {
  const Grid& grid = raster.grid;
  const auto img = image_cells(f, grid);
  // Preimages of the tree lie in the grand orbits of its own attractors, so
  // cells captured by any other attractor are never added.
  std::vector<std::uint8_t> own(raster.attractors.size(), 0);
  if (const auto origin = raster.origin_attractor()) own[static_cast<std::size_t>(*origin)] = 1;
  for (std::size_t a = 0; a < raster.attractors.size(); ++a) {
    if (raster.attractors[a].parabolic && listed(tree.used_parabolic, raster.attractors[a].cycle.points.front())) {
      own[a] = 1;
    }
  }
  auto eligible = [&](std::size_t i) {
    const Cell& c = raster.cells[i];
    if (c.kind == CellKind::escaping) return false;
    return c.kind != CellKind::basin || own[static_cast<std::size_t>(c.value)] != 0;
  };
  for (int stage = 0; stage < max_stages; ++stage) {
    const Mask& x = tree.stages.back();
    const Mask near = dilate(grid, x, 1);
    Mask pre(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const bool hit = eligible(i) && img[i] >= 0 &&
                       near[static_cast<std::size_t>(img[i])];
      pre[i] = x[i] || hit;
    }
    const ComponentMap comps = label_components(grid, pre, 0);
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(comps.count), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (x[i]) keep[static_cast<std::size_t>(comps.labels[i])] = 1;
    }
    Mask next(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      next[i] = comps.labels[i] >= 0 && keep[static_cast<std::size_t>(comps.labels[i])];
    }
    if (next == x) {
      tree.converged = true;
      break;
    }
    // record where each new piece attaches to the previous stage
    Mask fresh(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) fresh[i] = next[i] && !x[i];
    const ComponentMap added = label_components(grid, fresh, 0);
    std::vector<std::uint8_t> linked(static_cast<std::size_t>(added.count), 0);
    const int nx = grid.nx();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const int id = added.labels[i];
      if (id < 0 || linked[static_cast<std::size_t>(id)]) continue;
      const int ix = grid.ix(i);
      const int iy = grid.iy(i);
      const bool touches = (ix > 0 && x[i - 1]) || (ix + 1 < nx && x[i + 1]) ||
                           (iy > 0 && x[i - static_cast<std::size_t>(nx)]) ||
                           (iy + 1 < grid.ny() && x[i + static_cast<std::size_t>(nx)]);
      if (touches) {
        linked[static_cast<std::size_t>(id)] = 1;
        tree.adjacency.push_back(StageLink{static_cast<int>(tree.stages.size()), id, i});
      }
    }
    tree.stages.push_back(std::move(next));
  }
  const Mask& y = tree.mask();
  const Mask ring = dilate(grid, y, 1);
  tree.limit_mask.assign(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tree.limit_mask[i] = ring[i] && !y[i] && raster.cells[i].kind != CellKind::escaping;
  }
}

std::string_view to_string(Maximality m) {
  switch (m) {
    case Maximality::equal: return "equal";
    case Maximality::not_equal: return "not-equal";
    case Maximality::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(CriticalPlacement p) {
  switch (p) {
    case CriticalPlacement::inside: return "inside";
    case CriticalPlacement::boundary: return "boundary";
    case CriticalPlacement::outside: return "outside";
    case CriticalPlacement::escaping: return "escaping";
  }
  return "?";
}

TreeLevelReport tree_report(const Polynomial& f, const Raster& raster, int max_level, int max_stages,
                            const TreeOptions& opts) {
  const Grid& grid = raster.grid;
  const CriticalSet crit = critical_points(f);
  TreeLevelReport report;

  auto coverage = [&](const Mask& y) {
    std::vector<CriticalCoverage> out;
    int count_in = 0;
    for (const auto& c : crit.points) {
      CriticalCoverage cov{c.z, c.multiplicity, CriticalPlacement::outside, distance_cells(grid, y, c.z)};
      const auto cell = grid.cell_of(c.z);
      if (cell && y[*cell]) {
        cov.placement = CriticalPlacement::inside;
        cov.distance_cells = 0.0;
      } else if (cov.distance_cells <= opts.boundary_tol) {
        cov.placement = CriticalPlacement::boundary;
      } else if (!cell || raster.cells[*cell].kind == CellKind::escaping) {
        cov.placement = CriticalPlacement::escaping;
      }
      if (cov.placement == CriticalPlacement::inside || cov.placement == CriticalPlacement::boundary) {
        count_in += c.multiplicity;
      }
      out.push_back(cov);
    }
    report.critical_count.push_back(count_in);
    report.critical_coverage.push_back(std::move(out));
  };

  FatouTree t0 = build_X0(f, raster, 0, nullptr, opts);
  grow_tree_level(f, raster, t0, max_stages);
  report.n_k.push_back(0);
  coverage(t0.mask());
  report.trees.push_back(std::move(t0));
  report.stop_reason = "max_level reached";
  for (int k = 1; k <= max_level; ++k) {
    try {
      FatouTree t = build_X0(f, raster, k, &report.trees.back(), opts);
      grow_tree_level(f, raster, t, max_stages);
      report.n_k.push_back(t.parabolic_layer_count());
      coverage(t.mask());
      report.trees.push_back(std::move(t));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotInYk) throw;
      report.stop_reason = e.what();
      break;
    }
  }
  report.k_of_f = static_cast<int>(report.trees.size()) - 1;
  if (report.k_of_f > f.degree() - 2) {
    throw std::logic_error("k(f) = " + std::to_string(report.k_of_f) + " exceeds d - 2 = " +
                           std::to_string(f.degree() - 2));
  }

  const Mask& y = report.trees.back().mask();
  std::int64_t bounded = 0;
  std::int64_t outside = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (raster.cells[i].kind == CellKind::escaping) continue;
    ++bounded;
    outside += !y[i];
  }
  report.defect_fraction = bounded ? static_cast<double>(outside) / static_cast<double>(bounded) : 1.0;

  const auto& cov = report.critical_coverage.back();
  const bool all_in = std::all_of(cov.begin(), cov.end(), [](const CriticalCoverage& c) {
    return c.placement == CriticalPlacement::inside || c.placement == CriticalPlacement::boundary;
  });
  const bool one_out = std::any_of(cov.begin(), cov.end(), [](const CriticalCoverage& c) {
    return c.placement == CriticalPlacement::outside;
  });
  if (all_in && report.defect_fraction < opts.defect_tol) {
    report.maximality = Maximality::equal;
  } else if (one_out) {
    report.maximality = Maximality::not_equal;
  } else {
    report.maximality = Maximality::inconclusive;
  }
  return report;
}

std::vector<double> limb_diameters(const Polynomial& f, const Raster& raster) {
  const Mask basin = immediate_basin(f, raster).mask;
  Mask rest(raster.grid.size(), 0);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    rest[i] = raster.cells[i].kind != CellKind::escaping && !basin[i];
  }
  const ComponentMap limbs = label_components(raster.grid, rest, 0);
  std::vector<std::vector<cplx>> pts(static_cast<std::size_t>(limbs.count));
  for (std::size_t i : boundary_cells(raster.grid, rest)) {
    pts[static_cast<std::size_t>(limbs.labels[i])].push_back(raster.grid.center(i));
  }
  std::vector<double> out;
  out.reserve(pts.size());
  for (auto& p : pts) out.push_back(point_set_diameter(std::move(p)));
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

}  // namespace fatou
