#include "fatou/components.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fatou/error.hpp"

namespace fatou {

namespace {

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      auto& p = parent[static_cast<std::size_t>(i)];
      p = parent[static_cast<std::size_t>(p)];
      i = p;
    }
    return i;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

}  // namespace

Mask ComponentMap::mask(int id) const {
  Mask m(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) m[i] = labels[i] == id;
  return m;
}

std::int64_t count(std::span<const std::uint8_t> mask) {
  return std::count_if(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; });
}

ComponentMap label_components(const Grid& grid, std::span<const std::uint8_t> mask, int gap) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  UnionFind uf(grid.size());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t i = grid.index(ix, iy);
      if (!mask[i]) continue;
      if (ix + 1 < nx && mask[i + 1]) uf.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1));
      if (iy + 1 < ny && mask[i + static_cast<std::size_t>(nx)]) {
        uf.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + static_cast<std::size_t>(nx)));
      }
    }
  }
  ComponentMap map{grid, std::vector<std::int32_t>(grid.size(), ComponentMap::kNone), 0, {}, {}};
  std::vector<std::int32_t> root_id(grid.size(), ComponentMap::kNone);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask[i]) continue;
    const auto r = static_cast<std::size_t>(uf.find(static_cast<std::int32_t>(i)));
    if (root_id[r] == ComponentMap::kNone) {
      root_id[r] = map.count++;
      map.sizes.push_back(0);
    }
    map.labels[i] = root_id[r];
    ++map.sizes[static_cast<std::size_t>(root_id[r])];
  }

  std::set<std::pair<int, int>> touching;
  if (gap > 0) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int a = map.labels[grid.index(ix, iy)];
        if (a < 0) continue;
        for (int dy = 0; dy <= gap; ++dy) {
          for (int dx = -gap; dx <= gap; ++dx) {
            if (dy == 0 && dx <= 0) continue;
            const int jx = ix + dx;
            const int jy = iy + dy;
            if (jx < 0 || jx >= nx || jy >= ny) continue;
            const int b = map.labels[grid.index(jx, jy)];
            if (b >= 0 && b != a) touching.emplace(std::min(a, b), std::max(a, b));
          }
        }
      }
    }
  }
  map.adjacency.assign(static_cast<std::size_t>(map.count), {});
  for (auto [a, b] : touching) {
    map.adjacency[static_cast<std::size_t>(a)].push_back(b);
    map.adjacency[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& adj : map.adjacency) std::sort(adj.begin(), adj.end());
  return map;
}

int component_of(const ComponentMap& map, cplx z) {
  const auto cell = map.grid.cell_of(z);
  if (!cell) throw Error(ErrorCode::OutOfBox, "point outside raster box");
  return map.labels[*cell];
}

std::vector<std::size_t> boundary_cells(const Grid& grid, std::span<const std::uint8_t> mask) {
  std::vector<std::size_t> out;
  const int nx = grid.nx();
  const int ny = grid.ny();
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t i = grid.index(ix, iy);
      if (!mask[i]) continue;
      const bool edge = ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1;
      if (edge || !mask[i - 1] || !mask[i + 1] || !mask[i - static_cast<std::size_t>(nx)] ||
          !mask[i + static_cast<std::size_t>(nx)]) {
        out.push_back(i);
      }
    }
  }
  return out;
}

double point_set_diameter(std::vector<cplx> pts) {
  if (pts.size() < 2) return 0.0;
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, std::norm(hull[i] - hull[j]));
  }
  return std::sqrt(best);
}

RegionMetrics mask_metrics(const Grid& grid, std::span<const std::uint8_t> mask) {
  RegionMetrics m;
  m.area = static_cast<double>(count(mask)) * grid.cell_area();
  const auto cells = boundary_cells(grid, mask);
  m.boundary_cells = static_cast<std::int64_t>(cells.size());
  std::vector<cplx> pts;
  pts.reserve(cells.size());
  for (auto i : cells) pts.push_back(grid.center(i));
  m.diameter = point_set_diameter(std::move(pts));
  return m;
}

RegionMetrics region_metrics(const ComponentMap& map, int id) {
  if (id < 0 || id >= map.count) throw Error(ErrorCode::UnknownComponent, "component " + std::to_string(id));
  return mask_metrics(map.grid, map.mask(id));
}

Mask dilate(const Grid& grid, std::span<const std::uint8_t> mask, int r) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  // separable: rows then columns
  Mask tmp(mask.size(), 0);
  for (int iy = 0; iy < ny; ++iy) {
    int last = -1'000'000;
    for (int ix = 0; ix < nx + r; ++ix) {
      if (ix < nx && mask[grid.index(ix, iy)]) last = ix;
      const int t = ix - r;
      if (t >= 0 && ix - last <= 2 * r) tmp[grid.index(t, iy)] = 1;
    }
  }
  Mask out(mask.size(), 0);
  for (int ix = 0; ix < nx; ++ix) {
    int last = -1'000'000;
    for (int iy = 0; iy < ny + r; ++iy) {
      if (iy < ny && tmp[grid.index(ix, iy)]) last = iy;
      const int t = iy - r;
      if (t >= 0 && iy - last <= 2 * r) out[grid.index(ix, t)] = 1;
    }
  }
  return out;
}

Mask erode(const Grid& grid, std::span<const std::uint8_t> mask, int r) {
  Mask inv(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) inv[i] = !mask[i];
  Mask grown = dilate(grid, inv, r);
  const int nx = grid.nx();
  const int ny = grid.ny();
  Mask out(mask.size());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t i = grid.index(ix, iy);
      const bool near_edge = ix < r || iy < r || ix >= nx - r || iy >= ny - r;
      out[i] = mask[i] && !grown[i] && !near_edge;
    }
  }
  return out;
}

double distance_to_mask(const Grid& grid, std::span<const std::uint8_t> mask, cplx z) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) best = std::min(best, std::norm(grid.center(i) - z));
  }
  return std::sqrt(best);
}

}  // namespace fatou
