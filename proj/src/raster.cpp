#include "fatou/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fatou/error.hpp"
#include "fatou/roots.hpp"
#include "parallel.hpp"

namespace fatou {

Grid::Grid(const Box& box, int nx, int ny) : box_(box), nx_(nx), ny_(ny) {
  if (nx < 16 || ny < 16) throw Error(ErrorCode::InvalidArgument, "raster must be at least 16x16");
  if (!(box.width > 0.0) || !(box.height > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "box must have positive size");
  }
}

double Grid::cell_size() const noexcept { return std::max(cell_width(), cell_height()); }

cplx Grid::center(int ix, int iy) const noexcept {
  return {box_.left() + (ix + 0.5) * cell_width(), box_.top() - (iy + 0.5) * cell_height()};
}

std::pair<double, double> Grid::to_cell_coords(cplx z) const noexcept {
  return {(z.real() - box_.left()) / cell_width(), (box_.top() - z.imag()) / cell_height()};
}

std::optional<std::size_t> Grid::cell_of(cplx z) const noexcept {
  auto [x, y] = to_cell_coords(z);
  if (!(x >= 0.0 && y >= 0.0 && x < nx_ && y < ny_)) return std::nullopt;
  return index(static_cast<int>(x), static_cast<int>(y));
}

bool Attractor::captures(cplx z) const noexcept {
  for (std::size_t i = 0; i < cycle.points.size(); ++i) {
    const cplx w = z - cycle.points[i];
    if (std::abs(w) >= capture_radius) continue;
    if (!parabolic) return true;
    cplx wn = 1.0;
    for (int k = 0; k < petals; ++k) wn *= w;
    const cplx s = -petal_coefficient[i] * wn;
    // within 60 degrees of an attracting direction
    if (s.real() > 0.5 * std::abs(s)) return true;
  }
  return false;
}

Attractor make_attractor(const Polynomial& f, const CycleRecord& cycle, double capture_radius) {
  Attractor a;
  a.cycle = cycle;
  a.capture_radius = capture_radius;
  if (cycle.cls != CycleClass::parabolic) return a;

  a.parabolic = true;
  a.return_period = cycle.period * std::max(cycle.rotation_denominator, 1);
  const int rp = a.return_period;
  auto h = [&](cplx z) { auto [w, dw] = f.iterate_with_derivative(z, rp); return std::make_pair(w - z, dw - 1.0); };
  double radius = std::numeric_limits<double>::infinity();
  for (const cplx& p : cycle.points) {
    double r = 1e-2;
    for (; r > 1e-8; r *= 0.5) {
      const double n1 = count_zeros(h, p, r, 128);
      const double n2 = count_zeros(h, p, 2.0 * r, 128);
      if (std::abs(n1 - std::round(n1)) < 0.01 && std::lround(n1) == std::lround(n2) && std::lround(n1) >= 2) break;
    }
    const auto c = taylor_coefficients([&](cplx z) { return f.iterate(z, rp) - z; }, p, r, 8);
    int k = 2;
    while (k < 7 && std::abs(c[static_cast<std::size_t>(k)]) * std::pow(r, k) < 1e-12) ++k;
    a.petals = k - 1;
    const cplx A = c[static_cast<std::size_t>(k)];
    a.petal_coefficient.push_back(A);
    const double rc = std::pow(1.0 / (10.0 * a.petals * std::max(std::abs(A), 1e-12)), 1.0 / a.petals);
    radius = std::min({radius, rc, r});
  }
  a.capture_radius = std::min(radius, 0.1);
  return a;
}

std::optional<int> Raster::origin_attractor() const {
  for (std::size_t i = 0; i < attractors.size(); ++i) {
    for (const cplx& p : attractors[i].cycle.points) {
      if (std::abs(p) < 1e-12) return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

std::vector<std::uint8_t> Raster::mask_of(CellKind kind) const {
  std::vector<std::uint8_t> m(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) m[i] = cells[i].kind == kind;
  return m;
}

std::vector<std::uint8_t> Raster::bounded_mask() const {
  std::vector<std::uint8_t> m(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) m[i] = cells[i].kind != CellKind::escaping;
  return m;
}

std::vector<std::uint8_t> Raster::basin_mask(int attractor) const {
  std::vector<std::uint8_t> m(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    m[i] = cells[i].kind == CellKind::basin && cells[i].value == attractor;
  }
  return m;
}

double escape_radius(const Polynomial& f) {
  return std::max(3.0, 2.0 * (1.0 + f.free_coefficient_norm()));
}

int escape_time(const Polynomial& f, cplx z, int budget, double radius) {
  for (int n = 0; n <= budget; ++n) {
    if (std::norm(z) > radius * radius) return n;
    z = f(z);
  }
  return -1;
}

double green_function(const Polynomial& f, cplx z, int budget) {
  const int d = f.degree();
  // keep |f(z)| representable after the last step
  const double bailout = std::min(1e16, std::pow(10.0, 250.0 / d));
  const double r0 = escape_radius(f);
  double scale = 1.0;
  bool outside = false;
  for (int n = 0; n <= budget; ++n) {
    const double m = std::abs(z);
    if (m > r0) outside = true;
    if (outside && m > bailout) {
      const double tail = std::log(std::abs(f.ratio_to_leading(z))) / d;
      return scale * (std::log(m) + tail);
    }
    z = f(z);
    scale /= d;
  }
  return 0.0;
}

Raster classify_grid(const Polynomial& f, const Box& box, int nx, int ny, const ClassifyOptions& opts) {
  if (opts.budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be >= 1");
  Raster r{Grid(box, nx, ny), {}, {}, {}, opts.budget, escape_radius(f)};

  std::vector<CycleRecord> cycles;
  if (opts.cycles) {
    cycles = *opts.cycles;
  } else {
    const double half = 1.0 + f.free_coefficient_norm();
    CycleSearchOptions co;
    co.compute_resit = false;
    for (const auto& c : critical_points(f).points) co.seeds.push_back(f.iterate(c.z, 400));
    cycles = find_cycles(f, opts.max_cycle_period, Box::square(0.0, 2.0 * half), co);
  }
  for (const auto& c : cycles) {
    if (c.cls == CycleClass::attracting || c.cls == CycleClass::superattracting ||
        c.cls == CycleClass::parabolic) {
      r.attractors.push_back(make_attractor(f, c, opts.capture_radius));
    }
  }
  const bool any_parabolic = std::any_of(r.attractors.begin(), r.attractors.end(),
                                         [](const Attractor& a) { return a.parabolic; });
  const int budget = any_parabolic ? opts.budget * opts.parabolic_budget_factor : opts.budget;
  const double R2 = r.escape_radius * r.escape_radius;

  r.cells.resize(r.grid.size());
  if (opts.compute_potential) r.potential.assign(r.grid.size(), 0.0);
  detail::parallel_rows(ny, [&](int iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t idx = r.grid.index(ix, iy);
      cplx z = r.grid.center(ix, iy);
      Cell cell{CellKind::bounded, 0};
      for (int n = 0; n <= budget; ++n) {
        if (std::norm(z) > R2) {
          cell = {CellKind::escaping, n};
          break;
        }
        bool captured = false;
        for (std::size_t a = 0; a < r.attractors.size(); ++a) {
          if (r.attractors[a].captures(z)) {
            cell = {CellKind::basin, static_cast<std::int32_t>(a)};
            captured = true;
            break;
          }
        }
        if (captured) break;
        z = f(z);
      }
      r.cells[idx] = cell;
      if (opts.compute_potential && cell.kind == CellKind::escaping) {
        r.potential[idx] = green_function(f, r.grid.center(ix, iy), opts.budget + 64);
      }
    }
  });
  return r;
}

}  // namespace fatou
