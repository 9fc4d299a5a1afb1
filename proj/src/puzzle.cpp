#include "fatou/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fatou/angle.hpp"
#include "fatou/error.hpp"
#include "fatou/roots.hpp"
#include "fatou/tree.hpp"

namespace fatou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t h, std::int32_t label) {
  // splitmix64 over the running hash and the next label
  std::uint64_t x = h ^ (static_cast<std::uint64_t>(label + 1) * 0x9E3779B97F4A7C15ULL);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kSeed = 0x2545F4914F6CDD1DULL;

/// Linearising log-modulus at 0: log|phi| for the Koenigs map, the Boettcher
/// log-modulus when 0 is superattracting.  Both satisfy h(f(z)) = h(z) + log|lambda|
/// or k h(z) respectively.
class InnerModulus {
 public:
  explicit InnerModulus(const Polynomial& f) : f_(f) {
    const cplx a1 = f.coefficient(1);
    super_ = std::abs(a1) < 1e-14;
    if (super_) {
      k_ = 2;
      while (k_ < f.degree() && std::abs(f.coefficient(k_)) < 1e-14) ++k_;
      log_ak_ = std::log(std::abs(f.coefficient(k_)));
    } else {
      log_lambda_ = std::log(std::abs(a1));
    }
  }

  bool superattracting() const { return super_; }
  int local_degree() const { return k_; }
  /// h(f(z)) - h(z) for Koenigs; unused for Boettcher.
  double log_lambda() const { return log_lambda_; }

  std::optional<double> operator()(cplx z) const {
    if (z == cplx(0.0)) return -kInf;
    if (!super_) {
      const auto k = koenigs(f_, z, 4000);
      if (!k) return std::nullopt;
      return std::log(std::abs(k->first));
    }
    cplx w = z;
    double scale = 1.0;
    for (int n = 0; n < 200; ++n) {
      if (std::abs(w) < 1e-4) {
        if (w == cplx(0.0)) return -kInf;
        return scale * (std::log(std::abs(w)) + log_ak_ / (k_ - 1));
      }
      w = f_(w);
      if (!std::isfinite(std::abs(w)) || std::abs(w) > 1e6) return std::nullopt;
      scale /= k_;
    }
    return std::nullopt;
  }

 private:
  Polynomial f_;
  bool super_ = false;
  int k_ = 1;
  double log_ak_ = 0.0;
  double log_lambda_ = 0.0;
};

bool in_mask(const Grid& grid, const Mask& mask, cplx z) {
  const auto c = grid.cell_of(z);
  return c && mask[*c];
}

/// Samples s -> curve(s) on [0, 1] so that consecutive points are at most
/// `gap` apart (bisection, bounded depth).  The result runs from s = 0 to 1.
std::vector<cplx> adaptive_curve(const std::function<std::optional<cplx>(double)>& curve, double gap,
                                 int base = 64, int max_depth = 14) {
  std::vector<cplx> out;
  std::function<void(double, cplx, double, cplx, int)> fill = [&](double s0, cplx z0, double s1, cplx z1,
                                                                   int depth) {
    if (std::abs(z1 - z0) <= gap || depth >= max_depth) {
      out.push_back(z1);
      return;
    }
    const double sm = 0.5 * (s0 + s1);
    const auto zm = curve(sm);
    if (!zm) {
      out.push_back(z1);
      return;
    }
    fill(s0, z0, sm, *zm, depth + 1);
    fill(sm, *zm, s1, z1, depth + 1);
  };
  std::vector<std::pair<double, cplx>> coarse;
  for (int i = 0; i <= base; ++i) {
    const double s = static_cast<double>(i) / base;
    if (const auto z = curve(s)) coarse.emplace_back(s, *z);
  }
  if (coarse.empty()) return out;
  out.push_back(coarse.front().second);
  for (std::size_t i = 1; i < coarse.size(); ++i) {
    fill(coarse[i - 1].first, coarse[i - 1].second, coarse[i].first, coarse[i].second, 0);
  }
  return out;
}

/// Newton on f^p(w) = target from guess.
std::optional<cplx> inverse_branch(const Polynomial& f, int p, cplx target, cplx guess) {
  cplx w = guess;
  for (int it = 0; it < 60; ++it) {
    const auto [v, dv] = f.iterate_with_derivative(w, p);
    if (dv == cplx(0.0) || !std::isfinite(std::abs(v))) return std::nullopt;
    const cplx step = (v - target) / dv;
    w -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) return w;
  }
  if (std::abs(f.iterate(w, p) - target) < 1e-10 * std::max(1.0, std::abs(target))) return w;
  return std::nullopt;
}

struct ArcContext {
  const Polynomial& f;
  const Grid& grid;
  const Mask& basin;
  const Mask& omega0;
  const InnerModulus& h;
  double inner_level;
};

bool inside_omega0(const ArcContext& ctx, cplx z) {
  if (!in_mask(ctx.grid, ctx.omega0, z)) return false;
  const auto v = ctx.h(z);
  return v && *v < ctx.inner_level;
}

/// Cuts a polyline starting at a cycle point at its first point inside
/// Omega_0 (kept).  Returns false when it never enters.
bool truncate_at_omega0(const ArcContext& ctx, std::vector<cplx>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside_omega0(ctx, pts[i])) {
      pts.resize(i + 1);
      return true;
    }
  }
  return false;
}

/// An arc in U_f(0) from z0 into Omega_0, invariant under f^p in the sense
/// f^p(arc) = arc + a piece inside Omega_0.  Built from a short segment
/// sigma = [y, g(y)] (g the inverse branch of f^p fixing z0): the arc is the
/// union of g^j(sigma), j >= 0, and the forward images f^{pm}(sigma).
std::optional<std::vector<cplx>> pullback_arc(const ArcContext& ctx, cplx z0, int p, cplx mu) {
  const double cell = ctx.grid.cell_size();
  auto in_basin = [&](cplx z) { return in_mask(ctx.grid, ctx.basin, z); };

  for (double delta = std::max(0.05 * std::abs(z0), 8.0 * cell); delta >= 4.0 * cell; delta *= 0.5) {
    // deepest direction into U_f(0) on the circle of radius delta
    constexpr int kSamples = 720;
    std::vector<bool> inside(kSamples);
    for (int i = 0; i < kSamples; ++i) inside[static_cast<std::size_t>(i)] = in_basin(z0 + std::polar(delta, 2.0 * M_PI * i / kSamples));
    int best_len = 0;
    int best_mid = -1;
    for (int start = 0; start < kSamples; ++start) {
      if (!inside[static_cast<std::size_t>(start)] || inside[static_cast<std::size_t>((start + kSamples - 1) % kSamples)]) continue;
      int len = 0;
      while (len < kSamples && inside[static_cast<std::size_t>((start + len) % kSamples)]) ++len;
      if (len > best_len) {
        best_len = len;
        best_mid = (start + len / 2) % kSamples;
      }
    }
    if (best_mid < 0) continue;
    const cplx y = z0 + std::polar(delta, 2.0 * M_PI * best_mid / kSamples);
    const auto gy = inverse_branch(ctx.f, p, y, z0 + (y - z0) / mu);
    if (!gy || std::abs(*gy - z0) >= delta) continue;
    auto sigma = [&](double s) { return y + s * (*gy - y); };
    bool ok = true;
    for (int i = 0; i <= 32 && ok; ++i) ok = in_basin(sigma(i / 32.0));
    if (!ok) continue;

    // inward: g^j(sigma) traversed from g^{j+1}(y) to g^j(y), listed innermost first
    std::vector<std::vector<cplx>> inward;
    std::vector<cplx> level(33);
    for (int i = 0; i <= 32; ++i) level[static_cast<std::size_t>(i)] = sigma(1.0 - i / 32.0);  // g(y) -> y
    for (int j = 1; j < 400; ++j) {
      std::vector<cplx> next(level.size());
      bool fine = true;
      for (std::size_t i = 0; i < level.size() && fine; ++i) {
        const auto w = inverse_branch(ctx.f, p, level[i], z0 + (level[i] - z0) / mu);
        if (!w) fine = false;
        else next[i] = *w;
      }
      if (!fine) break;
      inward.push_back(next);
      level = std::move(next);
      if (std::abs(level.back() - z0) < 1e-3 * cell) break;
    }
    std::vector<cplx> arc{z0};
    for (auto it = inward.rbegin(); it != inward.rend(); ++it) arc.insert(arc.end(), it->begin(), it->end());

    // sigma and its forward images, each from the f^{pm}(g y) end
    bool entered = false;
    for (int m = 0; m <= 200 && !entered; ++m) {
      auto piece = adaptive_curve(
          [&](double s) -> std::optional<cplx> {
            const cplx w = ctx.f.iterate(sigma(1.0 - s), p * m);
            if (!std::isfinite(std::abs(w))) return std::nullopt;
            return w;
          },
          0.5 * cell);
      arc.insert(arc.end(), piece.begin(), piece.end());
      entered = std::any_of(piece.begin(), piece.end(), [&](cplx z) { return inside_omega0(ctx, z); });
    }
    if (!entered || !truncate_at_omega0(ctx, arc)) continue;
    ok = std::all_of(arc.begin() + 1, arc.end(), [&](cplx z) {
      return in_basin(z) || distance_to_mask(ctx.grid, ctx.basin, z) <= 1.5 * cell;
    });
    if (ok) return arc;
  }
  return std::nullopt;
}

/// f^k of a polyline, refined so that image points stay within `gap`.
std::vector<cplx> map_polyline(const Polynomial& f, const std::vector<cplx>& pts, int k, double gap) {
  std::vector<cplx> out;
  if (pts.empty()) return out;
  out.push_back(f.iterate(pts.front(), k));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx a = pts[i - 1];
    const cplx b = pts[i];
    auto seg = adaptive_curve([&](double s) -> std::optional<cplx> { return f.iterate(a + s * (b - a), k); }, gap,
                              1, 12);
    out.insert(out.end(), seg.begin() + 1, seg.end());
  }
  return out;
}

double orientation(cplx a, cplx b, cplx c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
}

bool on_segment(cplx a, cplx b, cplx c) {
  return std::min(a.real(), b.real()) <= c.real() && c.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= c.imag() && c.imag() <= std::max(a.imag(), b.imag());
}

bool segments_meet(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = orientation(q1, q2, p1);
  const double d2 = orientation(q1, q2, p2);
  const double d3 = orientation(p1, p2, q1);
  const double d4 = orientation(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

std::vector<std::size_t> neighbours4(const Grid& grid, std::size_t idx) {
  std::vector<std::size_t> out;
  const int x = grid.ix(idx);
  const int y = grid.iy(idx);
  if (x > 0) out.push_back(idx - 1);
  if (x + 1 < grid.nx()) out.push_back(idx + 1);
  if (y > 0) out.push_back(idx - static_cast<std::size_t>(grid.nx()));
  if (y + 1 < grid.ny()) out.push_back(idx + static_cast<std::size_t>(grid.nx()));
  return out;
}

struct CycleCandidate {
  CycleRecord cycle;
  double distance_cells = kInf;
};

}  // namespace

void supercover(const Grid& grid, cplx a, cplx b, const std::function<void(std::size_t)>& visit) {
  auto [x0, y0] = grid.to_cell_coords(a);
  auto [x1, y1] = grid.to_cell_coords(b);
  auto emit = [&](long ix, long iy) {
    if (ix >= 0 && iy >= 0 && ix < grid.nx() && iy < grid.ny()) {
      visit(grid.index(static_cast<int>(ix), static_cast<int>(iy)));
    }
  };
  long ix = static_cast<long>(std::floor(x0));
  long iy = static_cast<long>(std::floor(y0));
  const long ex = static_cast<long>(std::floor(x1));
  const long ey = static_cast<long>(std::floor(y1));
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const long sx = dx > 0 ? 1 : -1;
  const long sy = dy > 0 ? 1 : -1;
  double tmax_x = dx != 0 ? ((dx > 0 ? ix + 1 - x0 : x0 - ix) / std::abs(dx)) : kInf;
  double tmax_y = dy != 0 ? ((dy > 0 ? iy + 1 - y0 : y0 - iy) / std::abs(dy)) : kInf;
  const double tdx = dx != 0 ? 1.0 / std::abs(dx) : kInf;
  const double tdy = dy != 0 ? 1.0 / std::abs(dy) : kInf;
  emit(ix, iy);
  long guard = std::abs(ex - ix) + std::abs(ey - iy) + 4;
  while ((ix != ex || iy != ey) && guard-- > 0) {
    if (std::abs(tmax_x - tmax_y) < 1e-12) {
      // through a corner: both side cells touch the segment
      emit(ix + sx, iy);
      emit(ix, iy + sy);
      ix += sx;
      iy += sy;
      tmax_x += tdx;
      tmax_y += tdy;
    } else if (tmax_x < tmax_y) {
      ix += sx;
      tmax_x += tdx;
    } else {
      iy += sy;
      tmax_y += tdy;
    }
    emit(ix, iy);
  }
}

bool SegmentIndex::crosses(const Grid& grid, cplx a, cplx b) const {
  std::vector<int> seen;
  bool hit = false;
  supercover(grid, a, b, [&](std::size_t cell) {
    if (hit) return;
    const int x = grid.ix(cell);
    const int y = grid.iy(cell);
    for (int dy = -1; dy <= 1 && !hit; ++dy) {
      for (int dx = -1; dx <= 1 && !hit; ++dx) {
        if (x + dx < 0 || y + dy < 0 || x + dx >= grid.nx() || y + dy >= grid.ny()) continue;
        const auto it = by_cell.find(grid.index(x + dx, y + dy));
        if (it == by_cell.end()) continue;
        for (int s : it->second) {
          if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
          seen.push_back(s);
          const auto& [p, q] = segments[static_cast<std::size_t>(s)];
          if (segments_meet(a, b, p, q)) {
            hit = true;
            break;
          }
        }
      }
    }
  });
  return hit;
}

PuzzleGraph build_graph(const Polynomial& f, const Raster& raster, double outer_level, int cycle_period_hint,
                        const PuzzleOptions& opts) {
  if (!(outer_level > 0.0)) throw Error(ErrorCode::InvalidArgument, "outer level must be positive");
  const Grid& grid = raster.grid;
  const double cell = grid.cell_size();
  const BasinRef basin = immediate_basin(f, raster);
  const InnerModulus h(f);

  PuzzleGraph g;
  g.grid = grid;
  g.outer_level = outer_level;
  g.superattracting = h.superattracting();
  g.critical = critical_points(f).points;
  g.kinds.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g.kinds[i] = raster.cells[i].kind;

  // Omega_0: sublevel of h in U_f(0) holding the critical points of U_f(0)
  double crit_level = -kInf;
  for (const auto& c : g.critical) {
    if (!in_mask(grid, basin.mask, c.z)) continue;
    if (const auto v = h(c.z)) crit_level = std::max(crit_level, *v);
  }
  if (opts.inner_level) {
    g.inner_level = *opts.inner_level;
  } else if (!h.superattracting()) {
    g.inner_level = crit_level > -kInf ? crit_level - 0.3 * h.log_lambda() : -2.0;
  } else {
    g.inner_level = crit_level > -kInf ? crit_level * (1.0 - 0.3 * (1.0 - 1.0 / h.local_degree())) : std::log(0.5);
  }
  Mask sub(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!basin.mask[i]) continue;
    const auto v = h(grid.center(i));
    sub[i] = v && *v < g.inner_level;
  }
  const auto origin_cell = grid.cell_of(0.0);
  sub[*origin_cell] = 1;
  {
    const ComponentMap parts = label_components(grid, sub, 0);
    g.omega0 = parts.mask(parts.labels[*origin_cell]);
  }
  for (const auto& c : g.critical) {
    if (in_mask(grid, basin.mask, c.z) && !in_mask(grid, g.omega0, c.z)) {
      throw Error(ErrorCode::InvalidArgument, "inner level leaves a critical point of U_f(0) outside Omega_0");
    }
  }

  // Omega: below the outer equipotential and off Omega_0
  g.omega.assign(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (g.omega0[i]) continue;
    double pot = 0.0;
    if (raster.cells[i].kind == CellKind::escaping) {
      pot = raster.potential.empty() ? green_function(f, grid.center(i)) : raster.potential[i];
    }
    g.omega[i] = pot < outer_level;
  }
  for (int x = 0; x < grid.nx(); ++x) {
    for (int y : {0, grid.ny() - 1}) {
      if (g.omega[grid.index(x, y)]) throw Error(ErrorCode::OutOfBox, "outer equipotential leaves the raster box");
    }
  }
  for (int y = 0; y < grid.ny(); ++y) {
    for (int x : {0, grid.nx() - 1}) {
      if (g.omega[grid.index(x, y)]) throw Error(ErrorCode::OutOfBox, "outer equipotential leaves the raster box");
    }
  }

  // repelling cycles of period >= 2 near the basin boundary
  std::vector<CycleCandidate> candidates;
  double nearest = kInf;
  for (auto& cyc : find_cycles(f, opts.max_cycle_period, grid.box())) {
    if (cyc.period < 2 || cyc.cls != CycleClass::repelling) continue;
    double worst = 0.0;
    for (cplx z : cyc.points) worst = std::max(worst, distance_to_mask(grid, basin.mask, z) / cell);
    nearest = std::min(nearest, worst);
    if (worst <= opts.cycle_tol) candidates.push_back({std::move(cyc), worst});
  }
  if (candidates.empty()) {
    std::ostringstream msg;
    msg << "no repelling cycle of period 2.." << opts.max_cycle_period << " within " << opts.cycle_tol
        << " cells of U_f(0); nearest at " << nearest << " cells";
    throw Error(ErrorCode::NoBoundaryCycle, msg.str());
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const CycleCandidate& a, const CycleCandidate& b) {
    const bool ha = a.cycle.period == cycle_period_hint;
    const bool hb = b.cycle.period == cycle_period_hint;
    if (ha != hb) return ha;
    if (a.cycle.period != b.cycle.period) return a.cycle.period < b.cycle.period;
    return a.distance_cells < b.distance_cells;
  });

  std::ostringstream misses;
  bool found = false;
  for (const auto& cand : candidates) {
    const auto& pts = cand.cycle.points;
    std::vector<RayPath> tails;
    std::vector<int> hits(pts.size(), 0);
    std::vector<double> miss(pts.size(), kInf);
    for (const auto& angles : periodic_angles(f.degree(), cand.cycle.period)) {
      for (const auto& theta : angles) {
        RayPath ray;
        try {
          ray = trace_external_ray(f, theta, 2.0 * outer_level, 1e-8);
        } catch (const Error&) {
          continue;
        }
        if (!ray.landed) continue;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          const double dist = std::abs(ray.landing - pts[k]);
          miss[k] = std::min(miss[k], dist);
          if (dist < opts.landing_tol) {
            ++hits[k];
            tails.push_back(ray);
          }
        }
      }
    }
    if (std::all_of(hits.begin(), hits.end(), [](int n) { return n > 0; })) {
      g.cycle = cand.cycle;
      g.external_tails = std::move(tails);
      found = true;
      break;
    }
    misses << " [period " << cand.cycle.period << " at " << pts.front() << ": nearest landing";
    for (double m : miss) misses << ' ' << m;
    misses << ']';
  }
  if (!found) throw Error(ErrorCode::NoLandingRays, "no candidate angle lands on a boundary cycle:" + misses.str());

  // internal arcs gamma_k
  const ArcContext ctx{f, grid, basin.mask, g.omega0, h, g.inner_level};
  const int p = g.cycle.period;
  const cplx z0 = g.cycle.points.front();
  const auto arc0 = pullback_arc(ctx, z0, p, g.cycle.multiplier);
  if (!arc0) throw Error(ErrorCode::NoBoundaryCycle, "no internal arc from Omega_0 to the boundary cycle");
  for (int k = 0; k < p; ++k) {
    std::vector<cplx> pts = k == 0 ? *arc0 : map_polyline(f, *arc0, k, 0.5 * cell);
    if (k > 0 && !truncate_at_omega0(ctx, pts)) {
      throw Error(ErrorCode::NoBoundaryCycle, "image of the internal arc misses Omega_0");
    }
    RayPath arc;
    arc.kind = RayKind::internal;
    arc.points = std::move(pts);
    arc.parameters.assign(arc.points.size(), 0.0);
    arc.landed = true;
    arc.landing = arc.points.front();
    g.internal_rays.push_back(std::move(arc));
  }

  // rasterize the cuts and index the exact segments
  auto index = std::make_shared<SegmentIndex>();
  g.cut.assign(grid.size(), 0);
  auto add_polyline = [&](const std::vector<cplx>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const int id = static_cast<int>(index->segments.size());
      index->segments.emplace_back(pts[i - 1], pts[i]);
      supercover(grid, pts[i - 1], pts[i], [&](std::size_t c) {
        g.cut[c] = 1;
        auto& bucket = index->by_cell[c];
        if (bucket.empty() || bucket.back() != id) bucket.push_back(id);
      });
    }
  };
  for (const auto& r : g.external_tails) add_polyline(r.points);
  for (const auto& r : g.internal_rays) add_polyline(r.points);
  g.segments = index;

  // the graph (cuts plus the complement of Omega) must be connected
  {
    Mask frame(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) frame[i] = g.cut[i] || !g.omega[i];
    const ComponentMap parts = label_components(grid, frame, 0);
    if (parts.count != 1) {
      throw std::logic_error("puzzle graph is not connected at raster scale (" + std::to_string(parts.count) +
                             " parts)");
    }
  }

  Mask open(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) open[i] = g.omega[i] && !g.cut[i];
  const ComponentMap pieces = label_components(grid, open, 0);
  g.depth0 = pieces.labels;
  g.depth0_count = pieces.count;

  // inner curve for display: boundary cells of Omega_0 by argument
  g.inner_curve.kind = RayKind::equipotential;
  g.inner_curve.level = g.inner_level;
  auto rim = boundary_cells(grid, g.omega0);
  std::vector<std::pair<double, cplx>> by_arg;
  for (std::size_t c : rim) by_arg.emplace_back(std::arg(grid.center(c)), grid.center(c));
  std::sort(by_arg.begin(), by_arg.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && std::norm(a.second) < std::norm(b.second));
  });
  for (const auto& [a, z] : by_arg) {
    g.inner_curve.points.push_back(z);
    g.inner_curve.parameters.push_back(a / (2.0 * M_PI));
  }
  return g;
}

std::int32_t exact_depth0_label(const PuzzleGraph& g, cplx z) {
  const Grid& grid = g.grid;
  const auto cell = grid.cell_of(z);
  if (!cell || !g.omega[*cell]) return kOutsideOmega;
  if (!g.cut[*cell]) return g.depth0[*cell];
  // inside a cut cell: take the nearest uncut cell reachable without crossing Γ
  std::vector<std::pair<double, std::size_t>> around;
  const int x = grid.ix(*cell);
  const int y = grid.iy(*cell);
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      if (x + dx < 0 || y + dy < 0 || x + dx >= grid.nx() || y + dy >= grid.ny()) continue;
      const std::size_t c = grid.index(x + dx, y + dy);
      if (g.depth0[c] < 0) continue;
      around.emplace_back(std::abs(grid.center(c) - z), c);
    }
  }
  std::sort(around.begin(), around.end());
  for (const auto& [d, c] : around) {
    if (!g.segments->crosses(grid, z, grid.center(c))) return g.depth0[c];
  }
  return kOnGraph;
}

// ---------------------------------------------------------------------------

PuzzleSet::PuzzleSet(const Polynomial& f, const PuzzleGraph& graph, int max_depth, double depth_guard)
    : f_(f), graph_(std::make_shared<PuzzleGraph>(graph)) {
  if (max_depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  const PuzzleGraph& g = *graph_;
  const Grid& grid = g.grid;
  const std::size_t n_cells = grid.size();

  std::vector<cplx> orbit(n_cells);
  std::vector<std::uint64_t> hash(n_cells, 0);
  std::vector<std::int32_t> current = g.depth0;
  for (std::size_t i = 0; i < n_cells; ++i) {
    orbit[i] = grid.center(i);
    if (current[i] >= 0) hash[i] = mix(kSeed, current[i]);
  }

  for (int depth = 0; depth <= max_depth; ++depth) {
    if (depth > 0) {
      std::int64_t survivors = 0;
      std::int64_t cut_hits = 0;
      for (std::size_t i = 0; i < n_cells; ++i) {
        if (current[i] < 0) continue;
        ++survivors;
        orbit[i] = f_(orbit[i]);
        const auto c = grid.cell_of(orbit[i]);
        const std::int32_t l = c ? g.depth0[*c] : kOutsideOmega;
        if (l < 0) {
          if (c && g.omega[*c]) ++cut_hits;
          current[i] = -1;
          continue;
        }
        hash[i] = mix(hash[i], l);
      }
      if (survivors > 0 && static_cast<double>(cut_hits) > depth_guard * static_cast<double>(survivors)) {
        throw Error(ErrorCode::DepthBudget, "depth " + std::to_string(depth) + " loses " +
                                               std::to_string(cut_hits) + " of " + std::to_string(survivors) +
                                               " cells to graph preimages");
      }
      // 4-connected components of equal itinerary
      std::vector<std::int32_t> parent(n_cells);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<std::int32_t(std::int32_t)> find = [&](std::int32_t a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
          parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
          a = parent[static_cast<std::size_t>(a)];
        }
        return a;
      };
      auto unite = [&](std::size_t a, std::size_t b) {
        const auto ra = find(static_cast<std::int32_t>(a));
        const auto rb = find(static_cast<std::int32_t>(b));
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
      };
      for (int y = 0; y < grid.ny(); ++y) {
        for (int x = 0; x < grid.nx(); ++x) {
          const std::size_t i = grid.index(x, y);
          if (current[i] < 0) continue;
          if (x + 1 < grid.nx() && current[i + 1] >= 0 && hash[i + 1] == hash[i]) unite(i, i + 1);
          if (y + 1 < grid.ny()) {
            const std::size_t j = i + static_cast<std::size_t>(grid.nx());
            if (current[j] >= 0 && hash[j] == hash[i]) unite(i, j);
          }
        }
      }
      std::vector<std::int32_t> relabel(n_cells, -1);
      std::int32_t next = 0;
      for (std::size_t i = 0; i < n_cells; ++i) {
        if (current[i] < 0) continue;
        const auto r = static_cast<std::size_t>(find(static_cast<std::int32_t>(i)));
        if (relabel[r] < 0) relabel[r] = next++;
        current[i] = relabel[r];
      }
    }
    labels_.push_back(current);

    // piece records
    const int count = current.empty() ? 0 : *std::max_element(current.begin(), current.end()) + 1;
    std::vector<PuzzlePiece> pieces(static_cast<std::size_t>(std::max(count, 0)));
    std::vector<std::vector<cplx>> rims(pieces.size());
    std::vector<std::vector<std::int32_t>> parents(pieces.size());
    DepthStats st;
    st.depth = depth;
    st.pieces = count;
    for (std::size_t i = 0; i < n_cells; ++i) {
      const std::int32_t id = current[i];
      if (id < 0) continue;
      auto& piece = pieces[static_cast<std::size_t>(id)];
      if (piece.cells == 0) {
        piece.depth = depth;
        piece.id = id;
        piece.sample = grid.center(i);
        piece.itinerary = hash[i];
        piece.parent = depth > 0 ? labels_[static_cast<std::size_t>(depth - 1)][i] : -1;
      }
      ++piece.cells;
      ++st.cells;
      bool interior = true;
      const int x = grid.ix(i);
      const int y = grid.iy(i);
      for (std::size_t nb : neighbours4(grid, i)) {
        if (current[nb] == id) continue;
        interior = false;
        if (g.kinds[nb] == CellKind::escaping && !g.omega[nb]) piece.touches_escaping = true;
        if (g.kinds[nb] == CellKind::basin || g.omega0[nb]) piece.touches_basin = true;
      }
      if (x == 0 || y == 0 || x + 1 == grid.nx() || y + 1 == grid.ny()) interior = false;
      if (!interior) rims[static_cast<std::size_t>(id)].push_back(grid.center(i));
      if (interior && depth > 0) {
        auto& ps = parents[static_cast<std::size_t>(id)];
        const std::int32_t par = labels_[static_cast<std::size_t>(depth - 1)][i];
        if (std::find(ps.begin(), ps.end(), par) == ps.end()) ps.push_back(par);
      }
    }
    for (std::size_t id = 0; id < pieces.size(); ++id) {
      auto& piece = pieces[id];
      auto& rim = rims[id];
      piece.diameter = point_set_diameter(rim) + grid.cell_size();
      const std::size_t marks = std::min<std::size_t>(8, rim.size());
      for (std::size_t m = 0; m < marks; ++m) piece.marked_boundary_points.push_back(rim[m * rim.size() / marks]);
      if (parents[id].size() > 1 || (depth > 0 && piece.parent < 0)) ++st.refinement_violations;
    }

    // Markov check: images of depth-n cells should sit in one depth-(n-1) piece
    if (depth > 0) {
      const auto& up = labels_[static_cast<std::size_t>(depth - 1)];
      std::vector<std::vector<std::int32_t>> image_labels(pieces.size());
      std::vector<std::vector<std::size_t>> image_cells(pieces.size());
      for (std::size_t i = 0; i < n_cells; ++i) {
        if (current[i] < 0) continue;
        const auto c = grid.cell_of(f_(grid.center(i)));
        if (!c) continue;
        image_labels[static_cast<std::size_t>(current[i])].push_back(up[*c]);
        image_cells[static_cast<std::size_t>(current[i])].push_back(*c);
      }
      std::int64_t total = 0;
      std::int64_t stray = 0;
      for (std::size_t id = 0; id < pieces.size(); ++id) {
        auto labels = image_labels[id];
        if (labels.empty()) continue;
        std::sort(labels.begin(), labels.end());
        std::int32_t best = labels.front();
        std::size_t best_run = 0;
        for (std::size_t a = 0; a < labels.size();) {
          std::size_t b = a;
          while (b < labels.size() && labels[b] == labels[a]) ++b;
          if (labels[a] >= 0 && b - a > best_run) {
            best_run = b - a;
            best = labels[a];
          }
          a = b;
        }
        for (std::size_t c : image_cells[id]) {
          ++total;
          bool near = false;
          const int x = grid.ix(c);
          const int y = grid.iy(c);
          for (int dy = -1; dy <= 1 && !near; ++dy) {
            for (int dx = -1; dx <= 1 && !near; ++dx) {
              if (x + dx < 0 || y + dy < 0 || x + dx >= grid.nx() || y + dy >= grid.ny()) continue;
              near = up[grid.index(x + dx, y + dy)] == best;
            }
          }
          if (!near) ++stray;
        }
      }
      st.markov_defect = total > 0 ? static_cast<double>(stray) / static_cast<double>(total) : 0.0;
    }
    pieces_.push_back(std::move(pieces));
    stats_.push_back(st);
  }

  // critical points in pieces
  critical_refs_.resize(labels_.size());
  for (int depth = 0; depth <= max_depth; ++depth) {
    auto& refs = critical_refs_[static_cast<std::size_t>(depth)];
    for (const auto& c : g.critical) {
      std::optional<PieceRef> ref;
      try {
        ref = locate(c.z, depth);
      } catch (const Error&) {
        ref.reset();
      }
      refs.push_back(ref);
      if (ref && ref->resolved()) {
        auto& piece = pieces_[static_cast<std::size_t>(depth)][static_cast<std::size_t>(ref->id)];
        piece.contains_critical.push_back(c.z);
        piece.critical_multiplicity += c.multiplicity;
      }
    }
    for (const auto& piece : pieces_[static_cast<std::size_t>(depth)]) {
      stats_[static_cast<std::size_t>(depth)].degree_sum += piece.degree();
    }
  }
}

const std::vector<PuzzlePiece>& PuzzleSet::pieces(int depth) const {
  if (depth < 0 || depth > max_depth()) throw Error(ErrorCode::InsufficientDepth, "depth not computed");
  return pieces_[static_cast<std::size_t>(depth)];
}

std::optional<std::vector<std::int32_t>> PuzzleSet::itinerary(cplx z, int depth) const {
  std::vector<std::int32_t> out;
  cplx w = z;
  for (int j = 0; j <= depth; ++j) {
    const std::int32_t l = exact_depth0_label(*graph_, w);
    if (l == kOnGraph) {
      std::ostringstream msg;
      msg << "orbit of " << z << " meets the graph at step " << j;
      throw Error(ErrorCode::OnGraph, msg.str());
    }
    if (l == kOutsideOmega) return std::nullopt;
    out.push_back(l);
    w = f_(w);
  }
  return out;
}

std::optional<PieceRef> PuzzleSet::locate_in(cplx z, int depth, const PieceRef* parent) const {
  if (depth < 0 || depth > max_depth()) throw Error(ErrorCode::InsufficientDepth, "depth not computed");
  const auto it = itinerary(z, depth);
  if (!it) return std::nullopt;
  std::uint64_t h = kSeed;
  for (std::int32_t l : *it) h = mix(h, l);

  const Grid& grid = graph_->grid;
  PieceRef ref;
  ref.depth = depth;
  ref.itinerary = h;
  ref.point = z;
  ref.diameter = grid.cell_size();
  if (parent && !parent->resolved()) return ref;

  const auto& lab = labels_[static_cast<std::size_t>(depth)];
  const auto& pcs = pieces_[static_cast<std::size_t>(depth)];
  auto [fx, fy] = grid.to_cell_coords(z);
  const int cx = static_cast<int>(std::floor(fx));
  const int cy = static_cast<int>(std::floor(fy));
  double best = kInf;
  int best_id = -1;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      const int x = cx + dx;
      const int y = cy + dy;
      if (x < 0 || y < 0 || x >= grid.nx() || y >= grid.ny()) continue;
      const std::size_t c = grid.index(x, y);
      const std::int32_t id = lab[c];
      if (id < 0 || pcs[static_cast<std::size_t>(id)].itinerary != h) continue;
      if (parent && labels_[static_cast<std::size_t>(depth - 1)][c] != parent->id) continue;
      const double d = std::abs(grid.center(c) - z);
      if (d < best) {
        best = d;
        best_id = id;
      }
    }
  }
  if (best_id >= 0) {
    ref.id = best_id;
    ref.diameter = pcs[static_cast<std::size_t>(best_id)].diameter;
  }
  return ref;
}

std::optional<PieceRef> PuzzleSet::locate(cplx z, int depth) const { return locate_in(z, depth, nullptr); }

bool PuzzleSet::same_piece(const PieceRef& a, const PieceRef& b) const {
  if (a.depth != b.depth) return false;
  if (a.resolved() && b.resolved()) return a.id == b.id;
  return a.itinerary == b.itinerary && std::abs(a.point - b.point) <= 3.0 * graph_->grid.cell_size();
}

bool PuzzleSet::contains(const PieceRef& piece, cplx z) const {
  try {
    const auto ref = locate(z, piece.depth);
    return ref && same_piece(*ref, piece);
  } catch (const Error&) {
    return false;
  }
}

int PuzzleSet::local_degree(const PieceRef& piece) const {
  int deg = 1;
  const auto& refs = critical_refs_.at(static_cast<std::size_t>(piece.depth));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i] && same_piece(*refs[i], piece)) deg += graph_->critical[i].multiplicity;
  }
  return deg;
}

Nest PuzzleSet::nest(cplx z, int max_depth) const {
  if (max_depth > this->max_depth()) throw Error(ErrorCode::InsufficientDepth, "nest deeper than the puzzle set");
  Nest nest;
  nest.target = z;
  for (int n = 0; n <= max_depth; ++n) {
    const auto ref = locate_in(z, n, nest.pieces.empty() ? nullptr : &nest.pieces.back());
    if (!ref) {
      nest.finite = true;
      break;
    }
    nest.pieces.push_back(*ref);
  }
  if (nest.pieces.empty()) throw Error(ErrorCode::InvalidArgument, "target is not in Omega");

  const double cell = graph_->grid.cell_size();
  nest.critical_nest = true;
  for (std::size_t n = 0; n < nest.pieces.size(); ++n) {
    const PieceRef& piece = nest.pieces[n];
    if (piece.diameter < 3.0 * cell) nest.shrinking = true;
    bool crit = false;
    for (const auto& c : graph_->critical) crit = crit || contains(piece, c.z);
    nest.critical_nest = nest.critical_nest && crit;

    // deg(f^n | P_n) as the product of local degrees along the orbit pieces
    int deg = 1;
    cplx w = z;
    for (int j = 0; j < static_cast<int>(n); ++j) {
      const auto orbit_piece = locate(w, static_cast<int>(n) - j);
      if (orbit_piece) deg *= local_degree(*orbit_piece);
      w = f_(w);
    }
    nest.degree_sequence.push_back(deg);
  }
  return nest;
}

std::optional<FirstEntry> PuzzleSet::first_entry(const Nest& nest, const PieceRef& target) const {
  const int k = target.depth;
  const int deepest = static_cast<int>(nest.pieces.size()) - 1;
  if (deepest < k + 1) {
    throw Error(ErrorCode::InsufficientDepth, "nest depth " + std::to_string(deepest) + " cannot reach depth " +
                                                  std::to_string(k + 1));
  }
  const int d = f_.degree();
  const int bound = static_cast<int>(std::lround(std::pow(d, d - 1)));
  cplx w = nest.target;
  for (int r = 1; r + k <= deepest; ++r) {
    w = f_(w);
    const auto image = locate(w, k);
    if (!image) return std::nullopt;
    if (!same_piece(*image, target)) continue;

    // orbit pieces P_{r+k}, f(P_{r+k}), ..., f^{r-1}(P_{r+k})
    std::vector<PieceRef> orbit;
    std::vector<cplx> points;
    cplx u = nest.target;
    FirstEntry entry{r, 1};
    for (int j = 0; j < r; ++j) {
      const auto piece = locate(u, r + k - j);
      if (!piece) throw std::logic_error("orbit piece missing below the nest depth");
      entry.degree *= local_degree(*piece);
      orbit.push_back(*piece);
      points.push_back(u);
      u = f_(u);
    }
    if (entry.degree > bound) {
      throw std::logic_error("first entry degree " + std::to_string(entry.degree) + " exceeds d^(d-1) = " +
                             std::to_string(bound));
    }
    for (int i = 0; i < r; ++i) {
      for (int j = i + 1; j < r; ++j) {
        // the deeper piece meets the shallower one only by lying inside it
        const auto above = locate(points[static_cast<std::size_t>(i)], orbit[static_cast<std::size_t>(j)].depth);
        if (above && same_piece(*above, orbit[static_cast<std::size_t>(j)])) {
          throw std::logic_error("first entry orbit pieces " + std::to_string(i) + " and " + std::to_string(j) +
                                 " overlap");
        }
      }
    }
    return entry;
  }
  return std::nullopt;
}

std::vector<PuzzlePiece> pieces_at_depth(const Polynomial& f, const PuzzleGraph& graph, int depth) {
  return PuzzleSet(f, graph, depth).pieces(depth);
}

Nest nest_of_point(const Polynomial& f, const PuzzleGraph& graph, cplx z, int max_depth) {
  return PuzzleSet(f, graph, max_depth).nest(z, max_depth);
}

std::optional<FirstEntry> first_entry_time(const PuzzleSet& set, const Nest& nest, const PieceRef& target) {
  return set.first_entry(nest, target);
}

BoundedDegreeEvidence bounded_degree_evidence(const Nest& nest) {
  BoundedDegreeEvidence ev;
  const auto& seq = nest.degree_sequence;
  if (seq.size() < 5) return ev;
  std::size_t run = 1;
  while (run < seq.size() && seq[seq.size() - 1 - run] == seq.back()) ++run;
  if (run < 5) return ev;
  ev.witnessed = true;
  ev.bound = seq.back();
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (seq[n] <= ev.bound) ev.depths.push_back(static_cast<int>(n));
  }
  return ev;
}

std::vector<cplx> julia_samples(const Polynomial& f, int count, std::uint64_t seed) {
  const double r = escape_radius(f);
  const auto fixed = find_cycles(f, 1, Box::square(0.0, 2.0 * r));
  std::optional<cplx> start;
  for (const auto& c : fixed) {
    if (c.cls == CycleClass::repelling) {
      start = c.points.front();
      break;
    }
  }
  if (!start) throw Error(ErrorCode::NonConvergence, "no repelling fixed point to pull back");
  std::mt19937_64 rng(seed);
  std::vector<cplx> out;
  std::vector<cplx> asc = f.ascending();
  const cplx a0 = asc[0];
  for (int s = 0; s < count; ++s) {
    cplx z = *start;
    for (int k = 0; k < 30; ++k) {
      asc[0] = a0 - z;
      const auto roots = aberth_roots(asc).roots;
      z = roots[rng() % roots.size()];
    }
    out.push_back(z);
  }
  return out;
}

ElevatorEvidence elevator_evidence(const PuzzleSet& set, const Nest& nest) {
  ElevatorEvidence ev;
  for (int k = 0; k + 1 < static_cast<int>(nest.pieces.size()); ++k) {
    if (const auto e = set.first_entry(nest, nest.pieces[static_cast<std::size_t>(k)])) ev.entries.emplace_back(k, *e);
  }
  ev.observed = bounded_degree_evidence(nest).witnessed && ev.entries.size() >= 3;
  return ev;
}

double shape_of(const Grid& grid, std::span<const std::uint8_t> mask, cplx x) {
  const auto cell = grid.cell_of(x);
  if (!cell || !mask[*cell]) throw Error(ErrorCode::NotInterior, "point outside the region");
  for (std::size_t nb : neighbours4(grid, *cell)) {
    if (!mask[nb]) throw Error(ErrorCode::NotInterior, "point in a boundary cell");
  }
  const double hw = 0.5 * grid.cell_width();
  const double hh = 0.5 * grid.cell_height();
  double lo = kInf;
  double hi = 0.0;
  auto edge = [&](cplx mid) {
    const double d = std::abs(mid - x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  };
  for (int y = 0; y < grid.ny(); ++y) {
    for (int xi = 0; xi < grid.nx(); ++xi) {
      const std::size_t i = grid.index(xi, y);
      if (!mask[i]) continue;
      const cplx c = grid.center(xi, y);
      if (xi == 0 || !mask[i - 1]) edge(c - hw);
      if (xi + 1 == grid.nx() || !mask[i + 1]) edge(c + hw);
      if (y == 0 || !mask[i - static_cast<std::size_t>(grid.nx())]) edge(c + cplx(0.0, hh));
      if (y + 1 == grid.ny() || !mask[i + static_cast<std::size_t>(grid.nx())]) edge(c - cplx(0.0, hh));
    }
  }
  return hi / lo;
}

double shape_of(const ComponentMap& map, int id, cplx x) {
  if (id < 0 || id >= map.count) throw Error(ErrorCode::UnknownComponent, "component " + std::to_string(id));
  return shape_of(map.grid, map.mask(id), x);
}

}  // namespace fatou
