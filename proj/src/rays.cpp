#include "fatou/rays.hpp"

#include <algorithm>
#include <cmath>

#include "fatou/components.hpp"
#include "fatou/error.hpp"

namespace fatou {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// The equation log(f^n(z) + a_{d-1}/d) = log W whose roots are the points of
/// potential t on the rays of angle theta + j / d^n.
struct BoettcherEquation {
  const Polynomial& f;
  int n = 0;
  cplx shift;
  cplx log_w;

  BoettcherEquation(const Polynomial& poly, const Angle& theta, double t, double level)
      : f(poly), shift(poly.coefficient(poly.degree() - 1) / static_cast<double>(poly.degree())) {
    const double d = poly.degree();
    double scaled = t;
    Angle phase = theta;
    while (scaled < level) {
      scaled *= d;
      phase = phase.times(static_cast<std::uint64_t>(poly.degree()));
      ++n;
    }
    log_w = cplx(scaled, kTwoPi * phase.to_double());
  }

  /// (H(z), H'(z)), or nullopt on overflow.
  std::optional<std::pair<cplx, cplx>> operator()(cplx z) const {
    auto [w, dw] = f.iterate_with_derivative(z, n);
    const cplx v = w + shift;
    if (!std::isfinite(std::abs(v)) || !std::isfinite(std::abs(dw)) || v == cplx(0.0)) return std::nullopt;
    cplx h = std::log(v) - log_w;
    h.imag(h.imag() - kTwoPi * std::round(h.imag() / kTwoPi));
    return std::make_pair(h, dw / v);
  }
};

std::optional<cplx> solve(const BoettcherEquation& eq, cplx guess, const RayOptions& opts) {
  cplx z = guess;
  for (int it = 0; it < opts.newton_iterations; ++it) {
    const auto hv = eq(z);
    if (!hv) return std::nullopt;
    auto [h, dh] = *hv;
    if (dh == cplx(0.0)) return std::nullopt;
    cplx step = h / dh;
    // damp steps that would jump by more than a quarter turn in log coordinates
    if (std::abs(h) > 1.0) step /= std::abs(h);
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z)) || std::abs(h) < 1e-14) {
      const auto check = eq(z);
      if (!check) return std::nullopt;
      // neighbouring rays sit about 2 pi / |H'| away; stay well inside that
      const double spacing = kTwoPi / std::abs(check->second);
      if (std::abs(z - guess) > 0.5 * spacing) return std::nullopt;
      return z;
    }
  }
  return std::nullopt;
}

cplx aitken(cplx z0, cplx z1, cplx z2) {
  const cplx a = z1 - z0;
  const cplx b = z2 - z1;
  const cplx den = b - a;
  if (std::abs(den) < 1e-300) return z2;
  return z2 - b * b / den;
}

/// Incremental tracer that keeps the whole polyline, potentials decreasing.
class RayWalker {
 public:
  RayWalker(const Polynomial& f, const Angle& theta, double t0, const RayOptions& opts)
      : f_(f), theta_(theta), opts_(opts), radius_(escape_radius(f)) {
    const BoettcherEquation eq(f, theta, t0, opts.asymptotic_level);
    const cplx guess = std::exp(eq.log_w) - eq.shift;
    const auto z = solve(eq, guess, opts);
    if (!z) throw Error(ErrorCode::RayCrisis, "cannot start ray " + theta.to_string());
    points_.push_back(*z);
    potentials_.push_back(t0);
  }

  /// Continues down to potential `target` (included exactly).
  void descend(double target) {
    double ratio = opts_.step_ratio;
    int halvings = 0;
    while (potentials_.back() > target) {
      const double t = potentials_.back();
      const double next = std::max(target, t * ratio);
      const cplx guess = predict(next);
      const BoettcherEquation eq(f_, theta_, next, opts_.asymptotic_level);
      const auto z = solve(eq, guess, opts_);
      bool ok = z.has_value();
      if (ok && points_.size() >= 2) {
        // a jump much longer than the previous step means a branch switch
        const double prev = std::abs(points_.back() - points_[points_.size() - 2]);
        const double rel = std::log(t / next) / std::log(potentials_[potentials_.size() - 2] / t);
        ok = std::abs(*z - points_.back()) <= 3.0 * prev * std::max(1.0, rel) + 1e-12;
      }
      if (!ok) {
        if (++halvings > opts_.max_halvings) {
          throw Error(ErrorCode::RayCrisis, "ray " + theta_.to_string() + " lost continuity near potential " +
                                                std::to_string(t));
        }
        ratio = std::sqrt(ratio);
        continue;
      }
      points_.push_back(*z);
      potentials_.push_back(next);
      halvings = 0;
      ratio = std::max(ratio * ratio, opts_.step_ratio);
    }
  }

  /// Ray point at a potential already covered by the polyline.
  std::optional<cplx> point_at(double t) const {
    const auto it = std::lower_bound(potentials_.begin(), potentials_.end(), t, std::greater<double>());
    if (it == potentials_.end()) return std::nullopt;
    const auto i = static_cast<std::size_t>(it - potentials_.begin());
    if (potentials_[i] == t) return points_[i];
    if (i == 0) return std::nullopt;
    const double s = std::log(potentials_[i - 1] / t) / std::log(potentials_[i - 1] / potentials_[i]);
    const cplx guess = points_[i - 1] + s * (points_[i] - points_[i - 1]);
    return solve(BoettcherEquation(f_, theta_, t, opts_.asymptotic_level), guess, opts_);
  }

  const std::vector<cplx>& points() const { return points_; }
  const std::vector<double>& potentials() const { return potentials_; }

 private:
  cplx predict(double t) const {
    const std::size_t k = points_.size();
    if (k < 2) return points_.back();
    const double s = std::log(potentials_[k - 1] / t) / std::log(potentials_[k - 2] / potentials_[k - 1]);
    const cplx a = points_[k - 2];
    const cplx b = points_[k - 1];
    // far out the ray is close to a straight radial line on which |z| grows
    // exponentially with potential; extrapolate log z there
    if (std::min(std::abs(a), std::abs(b)) > 4.0 * radius_) return b * std::pow(b / a, s);
    return b + s * (b - a);
  }

  const Polynomial& f_;
  Angle theta_;
  RayOptions opts_;
  double radius_;
  std::vector<cplx> points_;
  std::vector<double> potentials_;
};

}  // namespace

std::string_view to_string(RayKind k) {
  switch (k) {
    case RayKind::external: return "external";
    case RayKind::equipotential: return "equipotential";
    case RayKind::internal: return "internal";
  }
  return "?";
}

std::optional<cplx> external_ray_point(const Polynomial& f, const Angle& theta, double t, cplx guess,
                                       const RayOptions& opts) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "potential must be positive");
  return solve(BoettcherEquation(f, theta, t, opts.asymptotic_level), guess, opts);
}

RayPath trace_external_ray(const Polynomial& f, const Angle& theta, double potential_start,
                           double potential_end, const RayOptions& opts) {
  if (!(potential_start > potential_end) || !(potential_end > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "need potential_start > potential_end > 0");
  }
  RayPath path;
  path.kind = RayKind::external;
  path.theta = theta;

  const bool want_landing = potential_end <= opts.landing_cutoff;
  AngleOrbit orbit;
  double period_factor = 0.0;  // d^q for the eventual period q
  std::string landing_problem;
  double t0 = std::max(potential_start, opts.asymptotic_level);
  if (want_landing) {
    try {
      orbit = angle_orbit(theta, f.degree(), 64);
      period_factor = std::pow(static_cast<double>(f.degree()), orbit.period);
      // three period-spaced levels above the end are needed for extrapolation
      const double top = potential_end * period_factor * period_factor * period_factor * 1.5;
      if (top > 600.0) {
        landing_problem = "angle period too long for landing extrapolation";
      } else {
        t0 = std::max(t0, top);
      }
    } catch (const Error&) {
      landing_problem = "angle orbit longer than 64";
    }
  }

  RayWalker walker(f, theta, t0, opts);
  walker.descend(potential_start);
  const std::size_t first = walker.points().size() - 1;
  walker.descend(potential_end);

  if (want_landing && landing_problem.empty()) {
    const double p = period_factor;
    double t = potential_end;
    while (true) {
      const auto z0 = walker.point_at(t * p * p * p);
      const auto z1 = walker.point_at(t * p * p);
      const auto z2 = walker.point_at(t * p);
      const cplx z3 = walker.points().back();
      if (z0 && z1 && z2) {
        const cplx e1 = aitken(*z0, *z1, *z2);
        const cplx e2 = aitken(*z1, *z2, z3);
        // the tail must contract geometrically and both extrapolations agree
        const bool contracting = std::abs(z3 - *z2) < std::abs(*z2 - *z1) && std::abs(*z2 - *z1) < std::abs(*z1 - *z0);
        if (contracting && std::abs(e1 - e2) < 0.1 * opts.landing_tol) {
          cplx land = e2;
          if (orbit.preperiod == 0) {
            // polish on the periodic orbit; keep the estimate if Newton wanders
            cplx w = e2;
            for (int it = 0; it < 60; ++it) {
              auto [v, dv] = f.iterate_with_derivative(w, orbit.period);
              if (dv == 1.0) break;
              const cplx step = (v - w) / (dv - 1.0);
              w -= step;
              if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(w))) break;
            }
            if (std::isfinite(std::abs(w)) && std::abs(w - e2) < opts.landing_tol) land = w;
          }
          path.landed = true;
          path.landing = land;
          break;
        }
      }
      if (t <= opts.potential_floor) {
        landing_problem = "no convergence above the potential floor (slow landing, e.g. near a parabolic point)";
        break;
      }
      t = std::max(t / p, opts.potential_floor);
      walker.descend(t);
    }
  }
  if (!want_landing) {
    path.truncation = "potential_end above landing cutoff";
  } else if (!path.landed) {
    path.truncation = landing_problem;
  }

  path.points.assign(walker.points().begin() + static_cast<std::ptrdiff_t>(first), walker.points().end());
  path.parameters.assign(walker.potentials().begin() + static_cast<std::ptrdiff_t>(first),
                         walker.potentials().end());
  if (path.landed && std::abs(path.points.back() - path.landing) > 0.0) {
    // close the polyline at its landing point (potential 0)
    path.points.push_back(path.landing);
    path.parameters.push_back(0.0);
  }
  return path;
}

RayPath trace_equipotential(const Polynomial& f, double level, int samples, const RayOptions& opts) {
  if (!(level > 0.0)) throw Error(ErrorCode::InvalidArgument, "level must be positive");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
  RayPath path;
  path.kind = RayKind::equipotential;
  path.level = level;
  for (int k = 0; k < samples; ++k) {
    const Angle theta(static_cast<u128>(k), static_cast<u128>(samples));
    try {
      RayWalker walker(f, theta, std::max(level, opts.asymptotic_level), opts);
      walker.descend(level);
      path.points.push_back(walker.points().back());
      path.parameters.push_back(theta.to_double());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RayCrisis) throw;
      path.partial = true;
    }
  }
  path.truncation = path.partial ? "some sample rays failed" : "";
  return path;
}

std::optional<std::pair<cplx, cplx>> koenigs(const Polynomial& f, cplx z, int max_iterations) {
  const cplx lambda = f.coefficient(1);
  const cplx a2 = f.coefficient(2);
  const cplx b = a2 / (lambda - lambda * lambda);
  cplx w = z;
  cplx dw = 1.0;  // (f^n)'(z) / lambda^n
  cplx scale = 1.0;
  for (int n = 0; n <= max_iterations; ++n) {
    if (std::abs(w) < 1e-6) {
      return std::make_pair(scale * (w + b * w * w), dw * (1.0 + 2.0 * b * w));
    }
    const auto [v, dv] = f.evaluate_with_derivative(w);
    if (!std::isfinite(std::abs(v)) || std::abs(v) > 1e6) return std::nullopt;
    dw *= dv / lambda;
    scale /= lambda;
    w = v;
  }
  return std::nullopt;
}

RayPath trace_internal_ray(const Polynomial& f, const Raster* basin, double angle, int steps,
                           const InternalRayOptions& opts) {
  const cplx lambda = f.coefficient(1);
  if (std::abs(lambda) >= 1.0) throw Error(ErrorCode::NotAttracting, "|f'(0)| >= 1");
  if (std::abs(lambda) < 1e-12) {
    throw Error(ErrorCode::SuperattractingUnsupported, "internal rays need f'(0) != 0");
  }
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "steps must be at least 2");
  std::optional<int> origin;
  if (basin) origin = basin->origin_attractor();

  RayPath path;
  path.kind = RayKind::internal;
  path.internal_angle = angle;
  const cplx dir = std::polar(1.0, angle);

  auto newton = [&](cplx target, cplx guess) -> std::optional<cplx> {
    cplx z = guess;
    for (int it = 0; it < 60; ++it) {
      const auto k = koenigs(f, z, opts.max_iterations);
      if (!k || k->second == cplx(0.0)) return std::nullopt;
      const cplx step = (k->first - target) / k->second;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::max(1e-3, std::abs(z))) return z;
    }
    return std::nullopt;
  };

  double s = opts.start_modulus;
  auto z = newton(s * dir, s * dir);
  if (!z) throw Error(ErrorCode::NonConvergence, "Koenigs coordinate failed near 0");
  path.points.push_back(*z);
  path.parameters.push_back(s);

  double growth = opts.growth;
  int small_steps = 0;
  while (static_cast<int>(path.points.size()) < steps) {
    const double next = s * growth;
    const std::size_t k = path.points.size();
    cplx guess = path.points.back();
    if (k >= 2) {
      const double r = std::log(next / s) / std::log(s / path.parameters[k - 2]);
      guess += r * (path.points[k - 1] - path.points[k - 2]);
    }
    const auto w = newton(next * dir, guess);
    bool ok = w.has_value();
    if (ok && k >= 2) {
      const double prev = std::abs(path.points[k - 1] - path.points[k - 2]);
      ok = std::abs(*w - path.points.back()) <= 3.0 * prev + 1e-12;
    }
    if (!ok) {
      growth = std::sqrt(growth);
      if (growth - 1.0 < 1e-6) {
        path.truncation = "continuation stalled (critical value of the linearizer or basin boundary)";
        return path;
      }
      continue;
    }
    if (basin && origin) {
      if (const auto cell = basin->grid.cell_of(*w)) {
        const Cell& c = basin->at(*cell);
        const bool foreign =
            c.kind == CellKind::escaping || (c.kind == CellKind::basin && c.value != *origin);
        if (foreign) {
          const auto mask = basin->basin_mask(*origin);
          if (distance_to_mask(basin->grid, mask, *w) > 2.0 * basin->grid.cell_size()) {
            throw Error(ErrorCode::DivergedFromBasin, "internal ray left U_f(0)");
          }
          path.truncation = "reached the basin boundary at raster resolution";
          return path;
        }
      }
    }
    const double moved = std::abs(*w - path.points.back());
    path.points.push_back(*w);
    path.parameters.push_back(next);
    s = next;
    growth = std::min(opts.growth, growth * growth);
    small_steps = moved < opts.stop_tol ? small_steps + 1 : 0;
    if (small_steps >= 5) {
      path.truncation = "approached the basin boundary";
      return path;
    }
  }
  path.truncation = "step budget reached";
  return path;
}

cplx landing_point(const RayPath& path) {
  if (!path.landed) {
    throw Error(ErrorCode::NotLanded, path.truncation.empty() ? "ray did not land" : path.truncation);
  }
  return path.landing;
}

}  // namespace fatou
