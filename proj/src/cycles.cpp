#include "fatou/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fatou/error.hpp"

namespace fatou {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::pair<cplx, cplx> fixed_point_equation(const Polynomial& f, int period, cplx z) {
  auto [w, dw] = f.iterate_with_derivative(z, period);
  return {w - z, dw - 1.0};
}

/// Centroid of the zeros of g inside the circle, weighted by multiplicity.
cplx zero_centroid(const std::function<std::pair<cplx, cplx>(cplx)>& g, cplx center, double radius,
                   double count, int samples) {
  cplx acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const cplx e = std::polar(1.0, kTwoPi * k / samples);
    const cplx z = center + radius * e;
    auto [v, dv] = g(z);
    acc += z * dv / v * radius * e;
  }
  return acc / static_cast<double>(samples) / count;
}

bool near_integer(double x, double tol = 0.02) { return std::abs(x - std::round(x)) < tol; }

void rotate_to_canonical(std::vector<cplx>& pts) {
  auto less = [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  auto it = std::min_element(pts.begin(), pts.end(), less);
  std::rotate(pts.begin(), it, pts.end());
}

}  // namespace

std::string_view to_string(CycleClass c) {
  switch (c) {
    case CycleClass::attracting: return "attracting";
    case CycleClass::superattracting: return "superattracting";
    case CycleClass::repelling: return "repelling";
    case CycleClass::parabolic: return "parabolic";
    case CycleClass::irrationally_neutral: return "irrationally-neutral";
  }
  return "unknown";
}

std::string_view to_string(ParabolicCharacter c) {
  switch (c) {
    case ParabolicCharacter::attracting: return "attracting";
    case ParabolicCharacter::repelling: return "repelling";
    case ParabolicCharacter::indeterminate: return "indeterminate";
  }
  return "unknown";
}

CycleClass classify_multiplier(cplx lambda, const MultiplierTolerances& tol, int* rotation_denominator) {
  const double m = std::abs(lambda);
  if (rotation_denominator) *rotation_denominator = 0;
  if (m < tol.superattracting) return CycleClass::superattracting;
  if (m < 1.0 - tol.neutral) return CycleClass::attracting;
  if (m > 1.0 + tol.neutral) return CycleClass::repelling;
  cplx power = 1.0;
  for (int q = 1; q <= tol.max_rotation_denominator; ++q) {
    power *= lambda;
    if (std::abs(power - 1.0) < tol.root_of_unity) {
      if (rotation_denominator) *rotation_denominator = q;
      return CycleClass::parabolic;
    }
  }
  return CycleClass::irrationally_neutral;
}

double count_zeros(const std::function<std::pair<cplx, cplx>(cplx)>& g, cplx center, double radius,
                   int samples) {
  cplx acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const cplx e = std::polar(1.0, kTwoPi * k / samples);
    auto [v, dv] = g(center + radius * e);
    acc += dv / v * radius * e;
  }
  return (acc / static_cast<double>(samples)).real();
}

std::vector<cplx> taylor_coefficients(const std::function<cplx(cplx)>& g, cplx center, double radius,
                                      int count, int samples) {
  std::vector<cplx> c(static_cast<std::size_t>(count), cplx(0.0));
  for (int k = 0; k < samples; ++k) {
    const double theta = kTwoPi * k / samples;
    const cplx v = g(center + std::polar(radius, theta));
    for (int j = 0; j < count; ++j) c[static_cast<std::size_t>(j)] += v * std::polar(1.0, -j * theta);
  }
  for (int j = 0; j < count; ++j) {
    c[static_cast<std::size_t>(j)] /= static_cast<double>(samples) * std::pow(radius, j);
  }
  return c;
}

CycleRecord make_cycle(const Polynomial& f, cplx z, int period, const MultiplierTolerances& tol) {
  CycleRecord rec;
  rec.period = period;
  rec.points.reserve(static_cast<std::size_t>(period));
  cplx w = z;
  cplx lambda = 1.0;
  for (int i = 0; i < period; ++i) {
    rec.points.push_back(w);
    auto [v, dv] = f.evaluate_with_derivative(w);
    lambda *= dv;
    w = v;
  }
  rec.multiplier = lambda;
  rec.cls = classify_multiplier(lambda, tol, &rec.rotation_denominator);
  rotate_to_canonical(rec.points);
  return rec;
}

std::vector<CycleRecord> find_cycles(const Polynomial& f, int max_period, const Box& box,
                                     const CycleSearchOptions& opts) {
  if (max_period < 1) throw Error(ErrorCode::InvalidArgument, "max_period must be >= 1");
  const double escape = std::max(3.0, 2.0 * (1.0 + f.free_coefficient_norm()));
  std::vector<CycleRecord> found;

  auto already_known = [&](cplx z, int period) {
    for (const auto& c : found) {
      if (c.period != period) continue;
      for (const cplx& p : c.points) {
        if (std::abs(p - z) < opts.dedup_distance) return true;
      }
    }
    return false;
  };

  for (int p = 1; p <= max_period; ++p) {
    auto g = [&](cplx z) { return fixed_point_equation(f, p, z); };
    std::vector<cplx> starts = opts.seeds;
    for (int iy = 0; iy < opts.lattice; ++iy) {
      for (int ix = 0; ix < opts.lattice; ++ix) {
        starts.emplace_back(box.left() + (ix + 0.5) * box.width / opts.lattice,
                            box.bottom() + (iy + 0.5) * box.height / opts.lattice);
      }
    }
    for (const cplx seed : starts) {
      {
        cplx z = seed;
        bool ok = false;
        for (int it = 0; it < opts.newton_iterations; ++it) {
          if (std::abs(z) > escape) break;
          auto [v, dv] = g(z);
          if (std::abs(v) <= opts.residual * (1.0 + std::abs(z))) {
            ok = true;
            break;
          }
          if (dv == cplx(0.0)) break;
          cplx step = v / dv;
          const double cap = std::max(1.0, std::abs(z));
          if (std::abs(step) > cap) step *= cap / std::abs(step);
          z -= step;
        }
        if (!ok) continue;

        if (std::abs(g(z).second) >= 1e-3) {
          for (int it = 0; it < 3; ++it) {
            auto [v, dv] = g(z);
            if (v == cplx(0.0)) break;
            z -= v / dv;
          }
        } else {
          // Multiple root (parabolic point): refine by a contour centroid.
          for (double r = 1e-3; r > 1e-9; r *= 0.25) {
            const double n1 = count_zeros(g, z, r, 128);
            const double n2 = count_zeros(g, z, 2.0 * r, 128);
            if (near_integer(n1) && std::lround(n1) == std::lround(n2) && std::lround(n1) >= 1) {
              z = zero_centroid(g, z, r, std::round(n1), 128);
              break;
            }
          }
        }

        int exact = p;
        for (int q = 1; q < p; ++q) {
          if (p % q != 0) continue;
          if (std::abs(f.iterate(z, q) - z) <= 1e-7 * (1.0 + std::abs(z))) {
            exact = q;
            break;
          }
        }
        if (already_known(z, exact)) continue;
        found.push_back(make_cycle(f, z, exact, opts.tolerances));
      }
    }
  }

  if (opts.compute_resit) {
    for (auto& c : found) {
      if (c.cls == CycleClass::parabolic && c.rotation_denominator == 1) {
        try {
          c.resit = residu_iteratif(f, c);
        } catch (const Error&) {
        }
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const CycleRecord& a, const CycleRecord& b) {
    if (a.period != b.period) return a.period < b.period;
    const cplx za = a.points.front();
    const cplx zb = b.points.front();
    if (za.real() != zb.real()) return za.real() < zb.real();
    return za.imag() < zb.imag();
  });
  return found;
}

cplx residu_iteratif(const Polynomial& f, const CycleRecord& cycle, const ResitOptions& opts) {
  int q = 0;
  const CycleClass cls = classify_multiplier(cycle.multiplier, opts.tolerances, &q);
  if (cls != CycleClass::parabolic || q != 1) {
    throw Error(ErrorCode::NotParabolic, "multiplier is not 1 within tolerance");
  }
  const int p = cycle.period;
  const cplx center = cycle.points.front();
  auto g = [&](cplx z) { return fixed_point_equation(f, p, z); };

  // Nearby fixed points of f^p can sit inside the first stable contour; keep
  // shrinking and use the largest stable radius of the smallest count.
  double best_r = 0.0;
  long best_m = 0;
  for (double r = opts.start_radius; r >= opts.min_radius; r *= 0.5) {
    const double inner = count_zeros(g, center, r, opts.samples);
    const double outer = count_zeros(g, center, 2.0 * r, opts.samples);
    const long m = std::lround(inner);
    if (!near_integer(inner, 1e-3) || m != std::lround(outer) || m < 2) continue;
    if (best_m == 0 || m < best_m) {
      best_m = m;
      best_r = r;
    }
    if (m == 2) break;
  }
  if (best_m != 0) {
    const double r = best_r;
    // fixed-point index (1/2 pi i) \oint dz / (z - f^p(z))
    cplx acc = 0.0;
    for (int k = 0; k < opts.samples; ++k) {
      const cplx e = std::polar(1.0, kTwoPi * k / opts.samples);
      acc += -r * e / g(center + r * e).first;
    }
    const cplx index = acc / static_cast<double>(opts.samples);
    return 0.5 * static_cast<double>(best_m) - index;
  }
  throw Error(ErrorCode::IllConditioned, "no isolating contour radius found");
}

ParabolicCharacter parabolic_character(cplx resit, double tol) {
  if (std::abs(resit.real()) <= tol) return ParabolicCharacter::indeterminate;
  return resit.real() < 0 ? ParabolicCharacter::attracting : ParabolicCharacter::repelling;
}

}  // namespace fatou
