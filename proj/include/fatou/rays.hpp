#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fatou/angle.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/raster.hpp"

namespace fatou {

enum class RayKind { external, equipotential, internal };
std::string_view to_string(RayKind k);

struct RayPath {
  RayKind kind = RayKind::external;
  Angle theta;                // external rays
  double level = 0.0;         // equipotentials
  double internal_angle = 0;  // internal rays (radians)
  std::vector<cplx> points;
  /// Per point: Green potential (external), Koenigs modulus (internal),
  /// angle in turns (equipotential).
  std::vector<double> parameters;

  bool landed = false;
  cplx landing{0.0, 0.0};
  /// Why the path stopped short of a landing point (empty when landed).
  std::string truncation;
  /// Equipotentials only: some sample angles failed.
  bool partial = false;
};

struct RayOptions {
  /// Largest potential ratio between consecutive points.
  double step_ratio = 0.917;  // about 2^(-1/8)
  int max_halvings = 24;
  int newton_iterations = 40;
  /// Working level of d^n t at which the Boettcher map is replaced by its
  /// two-term expansion at infinity.
  double asymptotic_level = 18.0;
  double landing_cutoff = 1e-7;
  double landing_tol = 1e-5;
  /// Deepest potential used while waiting for the path to converge.
  double potential_floor = 1e-13;
};

/// Point of potential t on the ray of angle theta, obtained by Newton from
/// `guess`.  Returns nullopt if Newton fails or converges to a neighbouring
/// ray (farther from the guess than half the local spacing of rays).
std::optional<cplx> external_ray_point(const Polynomial& f, const Angle& theta, double t, cplx guess,
                                       const RayOptions& opts = {});

/// Traces R_f(theta) from potential_start down to potential_end.  Landing is
/// attempted when potential_end <= landing_cutoff.  Throws InvalidArgument or
/// RayCrisis.
RayPath trace_external_ray(const Polynomial& f, const Angle& theta, double potential_start,
                           double potential_end, const RayOptions& opts = {});

/// Closed curve {G = level} sampled at the ray angles k / samples.
RayPath trace_equipotential(const Polynomial& f, double level, int samples,
                            const RayOptions& opts = {});

struct InternalRayOptions {
  double start_modulus = 1e-3;
  double growth = 1.03;
  int max_iterations = 4000;  // orbit length allowed to reach the linear zone
  double stop_tol = 1e-7;     // stop once steps in z fall below this
};

/// Koenigs coordinate phi(z) = lim lambda^-n f^n(z) at an attracting,
/// non-superattracting fixed point 0, with its derivative.  nullopt if the
/// orbit does not reach the linear zone within max_iterations.
std::optional<std::pair<cplx, cplx>> koenigs(const Polynomial& f, cplx z, int max_iterations = 4000);

/// Internal ray phi^-1((0, s] e^{i angle}) in the immediate basin of 0.
/// `basin`, if given, is used to detect paths leaving U_f(0).
/// Throws NotAttracting, SuperattractingUnsupported or DivergedFromBasin.
RayPath trace_internal_ray(const Polynomial& f, const Raster* basin, double angle, int steps,
                           const InternalRayOptions& opts = {});

/// Throws NotLanded for truncated paths.
cplx landing_point(const RayPath& path);

}  // namespace fatou
