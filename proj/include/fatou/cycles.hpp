#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "fatou/geometry.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

enum class CycleClass { attracting, superattracting, repelling, parabolic, irrationally_neutral };

std::string_view to_string(CycleClass c);

struct MultiplierTolerances {
  double neutral = 1e-6;         // | |lambda| - 1 | below this counts as neutral
  double root_of_unity = 1e-6;   // |lambda^q - 1| below this for some q
  int max_rotation_denominator = 64;
  double superattracting = 1e-9;
};

struct CycleRecord {
  int period = 1;
  std::vector<cplx> points;
  cplx multiplier{0.0, 0.0};
  CycleClass cls = CycleClass::repelling;
  /// Smallest q with multiplier^q == 1 (parabolic cycles only).
  int rotation_denominator = 0;
  std::optional<cplx> resit;
};

/// Classifies a multiplier; rotation_denominator receives q for parabolic.
CycleClass classify_multiplier(cplx lambda, const MultiplierTolerances& tol = {},
                               int* rotation_denominator = nullptr);

struct CycleSearchOptions {
  int lattice = 24;             // seeds per box side
  int newton_iterations = 120;
  double dedup_distance = 1e-8;
  double residual = 1e-9;       // accept |f^p(z) - z| below this (relative)
  MultiplierTolerances tolerances{};
  bool compute_resit = true;
  /// Extra Newton seeds tried before the lattice (e.g. late critical iterates).
  std::vector<cplx> seeds;
};

/// Best-effort search for all cycles of period <= max_period by Newton's
/// method on f^p(z) - z from a seed lattice in the box.  Each cycle appears
/// once, labelled with its exact period.
std::vector<CycleRecord> find_cycles(const Polynomial& f, int max_period, const Box& search_box,
                                     const CycleSearchOptions& opts = {});

/// Builds the record of the cycle through z (period p, polished).
CycleRecord make_cycle(const Polynomial& f, cplx z, int period,
                       const MultiplierTolerances& tol = {});

/// Number of zeros of g inside the circle |z - center| = radius
/// (argument principle on `samples` trapezoid nodes).
double count_zeros(const std::function<std::pair<cplx, cplx>(cplx)>& g_with_derivative,
                   cplx center, double radius, int samples = 256);

struct ResitOptions {
  double start_radius = 1e-2;
  double min_radius = 1e-9;
  int samples = 256;
  MultiplierTolerances tolerances{};
};

/// Residu iteratif of a multiplier-one cycle, from the fixed-point index
/// (1/2 pi i) \oint dz / (z - f^p(z)) on a small circle.  Throws NotParabolic
/// or IllConditioned.
cplx residu_iteratif(const Polynomial& f, const CycleRecord& cycle, const ResitOptions& opts = {});

enum class ParabolicCharacter { attracting, repelling, indeterminate };
std::string_view to_string(ParabolicCharacter c);

/// Sign of Re(resit): negative means parabolic-attracting.  |Re| <= tol is
/// reported as indeterminate.
ParabolicCharacter parabolic_character(cplx resit, double tol = 1e-9);

/// Taylor coefficients c_0..c_{count-1} of g around center from Cauchy
/// integrals on a circle of the given radius.
std::vector<cplx> taylor_coefficients(const std::function<cplx(cplx)>& g, cplx center,
                                      double radius, int count, int samples = 128);

}  // namespace fatou
