#pragma once

#include <span>
#include <vector>

#include "fatou/polynomial.hpp"

namespace fatou {

struct RootOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;  // relative correction size
  /// Roots closer than this (relative to the root scale) are merged into one
  /// point with multiplicity.
  double cluster_tolerance = 1e-5;
};

struct RootsResult {
  std::vector<cplx> roots;
  int iterations = 0;
  bool converged = false;
};

/// All roots of sum c_k z^k (ascending coefficients, leading one nonzero) by
/// Aberth-Ehrlich simultaneous iteration.
RootsResult aberth_roots(std::span<const cplx> ascending, const RootOptions& opts = {});

struct MultipleRoot {
  cplx z;
  int multiplicity = 1;
};

/// Groups nearby roots and polishes each cluster with multiplicity-aware
/// Newton steps.
std::vector<MultipleRoot> cluster_roots(std::span<const cplx> ascending,
                                        std::span<const cplx> roots,
                                        const RootOptions& opts = {});

/// Crit(f) with multiplicities; residual = max |f'(point)|.
struct CriticalSet {
  std::vector<MultipleRoot> points;
  double residual = 0.0;

  int total_multiplicity() const;
};

/// Throws NonConvergence when the relative residual stays above tolerance.
CriticalSet critical_points(const Polynomial& f, const RootOptions& opts = {});

/// Horner evaluation of an ascending coefficient list with its derivative.
std::pair<cplx, cplx> horner_with_derivative(std::span<const cplx> ascending, cplx z);

}  // namespace fatou
