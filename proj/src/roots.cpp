#include "fatou/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fatou/error.hpp"

namespace fatou {

namespace {

std::vector<cplx> differentiate(std::span<const cplx> c) {
  std::vector<cplx> out;
  for (std::size_t k = 1; k < c.size(); ++k) out.push_back(static_cast<double>(k) * c[k]);
  return out;
}

double magnitude_sum(std::span<const cplx> c, double r) {
  double s = 0.0;
  double rk = 1.0;
  for (const cplx& a : c) {
    s += std::abs(a) * rk;
    rk *= r;
  }
  return s;
}

}  // namespace

std::pair<cplx, cplx> horner_with_derivative(std::span<const cplx> c, cplx z) {
  cplx p = 0.0;
  cplx dp = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp = p + z * dp;
    p = *it + z * p;
  }
  return {p, dp};
}

RootsResult aberth_roots(std::span<const cplx> ascending, const RootOptions& opts) {
  std::vector<cplx> c(ascending.begin(), ascending.end());
  while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
  if (c.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "polynomial of degree < 1 has no roots");
  }
  RootsResult result;
  // Exact zero roots are peeled off so that z^m factors are reported exactly.
  std::size_t zeros = 0;
  while (zeros < c.size() - 1 && c[zeros] == cplx(0.0)) ++zeros;
  result.roots.assign(zeros, cplx(0.0));
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));
  const cplx lead = c.back();
  for (cplx& a : c) a /= lead;
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) {
    result.converged = true;
    return result;
  }

  // Initial guesses on a circle of the Fujiwara bound radius.
  double bound = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = std::pow(std::abs(c[static_cast<std::size_t>(k)]), 1.0 / (n - k));
    bound = std::max(bound, k == 0 ? t * std::pow(0.5, 1.0 / n) : t);
  }
  bound = std::max(2.0 * bound, 1e-3);
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / n + 0.4;
    z[static_cast<std::size_t>(k)] = std::polar(0.5 * bound, ang);
  }

  for (int it = 0; it < opts.max_iterations; ++it) {
    bool done = true;
    for (int k = 0; k < n; ++k) {
      cplx& zk = z[static_cast<std::size_t>(k)];
      auto [p, dp] = horner_with_derivative(c, zk);
      if (p == cplx(0.0)) continue;
      const cplx ratio = p / dp;
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != k) sum += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
      }
      const cplx delta = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) continue;
      zk -= delta;
      if (std::abs(delta) > opts.tolerance * std::max(1.0, std::abs(zk))) done = false;
    }
    result.iterations = it + 1;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.roots.insert(result.roots.end(), z.begin(), z.end());
  return result;
}

std::vector<MultipleRoot> cluster_roots(std::span<const cplx> ascending,
                                        std::span<const cplx> roots,
                                        const RootOptions& opts) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
      if (std::abs(roots[i] - roots[j]) <= opts.cluster_tolerance * scale) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<MultipleRoot> out;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(out.size());
      out.push_back({roots[i], 1});
    } else {
      MultipleRoot& m = out[static_cast<std::size_t>(slot[r])];
      m.z = (m.z * static_cast<double>(m.multiplicity) + roots[i]) /
            static_cast<double>(m.multiplicity + 1);
      ++m.multiplicity;
    }
  }

  // A root of multiplicity m is a simple root of the (m-1)-th derivative.
  std::vector<std::vector<cplx>> derivs{std::vector<cplx>(ascending.begin(), ascending.end())};
  for (MultipleRoot& m : out) {
    while (static_cast<int>(derivs.size()) <= m.multiplicity) derivs.push_back(differentiate(derivs.back()));
    const auto& g = derivs[static_cast<std::size_t>(m.multiplicity - 1)];
    if (m.z == cplx(0.0) && !g.empty() && g.front() == cplx(0.0)) continue;
    for (int it = 0; it < 20; ++it) {
      auto [p, dp] = horner_with_derivative(g, m.z);
      if (dp == cplx(0.0)) break;
      const cplx step = p / dp;
      const cplx next = m.z - step;
      if (std::abs(horner_with_derivative(g, next).first) > std::abs(p)) break;
      m.z = next;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(m.z))) break;
    }
  }
  return out;
}

int CriticalSet::total_multiplicity() const {
  int s = 0;
  for (const auto& p : points) s += p.multiplicity;
  return s;
}

CriticalSet critical_points(const Polynomial& f, const RootOptions& opts) {
  const std::vector<cplx> df = f.derivative_ascending();
  const RootsResult raw = aberth_roots(df, opts);
  CriticalSet set;
  set.points = cluster_roots(df, raw.roots, opts);
  double worst_relative = 0.0;
  for (const auto& p : set.points) {
    const double v = std::abs(horner_with_derivative(df, p.z).first);
    set.residual = std::max(set.residual, v);
    worst_relative = std::max(worst_relative, v / magnitude_sum(df, std::abs(p.z)));
  }
  // Multiple roots lose about half the digits; the relative bound reflects that.
  if (worst_relative > 1e-8 || set.total_multiplicity() != f.degree() - 1) {
    throw Error(ErrorCode::NonConvergence,
                "critical points residual " + std::to_string(worst_relative));
  }
  return set;
}

}  // namespace fatou
