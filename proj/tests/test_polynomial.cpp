#include <doctest.h>

#include <cmath>
#include <random>

#include "fatou/cycles.hpp"
#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/roots.hpp"

using namespace fatou;

namespace {

cplx naive_eval(const Polynomial& f, cplx z) {
  cplx s = std::pow(z, f.degree());
  for (int k = 1; k < f.degree(); ++k) s += f.coefficient(k) * std::pow(z, k);
  return s;
}

/// Taylor coefficients of f around a via exact binomial re-expansion.
std::vector<cplx> shifted_coefficients(const Polynomial& f, cplx a) {
  const auto c = f.ascending();
  const int d = f.degree();
  std::vector<cplx> out(static_cast<std::size_t>(d) + 1, 0.0);
  for (int k = 0; k <= d; ++k) {
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      out[static_cast<std::size_t>(j)] += c[static_cast<std::size_t>(k)] * binom * std::pow(a, k - j);
      binom = binom * (k - j) / (j + 1);
    }
  }
  return out;
}

bool contains_point(const CriticalSet& s, cplx z, double tol) {
  for (const auto& p : s.points) {
    if (std::abs(p.z - z) < tol) return true;
  }
  return false;
}

const CycleRecord* find_fixed(const std::vector<CycleRecord>& cycles, cplx z, double tol = 1e-6) {
  for (const auto& c : cycles) {
    if (c.period == 1 && std::abs(c.points.front() - z) < tol) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("evaluate matches the naive power sum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(2, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = deg(rng);
    std::vector<cplx> a;
    for (int k = 1; k < d; ++k) a.emplace_back(u(rng), u(rng));
    const Polynomial f(d, a);
    const cplx z(u(rng), u(rng));
    CHECK(std::abs(f(z) - naive_eval(f, z)) <= 1e-12 * std::pow(1.0 + std::abs(z), d) * (1.0 + f.free_coefficient_norm()));
    CHECK(f(0.0) == cplx(0.0));
    CHECK(f.derivative(0.0) == f.coefficient(1));
  }
}

TEST_CASE("evaluate basic values") {
  CHECK(Polynomial::power(3)(2.0) == cplx(8.0));
  const Polynomial f1 = family_fc(1.0);
  CHECK(std::abs(f1.coefficient(2) - cplx(-2.0)) < 1e-15);
  CHECK(std::abs(f1.coefficient(3)) < 1e-15);
  CHECK(std::abs(f1(1.0) - cplx(-1.0)) < 1e-15);
}

TEST_CASE("polynomial construction errors") {
  CHECK_THROWS_AS(Polynomial(1, {}), Error);
  CHECK_THROWS_AS(Polynomial(3, {1.0}), Error);
}

TEST_CASE("critical points of z^3 and f_{c=1}") {
  const auto cz = critical_points(Polynomial::power(3));
  REQUIRE(cz.points.size() == 1);
  CHECK(cz.points[0].z == cplx(0.0));
  CHECK(cz.points[0].multiplicity == 2);

  const auto c1 = critical_points(family_fc(1.0));
  CHECK(c1.total_multiplicity() == 3);
  CHECK(contains_point(c1, 0.0, 1e-12));
  CHECK(contains_point(c1, 1.0, 1e-12));
  CHECK(contains_point(c1, -1.0, 1e-12));
  CHECK(std::abs(fc_free_critical(1.0) - cplx(-1.0)) < 1e-15);
}

TEST_CASE("critical points of generic polynomials sum to d-1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int d = 2; d <= 12; ++d) {
    std::vector<cplx> a;
    for (int k = 1; k < d; ++k) a.emplace_back(u(rng), u(rng));
    const auto s = critical_points(Polynomial(d, a));
    CHECK(s.total_multiplicity() == d - 1);
  }
  // (z - 1)^3 structure: f = z^4 - 4z^3 + 6z^2 - 4z has f' = 4(z-1)^3
  const auto triple = critical_points(Polynomial(4, {-4.0, 6.0, -4.0}));
  REQUIRE(triple.points.size() == 1);
  CHECK(triple.points[0].multiplicity == 3);
  CHECK(std::abs(triple.points[0].z - 1.0) < 1e-9);
}

TEST_CASE("f_c family identities on random parameters") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.8, 1.8);
  int tested = 0;
  while (tested < 100) {
    const cplx c(u(rng), u(rng));
    if (std::abs(c) < 0.2 || std::abs(c * c * c - 2.0) < 0.2) continue;
    const cplx cp = fc_free_critical(c);
    if (std::abs(cp - c) < 1e-2 || std::abs(cp) < 1e-2) continue;
    ++tested;
    const Polynomial f = family_fc(c);
    CHECK(std::abs(f(f(c)) - f(c)) < 1e-9);
    const auto s = critical_points(f);
    CHECK(s.total_multiplicity() == 3);
    CHECK(contains_point(s, 0.0, 1e-9));
    CHECK(contains_point(s, c, 1e-9));
    CHECK(contains_point(s, cp, 1e-9));
  }
  CHECK_THROWS_AS(family_fc(0.0), Error);
  CHECK_THROWS_AS(family_fc(std::cbrt(2.0)), Error);
}

TEST_CASE("f_a family identities on random parameters") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    cplx a(u(rng), u(rng));
    if (std::abs(a) < 0.1) a += 0.5;
    const Polynomial f = family_fa(a);
    CHECK(std::abs(f(a) - a) < 1e-10);
    CHECK(std::abs(f.derivative(a) - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(family_fa(0.0), Error);
}

TEST_CASE("f_a has a triple fixed point when a^3 = 1") {
  const cplx omega = std::polar(1.0, 2.0 * M_PI / 3.0);
  for (cplx a : {cplx(1.0), omega, std::conj(omega)}) {
    const Polynomial f = family_fa(a);
    auto g = [&](cplx z) { return std::make_pair(f(z) - z, f.derivative(z) - 1.0); };
    CHECK(count_zeros(g, a, 1e-3) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_THROWS_AS(fa_resit_closed_form(a), Error);
  }
}

TEST_CASE("multiplier classification") {
  CHECK(classify_multiplier(0.0) == CycleClass::superattracting);
  CHECK(classify_multiplier(0.5) == CycleClass::attracting);
  CHECK(classify_multiplier(3.0) == CycleClass::repelling);
  int q = 0;
  CHECK(classify_multiplier(1.0, {}, &q) == CycleClass::parabolic);
  CHECK(q == 1);
  CHECK(classify_multiplier(std::polar(1.0, 2.0 * M_PI * 2.0 / 5.0), {}, &q) == CycleClass::parabolic);
  CHECK(q == 5);
  CHECK(classify_multiplier(std::polar(1.0, 2.0 * M_PI * (std::sqrt(5.0) - 1.0) / 2.0)) ==
        CycleClass::irrationally_neutral);
}

TEST_CASE("find_cycles on z^3") {
  const auto cycles = find_cycles(Polynomial::power(3), 1, Box::square(0.0, 4.0));
  REQUIRE(cycles.size() == 3);
  const auto* zero = find_fixed(cycles, 0.0);
  REQUIRE(zero);
  CHECK(zero->cls == CycleClass::superattracting);
  for (cplx z : {cplx(1.0), cplx(-1.0)}) {
    const auto* c = find_fixed(cycles, z);
    REQUIRE(c);
    CHECK(c->cls == CycleClass::repelling);
    CHECK(std::abs(c->multiplier - 3.0) < 1e-9);
  }
}

TEST_CASE("find_cycles removes divisor periods and keeps orbits") {
  const Polynomial f = Polynomial::power(3);
  const auto cycles = find_cycles(f, 2, Box::square(0.0, 3.0));
  int period2 = 0;
  for (const auto& c : cycles) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      CHECK(std::abs(f(c.points[i]) - c.points[(i + 1) % c.points.size()]) < 1e-9);
    }
    if (c.period == 2) ++period2;
  }
  // z^9 = z minus the fixed points: 6 points, 3 orbits
  CHECK(period2 == 3);
  CHECK(cycles.size() == 6);
}

TEST_CASE("find_cycles on f_{c=1} and f_a") {
  const auto c1 = find_cycles(family_fc(1.0), 1, Box::square(0.0, 4.0));
  const auto* m1 = find_fixed(c1, -1.0);
  REQUIRE(m1);
  CHECK(std::abs(m1->multiplier) < 1e-12);
  CHECK(m1->cls == CycleClass::superattracting);

  const auto ca = find_cycles(family_fa(0.5), 1, Box::square(0.0, 6.0));
  const auto* pa = find_fixed(ca, 0.5, 1e-7);
  REQUIRE(pa);
  CHECK(pa->cls == CycleClass::parabolic);
  CHECK(std::abs(pa->multiplier - 1.0) < 1e-9);
  REQUIRE(pa->resit.has_value());
}

TEST_CASE("residu iteratif matches the exact Taylor oracle and the closed form") {
  // oracle: f(a + w) = a + w + A w^2 + B w^3 + ..., resit = 1 - B / A^2
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.6, 1.6);
  int tested = 0;
  while (tested < 20) {
    const cplx a(u(rng), u(rng));
    const cplx t = a * a * a;
    if (std::abs(a) < 0.2 || std::abs(t - 1.0) < 0.1 || std::abs(t - 2.0) < 0.1) continue;
    ++tested;
    const Polynomial f = family_fa(a);
    const auto s = shifted_coefficients(f, a);
    const cplx oracle = 1.0 - s[3] / (s[2] * s[2]);
    const CycleRecord cyc = make_cycle(f, a, 1);
    const cplx got = residu_iteratif(f, cyc);
    CHECK(std::abs(got - oracle) < 1e-6);
    CHECK(std::abs(got - fa_resit_closed_form(a)) < 1e-6);
  }
}

TEST_CASE("residu iteratif at a = 1/2 and inside a figure eight") {
  const Polynomial f = family_fa(0.5);
  const cplx r = residu_iteratif(f, make_cycle(f, 0.5, 1));
  // closed form at a = 1/2: t = -7/8, 1 + 16/7 - 64/49 = 97/49
  CHECK(std::abs(r - 97.0 / 49.0) < 1e-6);
  CHECK(std::abs(97.0 / 49.0 - 1.9795918367) < 1e-10);
  CHECK(parabolic_character(r) == ParabolicCharacter::repelling);

  const Polynomial g = family_fa(0.95);
  const cplx rg = residu_iteratif(g, make_cycle(g, 0.95, 1));
  CHECK(rg.real() < 0.0);
  CHECK(parabolic_character(rg) == ParabolicCharacter::attracting);
  CHECK(parabolic_character(cplx(0.0, 2.0)) == ParabolicCharacter::indeterminate);
}

TEST_CASE("residu iteratif preconditions") {
  const Polynomial f = Polynomial::power(3);
  CHECK_THROWS_AS(residu_iteratif(f, make_cycle(f, 1.0, 1)), Error);
  // near a^3 = 1 the other fixed points crowd in, yet the radius search copes
  const cplx a = 1.0 + 1e-3;
  const Polynomial g = family_fa(a);
  const cplx r = residu_iteratif(g, make_cycle(g, a, 1));
  CHECK(std::abs(r - fa_resit_closed_form(a)) / std::abs(fa_resit_closed_form(a)) < 1e-6);
}
