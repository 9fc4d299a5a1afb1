#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "fatou/cycles.hpp"
#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/rays.hpp"

using namespace fatou;

namespace {

double radial_deviation(const RayPath& p, double arg) {
  const cplx dir = std::polar(1.0, arg);
  double worst = 0.0;
  for (cplx z : p.points) worst = std::max(worst, std::abs((z * std::conj(dir)).imag()));
  return worst;
}

/// Max |f(z_k) - w_k| over points of the two rays at matched potentials d t_k.
double equivariance_error(const Polynomial& f, const RayPath& ray, const RayPath& image, int* matched) {
  std::map<double, cplx> by_potential;
  for (std::size_t i = 0; i < image.points.size(); ++i) by_potential[image.parameters[i]] = image.points[i];
  double worst = 0.0;
  *matched = 0;
  for (std::size_t i = 0; i < ray.points.size(); ++i) {
    const double t = ray.parameters[i] * f.degree();
    auto it = by_potential.lower_bound(t * (1 - 1e-12));
    if (it == by_potential.end() || std::abs(it->first - t) > 1e-12 * t) continue;
    ++*matched;
    worst = std::max(worst, std::abs(f(ray.points[i]) - it->second));
  }
  return worst;
}

}  // namespace

TEST_CASE("external rays of z^3 are radial") {
  const Polynomial f = Polynomial::power(3);
  const RayPath r = trace_external_ray(f, Angle(1, 8), 3.0, 1e-3);
  CHECK(r.points.size() > 10);
  CHECK(radial_deviation(r, M_PI / 4) < 1e-6);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    CHECK(std::abs(std::log(std::abs(r.points[i])) - r.parameters[i]) < 1e-9);
    if (i > 0) CHECK(r.parameters[i] < r.parameters[i - 1]);
  }
  CHECK_FALSE(r.landed);
  CHECK_THROWS_AS(landing_point(r), Error);
  CHECK_THROWS_AS(trace_external_ray(f, Angle(0, 1), 1.0, 2.0), Error);
}

TEST_CASE("rays of z^3 land at the fixed points") {
  const Polynomial f = Polynomial::power(3);
  const RayPath r0 = trace_external_ray(f, Angle(0, 1), 2.0, 1e-8);
  REQUIRE(r0.landed);
  CHECK(std::abs(landing_point(r0) - 1.0) < 1e-9);
  CHECK(std::abs(r0.points.back() - 1.0) < 1e-5);
  const RayPath r1 = trace_external_ray(f, Angle(1, 2), 2.0, 1e-8);
  REQUIRE(r1.landed);
  CHECK(std::abs(landing_point(r1) + 1.0) < 1e-9);
}

TEST_CASE("ray 0 of f_{c=1} lands at the golden-ratio fixed point") {
  const Polynomial f = family_fc(1.0);
  // z^4 - 2z^2 = z  <=>  z (z + 1)(z^2 - z - 1) = 0
  const double beta = (1.0 + std::sqrt(5.0)) / 2.0;
  const RayPath r = trace_external_ray(f, Angle(0, 1), 3.0, 1e-8);
  REQUIRE(r.landed);
  CHECK(std::abs(r.landing - beta) < 1e-9);
  const auto cycles = find_cycles(f, 1, Box::square(0.0, 4.0));
  bool matched = false;
  for (const auto& c : cycles) matched |= std::abs(c.points.front() - r.landing) < 1e-6;
  CHECK(matched);
}

TEST_CASE("basilica alpha point receives the rays 1/3 and 2/3 of z^2-1") {
  // f_{c=1} = g o g with g = z^2 - 1 shares its Boettcher map with g, and the
  // g-rays 1/3, 2/3 landing at alpha are fixed under multiplication by 4
  const Polynomial f = family_fc(1.0);
  const double alpha = (1.0 - std::sqrt(5.0)) / 2.0;
  for (const Angle& a : {Angle(1, 3), Angle(2, 3)}) {
    const RayPath r = trace_external_ray(f, a, 3.0, 1e-8);
    REQUIRE(r.landed);
    CHECK(std::abs(r.landing - alpha) < 1e-8);
  }
}

TEST_CASE("ray equivariance under f") {
  std::mt19937_64 rng(23);
  for (const Polynomial& f : {Polynomial::power(3), family_fc(1.0)}) {
    const auto d = static_cast<std::uint64_t>(f.degree());
    for (int i = 0; i < 20; ++i) {
      const std::uint64_t den = 2 + rng() % 60;
      const Angle theta(rng() % den, den);
      const RayPath ray = trace_external_ray(f, theta, 2.0, 1e-4);
      const RayPath image = trace_external_ray(f, theta.times(d), 2.0 * d, 1e-4 * d);
      int matched = 0;
      CHECK(equivariance_error(f, ray, image, &matched) < 1e-6);
      CHECK(matched > static_cast<int>(ray.points.size()) / 2);
    }
  }
}

TEST_CASE("landing points of periodic angle cycles are periodic orbits") {
  const Polynomial f(3, {0.5, 0.0});  // 0.5 z + z^3
  for (const auto& cyc : periodic_angles(3, 2)) {
    std::vector<cplx> lands;
    for (const auto& a : cyc) {
      const RayPath r = trace_external_ray(f, a, 3.0, 1e-8);
      REQUIRE(r.landed);
      lands.push_back(r.landing);
    }
    CHECK(std::abs(f(lands[0]) - lands[1]) < 1e-6);
    CHECK(std::abs(f(lands[1]) - lands[0]) < 1e-6);
  }
  // 1/4 and 3/4 land on the boundary 2-cycle +-i sqrt(1.5)
  const RayPath q = trace_external_ray(f, Angle(1, 4), 3.0, 1e-8);
  REQUIRE(q.landed);
  CHECK(std::abs(q.landing - cplx(0.0, std::sqrt(1.5))) < 1e-8);
}

TEST_CASE("equipotentials") {
  const Polynomial f = Polynomial::power(3);
  const RayPath c = trace_equipotential(f, std::log(2.0), 64);
  REQUIRE(c.points.size() == 64);
  for (cplx z : c.points) CHECK(std::abs(std::abs(z) - 2.0) < 1e-6);
  const RayPath four = trace_equipotential(f, std::log(2.0), 4);
  const cplx expect[] = {2.0, cplx(0.0, 2.0), -2.0, cplx(0.0, -2.0)};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(four.points[static_cast<std::size_t>(k)] - expect[k]) < 1e-9);

  const Polynomial g = family_fc(cplx(0.7, 0.4));
  const RayPath big = trace_equipotential(g, 5.0, 32);
  CHECK_FALSE(big.partial);
  for (cplx z : big.points) CHECK(std::abs(std::abs(z) / std::exp(5.0) - 1.0) < 0.1);
}

TEST_CASE("internal rays in the basin of an attracting fixed point") {
  const Polynomial f(3, {0.5, 0.0});
  const RayPath r = trace_internal_ray(f, nullptr, 0.0, 600);
  REQUIRE(r.points.size() > 50);
  double last = 0.0;
  for (cplx z : r.points) {
    CHECK(std::abs(z.imag()) < 1e-9);
    CHECK(z.real() > last);
    last = z.real();
  }
  CHECK(last > 0.6);
  CHECK(last < std::sqrt(0.5));
  const RayPath again = trace_internal_ray(f, nullptr, 2.0 * M_PI, 600);
  REQUIRE(again.points.size() == r.points.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) CHECK(std::abs(again.points[i] - r.points[i]) < 1e-9);

  CHECK_THROWS_AS(trace_internal_ray(Polynomial::power(3), nullptr, 0.0, 10), Error);
  CHECK_THROWS_AS(trace_internal_ray(Polynomial(3, {1.5, 0.0}), nullptr, 0.0, 10), Error);
  try {
    trace_internal_ray(family_fc(1.0), nullptr, 0.0, 10);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SuperattractingUnsupported);
  }
}
