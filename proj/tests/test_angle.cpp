#include <doctest.h>

#include <numeric>
#include <set>

#include "fatou/angle.hpp"
#include "fatou/error.hpp"

using namespace fatou;

namespace {

// brute force: exact period of k/m under multiplication by d, or 0 if preperiodic
int naive_period(std::uint64_t k, std::uint64_t m, std::uint64_t d) {
  std::uint64_t x = k % m;
  for (int n = 1; n <= 64; ++n) {
    x = (x * d) % m;
    if (x == k % m) return n;
  }
  return 0;
}

}  // namespace

TEST_CASE("angle reduction and doubling") {
  const Angle a(3, 8);
  CHECK(a.times(3) == Angle(1, 8));
  CHECK(map_angle(Angle(1, 8), 3) == Angle(3, 8));
  CHECK(Angle(6, 4) == Angle(1, 2));
  CHECK(Angle(4, 4) == Angle(0, 1));
  CHECK(Angle::parse("2/6").to_string() == "1/3");
  CHECK(Angle::parse("0").to_string() == "0/1");
  CHECK(Angle(1, 3).to_double() == doctest::Approx(1.0 / 3.0));
  CHECK(Angle(1, 4) < Angle(1, 3));
  CHECK_THROWS_AS(Angle::parse("1/0"), Error);
  CHECK_THROWS_AS(Angle::parse("x"), Error);
  CHECK_THROWS_AS(Angle(1, Angle::kMaxDenominator + 1), Error);
}

TEST_CASE("angle multiplication agrees with naive integer arithmetic") {
  for (std::uint64_t m = 1; m < 200; ++m) {
    for (std::uint64_t k = 0; k < m; ++k) {
      for (std::uint64_t d : {2u, 3u, 4u, 7u}) {
        const Angle got = Angle(k, m).times(d);
        const std::uint64_t num = (k * d) % m;
        const std::uint64_t g = std::gcd(num, m);
        CHECK(got == Angle(num / g, m / g));
        CHECK(static_cast<std::uint64_t>(got.denominator()) == m / (g == 0 ? m : g));
      }
    }
  }
}

TEST_CASE("periodic angles for d = 3, period 2") {
  const auto cycles = periodic_angles(3, 2);
  REQUIRE(cycles.size() == 3);
  CHECK(cycles[0] == AngleCycle{Angle(1, 8), Angle(3, 8)});
  CHECK(cycles[1] == AngleCycle{Angle(1, 4), Angle(3, 4)});
  CHECK(cycles[2] == AngleCycle{Angle(5, 8), Angle(7, 8)});
}

TEST_CASE("periodic angle counts match brute force") {
  for (int d = 2; d <= 4; ++d) {
    std::uint64_t dp = 1;
    for (int p = 1; p <= 6; ++p) {
      dp *= static_cast<std::uint64_t>(d);
      if (dp > 5000) break;
      std::set<std::pair<std::uint64_t, std::uint64_t>> expect;
      for (std::uint64_t k = 0; k < dp - 1; ++k) {
        if (naive_period(k, dp - 1, static_cast<std::uint64_t>(d)) == p) {
          const std::uint64_t g = std::gcd(k, dp - 1);
          expect.emplace(k / g, (dp - 1) / g);
        }
      }
      std::set<std::pair<std::uint64_t, std::uint64_t>> got;
      for (const auto& cyc : periodic_angles(d, p)) {
        CHECK(static_cast<int>(cyc.size()) == p);
        for (const auto& t : cyc) {
          got.emplace(static_cast<std::uint64_t>(t.numerator()), static_cast<std::uint64_t>(t.denominator()));
        }
        for (std::size_t i = 0; i < cyc.size(); ++i) CHECK(cyc[i].times(d) == cyc[(i + 1) % cyc.size()]);
      }
      CHECK(got == expect);
    }
  }
  // all period-dividing-p angles number d^p - 1
  std::size_t total = 0;
  for (int p : {1, 2, 4}) {
    for (const auto& c : periodic_angles(3, p)) total += c.size();
  }
  CHECK(total == 80);
}

TEST_CASE("angle orbits") {
  auto o = angle_orbit(Angle(1, 8), 3, 64);
  CHECK(o.preperiod == 0);
  CHECK(o.period == 2);
  o = angle_orbit(Angle(1, 6), 3, 64);  // 1/6 -> 1/2 -> 1/2
  CHECK(o.preperiod == 1);
  CHECK(o.period == 1);
  o = angle_orbit(Angle(1, 9), 3, 64);  // 1/9 -> 1/3 -> 0
  CHECK(o.preperiod == 2);
  CHECK(o.period == 1);
  CHECK_THROWS_AS(angle_orbit(Angle(1, 1021), 2, 10), Error);
}

TEST_CASE("sectors") {
  const SectorSpec s(Angle(1, 8), Angle(3, 8));
  CHECK(s.contains(Angle(1, 4)));
  CHECK_FALSE(s.contains(Angle(1, 2)));
  CHECK_FALSE(s.contains(Angle(1, 8)));
  const SectorSpec wrap(Angle(7, 8), Angle(1, 8));
  CHECK(wrap.contains(Angle(0, 1)));
  CHECK(wrap.contains(Angle(15, 16)));
  CHECK_FALSE(wrap.contains(Angle(1, 2)));
}
