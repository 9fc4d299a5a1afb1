#include <doctest.h>

#include <cmath>
#include <random>

#include "fatou/components.hpp"
#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/raster.hpp"

using namespace fatou;

TEST_CASE("grid cell round trip and orientation") {
  const Grid g(Box{cplx(1.0, -1.0), 4.0, 2.0}, 40, 20);
  CHECK(g.cell_width() == doctest::Approx(0.1));
  const cplx top_left = g.center(0, 0);
  CHECK(top_left.real() == doctest::Approx(-0.95));
  CHECK(top_left.imag() == doctest::Approx(-0.05));
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK(*g.cell_of(g.center(i)) == i);
  CHECK_FALSE(g.cell_of(cplx(10.0, 0.0)).has_value());
  CHECK_THROWS_AS(Grid(Box{}, 4, 4), Error);
}

TEST_CASE("green function of power maps") {
  for (int d : {2, 3, 5}) {
    const Polynomial f = Polynomial::power(d);
    for (double r : {1.5, 2.0, 10.0}) {
      CHECK(green_function(f, std::polar(r, 0.3)) == doctest::Approx(std::log(r)).epsilon(1e-12));
    }
    CHECK(green_function(f, 0.5) == 0.0);
  }
}

TEST_CASE("green function is equivariant") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Polynomial f(3, {cplx(u(rng), u(rng)) * 0.3, cplx(u(rng), u(rng)) * 0.3});
    const cplx z(2.0 + u(rng), u(rng));
    const double g = green_function(f, z);
    if (g <= 0.0) continue;
    CHECK(green_function(f, f(z)) == doctest::Approx(3.0 * g).epsilon(1e-9));
  }
}

TEST_CASE("escape radius") {
  CHECK(escape_radius(Polynomial::power(3)) == 3.0);
  CHECK(escape_radius(Polynomial(3, {2.0, 0.0})) == 6.0);
  CHECK(escape_time(Polynomial::power(2), 4.0, 10, 3.0) == 0);
  CHECK(escape_time(Polynomial::power(2), 0.5, 10, 3.0) == -1);
}

TEST_CASE("filled julia set of z^2 is the unit disk") {
  const Raster r = classify_grid(Polynomial::power(2), Box::square(0.0, 3.0), 300, 300);
  const auto bounded = r.bounded_mask();
  const auto m = mask_metrics(r.grid, bounded);
  CHECK(std::abs(m.area - M_PI) / M_PI < 0.05);
  CHECK(std::abs(m.diameter - 2.0) < 4 * r.grid.cell_size());
  REQUIRE(r.origin_attractor().has_value());
  // every bounded cell of z^2 lies in the basin of 0
  CHECK(count(r.basin_mask(*r.origin_attractor())) == count(bounded));
}

TEST_CASE("basilica layer of f_{c=1}") {
  const Polynomial f = family_fc(1.0);
  const Raster r = classify_grid(f, Box::square(0.0, 3.6), 240, 240);
  REQUIRE(r.origin_attractor().has_value());
  bool has_minus_one = false;
  for (const auto& a : r.attractors) {
    for (cplx p : a.cycle.points) has_minus_one |= std::abs(p + 1.0) < 1e-9;
  }
  CHECK(has_minus_one);
  // f_{c=1} = g o g with g(z) = z^2 - 1, so K(f) = K(g) (basilica): symmetric under z -> -z
  const auto bounded = r.bounded_mask();
  std::int64_t mismatch = 0;
  for (std::size_t i = 0; i < bounded.size(); ++i) {
    const std::size_t j = r.grid.index(r.grid.nx() - 1 - r.grid.ix(i), r.grid.ny() - 1 - r.grid.iy(i));
    mismatch += bounded[i] != bounded[j];
  }
  CHECK(mismatch < count(bounded) / 100);
  const auto cell = *r.grid.cell_of(cplx(1.0, 0.05));
  CHECK(r.at(cell).kind == CellKind::basin);
}

TEST_CASE("parabolic basins of f_{a=1/2} get captured") {
  const Polynomial f = family_fa(0.5);
  const Raster r = classify_grid(f, Box::square(cplx(0.3, 0.0), 3.0), 120, 120);
  bool parabolic = false;
  for (const auto& a : r.attractors) parabolic |= a.parabolic;
  CHECK(parabolic);
  std::int64_t bounded = 0;
  std::int64_t basin = 0;
  for (const auto& c : r.cells) {
    bounded += c.kind == CellKind::bounded;
    basin += c.kind == CellKind::basin;
  }
  CHECK(basin > 0);
  CHECK(bounded < basin / 20);
}

TEST_CASE("components, adjacency and metrics") {
  const Grid g(Box::square(0.0, 10.0), 100, 100);
  Mask m(g.size(), 0);
  // disk of radius 2 at -2.5 and a square at +2.5 separated by one empty column from a bar
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx z = g.center(i);
    if (std::abs(z + 2.5) < 2.0) m[i] = 1;
    if (std::abs(z.real() - 2.5) < 1.0 && std::abs(z.imag()) < 1.0) m[i] = 1;
    if (z.real() > 3.6 && z.real() < 3.9 && std::abs(z.imag()) < 0.5) m[i] = 1;
  }
  const auto map = label_components(g, m);
  REQUIRE(map.count == 3);
  const int disk = component_of(map, cplx(-2.5, 0.0));
  const int square = component_of(map, cplx(2.5, 0.0));
  const int bar = component_of(map, cplx(3.7, 0.0));
  CHECK(map.adjacency[static_cast<std::size_t>(square)] == std::vector<int>{bar});
  CHECK(map.adjacency[static_cast<std::size_t>(disk)].empty());
  const auto dm = region_metrics(map, disk);
  CHECK(std::abs(dm.area - 4.0 * M_PI) / (4.0 * M_PI) < 0.05);
  CHECK(std::abs(dm.diameter - 4.0) < 4 * g.cell_size());
  CHECK(component_of(map, cplx(0.0, 4.0)) == ComponentMap::kNone);
  CHECK_THROWS_AS(region_metrics(map, 7), Error);
  CHECK_THROWS_AS(component_of(map, cplx(50.0, 0.0)), Error);

  const auto grown = dilate(g, m, 1);
  CHECK(label_components(g, grown, 0).count == 2);
  const auto back = erode(g, grown, 1);
  CHECK(count(back) >= count(m) - 10);
  CHECK(distance_to_mask(g, m, cplx(0.0, 4.0)) > 2.0);
}

TEST_CASE("point set diameter") {
  std::vector<cplx> pts;
  for (int k = 0; k < 360; ++k) pts.push_back(std::polar(1.5, k * M_PI / 180.0));
  pts.emplace_back(0.1, 0.2);
  CHECK(point_set_diameter(pts) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(point_set_diameter({cplx(0.0)}) == 0.0);
  CHECK(point_set_diameter({cplx(0.0), cplx(3.0, 4.0), cplx(1.0, 1.0), cplx(2.0, 2.0)}) == doctest::Approx(5.0));
}

TEST_CASE("raster calibration at 512^2") {
  // z^3: K is the closed unit disk
  const Raster cube = classify_grid(Polynomial::power(3), Box::square(0.0, 3.0), 512, 512);
  const double area = mask_metrics(cube.grid, cube.bounded_mask()).area;
  CHECK(std::abs(area - M_PI) / M_PI < 0.02);

  // f_{c=1}: the basins of 0 and of -1 both hold more than 1% of the cells
  const Polynomial f = family_fc(1.0);
  const Raster r = classify_grid(f, Box::square(0.0, 4.0), 512, 512);
  int basins = 0;
  for (std::size_t a = 0; a < r.attractors.size(); ++a) {
    const auto n = count(r.basin_mask(static_cast<int>(a)));
    if (static_cast<double>(n) > 0.01 * static_cast<double>(r.grid.size())) ++basins;
  }
  CHECK(basins == 2);
  // G(z) = log|z| + (1/4) log|1 - 2/z^2| + (1/16) log|f(z)^-4 f(f(z))| + ...; the third term is ~1e-9 at z = 10
  CHECK(std::abs(green_function(f, 10.0) - std::log(10.0) - 0.25 * std::log(0.98)) < 1e-8);
}
