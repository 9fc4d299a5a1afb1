#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/puzzle.hpp"

using namespace fatou;

namespace {

const Polynomial& cubic() {
  static const Polynomial f(3, {0.5, 0.0});  // 0.5 z + z^3
  return f;
}

const Raster& cubic_raster() {
  static const Raster r = [] {
    ClassifyOptions o;
    o.compute_potential = true;
    return classify_grid(cubic(), Box::square(0.0, 4.0), 512, 512, o);
  }();
  return r;
}

const PuzzleGraph& cubic_graph() {
  static const PuzzleGraph g = build_graph(cubic(), cubic_raster(), 0.5, 2);
  return g;
}

const PuzzleSet& cubic_set() {
  static const PuzzleSet s(cubic(), cubic_graph(), 7);
  return s;
}

/// Points of J by backward iteration from the repelling fixed point sqrt(1/2).
std::vector<cplx> julia_samples(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<cplx> out;
  for (int s = 0; s < count; ++s) {
    cplx z = std::sqrt(0.5);
    for (int k = 0; k < 30; ++k) {
      const std::vector<cplx> asc{-z, 0.5, 0.0, 1.0};
      const auto roots = aberth_roots(asc).roots;
      z = roots[rng() % roots.size()];
    }
    out.push_back(z);
  }
  return out;
}

Mask disk_mask(const Grid& grid, cplx c, double r) {
  Mask m(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = std::abs(grid.center(i) - c) < r;
  return m;
}

}  // namespace

TEST_CASE("supercover visits a 4-connected chain of cells") {
  const Grid grid(Box::square(0.0, 4.0), 64, 64);
  for (const auto& [a, b] : {std::pair<cplx, cplx>{cplx(-1.9, -1.3), cplx(1.7, 0.9)},
                             {cplx(-1.0, 0.5), cplx(1.0, 0.5)},
                             {cplx(-1.0, -1.0), cplx(1.0, 1.0)}}) {
    std::vector<std::size_t> cells;
    supercover(grid, a, b, [&](std::size_t c) { cells.push_back(c); });
    CHECK(cells.front() == *grid.cell_of(a));
    CHECK(std::find(cells.begin(), cells.end(), *grid.cell_of(b)) != cells.end());
    Mask m(grid.size(), 0);
    for (std::size_t c : cells) m[c] = 1;
    CHECK(label_components(grid, m, 0).count == 1);
    // every sample of the segment lies in a visited cell
    for (int i = 0; i <= 1000; ++i) CHECK(m[*grid.cell_of(a + (b - a) * (i / 1000.0))]);
  }
}

TEST_CASE("puzzle graph of 0.5 z + z^3") {
  const PuzzleGraph& g = cubic_graph();
  // f(-z) = -f(z), so f(i r) = -i r gives the 2-cycle +-i sqrt(1.5)
  REQUIRE(g.cycle.period == 2);
  std::set<double> ims;
  for (cplx z : g.cycle.points) {
    CHECK(std::abs(z.real()) < 1e-9);
    CHECK(std::abs(std::abs(z.imag()) - std::sqrt(1.5)) < 1e-9);
    ims.insert(std::round(z.imag()));
  }
  CHECK(ims.size() == 2);
  CHECK(std::abs(g.cycle.multiplier) > 1.0);

  REQUIRE(g.external_tails.size() >= 2);
  for (const auto& t : g.external_tails) {
    const Angle a = t.theta;
    const bool expected = a == Angle(1, 4) || a == Angle(3, 4) || a == Angle(1, 8) || a == Angle(3, 8);
    CHECK(expected);
    REQUIRE(t.landed);
    const double d0 = std::abs(t.landing - g.cycle.points[0]);
    const double d1 = std::abs(t.landing - g.cycle.points[1]);
    CHECK(std::min(d0, d1) < 1e-6);
  }
  REQUIRE(g.internal_rays.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& arc = g.internal_rays[k];
    CHECK(std::abs(arc.points.front() - g.cycle.points[k]) < 1e-12);
    CHECK(g.omega0[*g.grid.cell_of(arc.points.back())]);
  }
  // both critical points +-i/sqrt(6) sit inside Omega_0
  for (const auto& c : g.critical) CHECK(g.omega0[*g.grid.cell_of(c.z)]);
  CHECK(g.depth0_count == 2);
  CHECK_FALSE(g.inner_curve.points.empty());
}

TEST_CASE("puzzle graph errors") {
  PuzzleOptions only_fixed;
  only_fixed.max_cycle_period = 1;
  CHECK_THROWS_AS(build_graph(cubic(), cubic_raster(), 0.5, 2, only_fixed), Error);
  try {
    build_graph(cubic(), cubic_raster(), 0.5, 2, only_fixed);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoBoundaryCycle);
  }
  const Polynomial repelling(3, {1.5, 0.0});
  const Raster r = classify_grid(repelling, Box::square(0.0, 4.0), 64, 64);
  try {
    build_graph(repelling, r, 0.5, 2);
    FAIL("expected NotAttracting");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAttracting);
  }
  // an outer equipotential beyond the box
  try {
    build_graph(cubic(), cubic_raster(), 3.0, 2);
    FAIL("expected OutOfBox");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfBox);
  }
}

TEST_CASE("depth-0 pieces partition Omega minus the graph") {
  const PuzzleGraph& g = cubic_graph();
  const PuzzleSet& set = cubic_set();
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    if (g.omega[i] && !g.cut[i]) CHECK(set.label(0, i) >= 0);
    else CHECK(set.label(0, i) < 0);
  }
  for (const auto& p : set.pieces(0)) {
    CHECK(p.touches_escaping);
    CHECK(p.touches_basin);
    CHECK(p.critical_multiplicity == 0);
  }
}

TEST_CASE("deeper pieces refine and map onto shallower ones") {
  const PuzzleSet& set = cubic_set();
  for (int n = 1; n <= set.max_depth(); ++n) {
    CHECK(set.stats(n).refinement_violations == 0);
    CHECK(set.stats(n).markov_defect < 0.01);
    for (const auto& p : set.pieces(n)) {
      CHECK(p.parent >= 0);
      CHECK(p.diameter <= set.pieces(n - 1)[static_cast<std::size_t>(p.parent)].diameter + 1e-12);
    }
  }
  // no critical point in Omega: f is a 3-fold unbranched cover over each piece
  CHECK(set.stats(1).degree_sum == 3 * set.stats(0).pieces);
  CHECK(set.stats(1).pieces == 3 * set.stats(0).pieces);
}

TEST_CASE("the z^3 smoke case cuts the plane into sectors") {
  const Polynomial f = Polynomial::power(3);
  const Raster r = classify_grid(f, Box::square(0.0, 4.0), 256, 256, {});
  const PuzzleGraph g = build_graph(f, r, 0.5, 2);
  CHECK(g.superattracting);
  CHECK(g.cycle.period == 2);
  for (cplx z : g.cycle.points) CHECK(std::abs(std::abs(z) - 1.0) < 1e-9);
  // internal arcs of z^3 are radial
  for (const auto& arc : g.internal_rays) {
    const cplx dir = arc.points.front() / std::abs(arc.points.front());
    for (cplx z : arc.points) CHECK(std::abs((z * std::conj(dir)).imag()) < 1e-6);
  }
  const PuzzleSet set(f, g, 1);
  CHECK(set.stats(0).pieces == 2);
  CHECK(set.stats(1).degree_sum == 3 * set.stats(0).pieces);
}

TEST_CASE("nests of Julia points shrink") {
  const PuzzleSet& set = cubic_set();
  const double cell = set.graph().grid.cell_size();
  int shrunk = 0;
  for (cplx z : julia_samples(12, 5)) {
    const Nest nest = set.nest(z, set.max_depth());
    REQUIRE(nest.pieces.size() == static_cast<std::size_t>(set.max_depth() + 1));
    CHECK_FALSE(nest.finite);
    CHECK_FALSE(nest.critical_nest);
    for (std::size_t n = 1; n < nest.pieces.size(); ++n) {
      CHECK(nest.pieces[n].diameter <= nest.pieces[n - 1].diameter + 1e-12);
    }
    for (int d : nest.degree_sequence) CHECK(d == 1);
    shrunk += nest.pieces.back().diameter < 3.0 * cell;
    const auto ev = bounded_degree_evidence(nest);
    CHECK(ev.witnessed);
    CHECK(ev.bound == 1);
    for (int k = 0; k + 1 < static_cast<int>(nest.pieces.size()); ++k) {
      const auto e = set.first_entry(nest, nest.pieces[static_cast<std::size_t>(k)]);
      if (e) {
        CHECK(e->r >= 1);
        CHECK(e->degree == 1);
      }
    }
  }
  CHECK(shrunk >= 10);
}

TEST_CASE("nest edge cases") {
  const PuzzleSet& set = cubic_set();
  const PuzzleGraph& g = set.graph();
  // the cycle point is on the graph
  try {
    set.nest(g.cycle.points.front(), 3);
    FAIL("expected OnGraph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OnGraph);
  }
  // an escaping point below the outer level leaves Omega
  const cplx out(1.45, 0.0);
  REQUIRE(green_function(cubic(), out) > 0.0);
  REQUIRE(green_function(cubic(), out) < 0.5);
  const Nest nest = set.nest(out, set.max_depth());
  CHECK(nest.finite);
  CHECK(nest.pieces.size() < static_cast<std::size_t>(set.max_depth() + 1));
  CHECK_THROWS_AS(set.nest(0.0, 2), Error);  // inside Omega_0
  CHECK_THROWS_AS(set.nest(out, set.max_depth() + 1), Error);
  CHECK_THROWS_AS(set.first_entry(nest, nest.pieces.back()), Error);
}

TEST_CASE("a critical nest of f_{c=1} has growing degree") {
  const Polynomial f = family_fc(1.0);
  const Raster r = classify_grid(f, Box::square(0.0, 4.0), 256, 256, {});
  const PuzzleGraph g = build_graph(f, r, 0.3, 2);
  const PuzzleSet set(f, g, 5);
  // 1 -> -1 -> -1: both critical, so deg(f^n | P_n(1)) = 2^n
  const Nest nest = set.nest(1.0, 5);
  REQUIRE(nest.pieces.size() == 6);
  CHECK(nest.critical_nest);
  for (std::size_t n = 0; n < nest.degree_sequence.size(); ++n) CHECK(nest.degree_sequence[n] == (1 << n));
  CHECK_FALSE(bounded_degree_evidence(nest).witnessed);
}

TEST_CASE("bounded degree evidence on synthetic sequences") {
  Nest n;
  n.degree_sequence = {1, 2, 2, 2, 2, 2};
  auto ev = bounded_degree_evidence(n);
  CHECK(ev.witnessed);
  CHECK(ev.bound == 2);
  CHECK(ev.depths.size() == 6);
  n.degree_sequence = {1, 2, 4, 8, 16, 32, 64};
  CHECK_FALSE(bounded_degree_evidence(n).witnessed);
  n.degree_sequence = {1, 1, 1, 1};
  CHECK_FALSE(bounded_degree_evidence(n).witnessed);
}

TEST_CASE("shape of a raster disk") {
  const Grid grid(Box::square(0.0, 2.0), 256, 256);
  const double r = 0.8;  // about 102 cells
  const double r_cells = r / grid.cell_size();
  const Mask disk = disk_mask(grid, 0.0, r);
  const cplx centre = 0.0;
  CHECK(std::abs(shape_of(grid, disk, centre) - 1.0) < 2.0 / r_cells);
  CHECK(std::abs(shape_of(grid, disk, cplx(0.5 * r, 0.0)) / 3.0 - 1.0) < 0.05);

  // 2x rescale of the same picture
  const Grid fine(Box::square(0.0, 2.0), 512, 512);
  const Mask disk2 = disk_mask(fine, 0.0, r);
  CHECK(std::abs(shape_of(fine, disk2, cplx(0.3, 0.2)) / shape_of(grid, disk, cplx(0.3, 0.2)) - 1.0) < 0.05);

  CHECK(shape_of(grid, disk, cplx(0.1, -0.4)) >= 1.0);
  CHECK_THROWS_AS(shape_of(grid, disk, cplx(0.95, 0.0)), Error);
  CHECK_THROWS_AS(shape_of(grid, disk, cplx(r, 0.0)), Error);
  const ComponentMap map = label_components(grid, disk, 0);
  CHECK(shape_of(map, 0, centre) == shape_of(grid, disk, centre));
  CHECK_THROWS_AS(shape_of(map, 3, centre), Error);
}
