#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/io.hpp"
#include "fatou/render.hpp"

using namespace fatou;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("parameter classes") {
  // f_{c=1}: the free critical point -1 is a superattracting fixed point
  CHECK(classify_parameter(Family::fc, 1.0, 200) == ParamClass::other_attracting);
  CHECK(classify_parameter(Family::fc, cplx(3.0, 3.0), 200) == ParamClass::escaping);
  CHECK(classify_parameter(Family::fc, std::cbrt(2.0), 200) == ParamClass::undecided);
  CHECK(classify_parameter(Family::fa, 0.0, 200) == ParamClass::undecided);
  CHECK(to_string(ParamClass::parabolic_adjacent) == "parabolic-adjacent");
}

TEST_CASE("resit overlay sign") {
  const ParamRaster p = classify_parameters(Family::fa, Box{{0.5, 0.0}, 0.02, 0.02}, 16, 16, 50);
  for (auto s : p.resit_sign) CHECK(s == 1);  // 97/49 > 0 at the centre
  std::vector<std::int8_t> signs;
  render_resit_map(Box{{0.95, 0.0}, 0.02, 0.02}, 16, 16, &signs);
  for (auto s : signs) CHECK(s == -1);
}

TEST_CASE("PNG output is deterministic") {
  const Polynomial f = family_fc(1.0);
  const Raster r = classify_grid(f, Box::square(0.0, 4.0), 64, 64);
  JuliaMarks marks;
  marks.critical_orbits = true;
  marks.rays.push_back(trace_external_ray(f, Angle(0, 1), 3.0, 1e-6));
  const Image img = render_julia(f, r, marks);
  CHECK(img.width == 64);
  CHECK(img.get(32, 32).a == 255);
  const auto dir = std::filesystem::temp_directory_path();
  write_png(img, dir / "fatou_render_a.png");
  write_png(img, dir / "fatou_render_b.png");
  const std::string a = slurp(dir / "fatou_render_a.png");
  CHECK(a.size() > 8);
  CHECK(a.substr(1, 3) == "PNG");
  CHECK(a == slurp(dir / "fatou_render_b.png"));
  CHECK_THROWS_AS(write_png(img, "/nonexistent/dir/x.png"), Error);
  CHECK_THROWS_AS(Image(0, 4), Error);
}

TEST_CASE("image blending") {
  Image img(2, 2);
  img.set(0, 0, {0, 0, 0, 255});
  img.blend(0, 0, {200, 100, 50, 255}, 0.5);
  CHECK(img.get(0, 0) == Rgba{100, 50, 25, 255});
  img.set(-1, 5, {1, 1, 1, 1});  // ignored
}

TEST_CASE("polynomial JSON round trip") {
  const Polynomial f = family_fa(cplx(0.3, -0.7));
  const json j = to_json(f);
  CHECK(j["degree"] == 4);
  CHECK(polynomial_from_json(j) == f);
  CHECK_THROWS_AS(polynomial_from_json(json{{"degree", 3}}), Error);
  CHECK(complex_from_json(json::array({1.5, -2.0})) == cplx(1.5, -2.0));
  CHECK_THROWS_AS(complex_from_json(json::array({1.0, 2.0, 3.0})), Error);
}

TEST_CASE("ray JSON marks truncated paths") {
  const RayPath r = trace_external_ray(Polynomial::power(3), Angle(1, 8), 3.0, 1e-3);
  const json j = to_json(r);
  CHECK(j["kind"] == "external");
  CHECK(j["theta"] == "1/8");
  CHECK(j["landing"].is_null());
  CHECK(j["points"].size() == r.points.size());
}
