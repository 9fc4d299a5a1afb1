#include "fatou/render.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "fatou/error.hpp"
#include "fatou/puzzle.hpp"
#include "fatou/roots.hpp"
#include "parallel.hpp"

namespace fatou {

Image::Image(int w, int h) : width(w), height(h), rgba(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4, 0) {
  if (w <= 0 || h <= 0) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
}

void Image::set(int x, int y, Rgba c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  auto* p = &rgba[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 4];
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
  p[3] = c.a;
}

Rgba Image::get(int x, int y) const {
  const auto* p = &rgba[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 4];
  return {p[0], p[1], p[2], p[3]};
}

void Image::blend(int x, int y, Rgba c, double t) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const Rgba o = get(x, y);
  auto mixc = [t](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround((1.0 - t) * a + t * b));
  };
  set(x, y, {mixc(o.r, c.r), mixc(o.g, c.g), mixc(o.b, c.b), 255});
}

void write_png(const Image& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::InvalidArgument, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::InvalidArgument, "libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(&image.rgba[static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width) * 4]));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

const std::array<Rgba, 12>& stage_palette() {
  static const std::array<Rgba, 12> palette{{{255, 237, 160, 255},
                                             {252, 141, 89, 255},
                                             {145, 207, 96, 255},
                                             {102, 194, 165, 255},
                                             {50, 136, 189, 255},
                                             {158, 1, 66, 255},
                                             {230, 245, 152, 255},
                                             {94, 79, 162, 255},
                                             {244, 109, 67, 255},
                                             {171, 221, 164, 255},
                                             {254, 224, 139, 255},
                                             {213, 62, 79, 255}}};
  return palette;
}

namespace {

constexpr Rgba kZero{40, 70, 170, 255};
constexpr Rgba kOther{240, 150, 40, 255};
constexpr Rgba kParabolic{60, 170, 90, 255};
constexpr Rgba kUndecided{0, 0, 0, 255};
constexpr Rgba kUndecidedParam{120, 0, 20, 255};
constexpr Rgba kMagenta{255, 0, 255, 255};
constexpr Rgba kWhite{255, 255, 255, 255};

Rgba escape_shade(int n, int budget) {
  const double t = std::log1p(std::max(n, 0)) / std::log1p(std::max(budget, 1));
  const auto v = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - 0.85 * std::min(1.0, t))));
  return {v, v, static_cast<std::uint8_t>(std::min(255, v + 20)), 255};
}

Rgba attractor_colour(const Raster& raster, int a) {
  const auto origin = raster.origin_attractor();
  if (origin && *origin == a) return kZero;
  if (raster.attractors[static_cast<std::size_t>(a)].parabolic) return kParabolic;
  const auto& pal = stage_palette();
  return pal[static_cast<std::size_t>(a + 1) % pal.size()];
}

bool drawable(const Grid& grid, cplx z) {
  const Box& b = grid.box();
  return std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z.real() - b.center.real()) < 2.0 * b.width &&
         std::abs(z.imag() - b.center.imag()) < 2.0 * b.height;
}

}  // namespace

void draw_polyline(Image& image, const Grid& grid, const std::vector<cplx>& pts, Rgba colour) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!drawable(grid, pts[i - 1]) || !drawable(grid, pts[i])) continue;
    supercover(grid, pts[i - 1], pts[i], [&](std::size_t c) { image.set(grid.ix(c), grid.iy(c), colour); });
  }
  if (pts.size() == 1 && drawable(grid, pts[0])) {
    if (const auto c = grid.cell_of(pts[0])) image.set(grid.ix(*c), grid.iy(*c), colour);
  }
}

Image render_julia(const Polynomial& f, const Raster& raster, const JuliaMarks& marks) {
  const Grid& grid = raster.grid;
  Image img(grid.nx(), grid.ny());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cell& c = raster.cells[i];
    Rgba colour = kUndecided;
    switch (c.kind) {
      case CellKind::escaping: colour = escape_shade(c.value, raster.budget); break;
      case CellKind::basin: colour = attractor_colour(raster, c.value); break;
      case CellKind::bounded: colour = kUndecided; break;
      case CellKind::graph_cut: colour = kWhite; break;
    }
    img.set(grid.ix(i), grid.iy(i), colour);
  }
  if (marks.tree) {
    const auto& pal = stage_palette();
    std::vector<int> first(grid.size(), -1);
    for (std::size_t s = 0; s < marks.tree->stages.size(); ++s) {
      const Mask& m = marks.tree->stages[s];
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (m[i] && first[i] < 0) first[i] = static_cast<int>(s);
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (first[i] >= 0) img.blend(grid.ix(i), grid.iy(i), pal[static_cast<std::size_t>(first[i]) % pal.size()], 0.65);
    }
  }
  for (const auto& ray : marks.rays) draw_polyline(img, grid, ray.points, {255, 220, 0, 255});
  if (marks.critical_orbits) {
    for (const auto& c : critical_points(f).points) {
      std::vector<cplx> orbit{c.z};
      for (int n = 0; n < marks.orbit_length; ++n) orbit.push_back(f(orbit.back()));
      draw_polyline(img, grid, orbit, {230, 30, 30, 255});
    }
  }
  return img;
}

std::string_view to_string(ParamClass c) {
  switch (c) {
    case ParamClass::escaping: return "escaping";
    case ParamClass::attracted_to_zero: return "attracted-to-0";
    case ParamClass::other_attracting: return "other-attracting";
    case ParamClass::parabolic_adjacent: return "parabolic-adjacent";
    case ParamClass::undecided: return "undecided";
  }
  return "?";
}

namespace {

enum class Fate { escape, zero, other, neutral, unknown };

Fate critical_fate(const Polynomial& f, cplx z, int budget, double radius) {
  for (int n = 0; n < budget; ++n) {
    if (std::abs(z) > radius) return Fate::escape;
    if (std::abs(z) < 1e-3) return Fate::zero;
    z = f(z);
  }
  // look for a cycle the orbit has settled on
  for (int q = 1; q <= 12; ++q) {
    cplx w = z;
    cplx mult = 1.0;
    for (int k = 0; k < q; ++k) {
      const auto [v, dv] = f.evaluate_with_derivative(w);
      mult *= dv;
      w = v;
    }
    const double gap = std::abs(w - z);
    if (gap < 1e-6 * std::max(1.0, std::abs(z))) {
      if (std::abs(mult) < 1.0 - 1e-3) return Fate::other;
      if (std::abs(mult) <= 1.0 + 1e-3) return Fate::neutral;
    }
  }
  return Fate::unknown;
}

std::vector<cplx> free_critical_points(Family family, cplx p, const Polynomial& f) {
  if (family == Family::fc) return {fc_free_critical(p)};
  std::vector<cplx> out;
  for (const auto& c : critical_points(f).points) {
    if (std::abs(c.z) > 1e-9) {
      for (int k = 0; k < c.multiplicity; ++k) out.push_back(c.z);
    }
  }
  return out;
}

}  // namespace

ParamClass classify_parameter(Family family, cplx parameter, int budget) {
  std::optional<Polynomial> f;
  try {
    f = family_member(family, parameter);
  } catch (const Error&) {
    return ParamClass::undecided;
  }
  const double radius = escape_radius(*f);
  std::vector<Fate> fates;
  for (cplx c : free_critical_points(family, parameter, *f)) {
    Fate fate = critical_fate(*f, c, budget, radius);
    // f_a: slow convergence to the parabolic fixed point a
    if (fate == Fate::unknown && family == Family::fa) {
      cplx z = c;
      for (int n = 0; n < budget; ++n) z = (*f)(z);
      if (std::abs(z - parameter) < 0.05) fate = Fate::neutral;
    }
    fates.push_back(fate);
  }
  auto any = [&](Fate x) { return std::find(fates.begin(), fates.end(), x) != fates.end(); };
  if (any(Fate::escape)) return ParamClass::escaping;
  if (!fates.empty() && std::all_of(fates.begin(), fates.end(), [](Fate x) { return x == Fate::zero; })) {
    return ParamClass::attracted_to_zero;
  }
  if (any(Fate::other)) return ParamClass::other_attracting;
  if (any(Fate::neutral)) return ParamClass::parabolic_adjacent;
  if (any(Fate::zero) && !any(Fate::unknown)) return ParamClass::attracted_to_zero;
  return ParamClass::undecided;
}

ParamRaster classify_parameters(Family family, const Box& box, int nx, int ny, int budget) {
  ParamRaster out{Grid(box, nx, ny), family, budget, {}, {}};
  const Grid& grid = out.grid;
  out.cls.assign(grid.size(), ParamClass::undecided);
  if (family == Family::fa) out.resit_sign.assign(grid.size(), 0);
  detail::parallel_rows(grid.ny(), [&](int y) {
    for (int x = 0; x < grid.nx(); ++x) {
      const std::size_t i = grid.index(x, y);
      const cplx p = grid.center(x, y);
      out.cls[i] = classify_parameter(family, p, budget);
      if (family == Family::fa) {
        try {
          const double re = fa_resit_closed_form(p).real();
          out.resit_sign[i] = static_cast<std::int8_t>(re < 0 ? -1 : (re > 0 ? 1 : 0));
        } catch (const Error&) {
          out.resit_sign[i] = 0;
        }
      }
    }
  });
  return out;
}

Image render_bifurcation(const ParamRaster& params) {
  const Grid& grid = params.grid;
  Image img(grid.nx(), grid.ny());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Rgba c = kUndecidedParam;
    switch (params.cls[i]) {
      case ParamClass::escaping: c = {225, 225, 230, 255}; break;
      case ParamClass::attracted_to_zero: c = kZero; break;
      case ParamClass::other_attracting: c = kOther; break;
      case ParamClass::parabolic_adjacent: c = kParabolic; break;
      case ParamClass::undecided: c = kUndecidedParam; break;
    }
    img.set(grid.ix(i), grid.iy(i), c);
    if (!params.resit_sign.empty() && params.resit_sign[i] < 0) img.blend(grid.ix(i), grid.iy(i), kMagenta, 0.4);
  }
  return img;
}

json bifurcation_legend(Family family) {
  json legend{{"escaping", {225, 225, 230}},
              {"attracted-to-0", {kZero.r, kZero.g, kZero.b}},
              {"other-attracting", {kOther.r, kOther.g, kOther.b}},
              {"parabolic-adjacent", {kParabolic.r, kParabolic.g, kParabolic.b}},
              {"undecided", {kUndecidedParam.r, kUndecidedParam.g, kUndecidedParam.b}}};
  if (family == Family::fa) legend["overlay"] = "Re(resit(f_a, a)) < 0: 40% magenta over the class colour";
  return legend;
}

Image render_resit_map(const Box& box, int nx, int ny, std::vector<std::int8_t>* signs) {
  const Grid grid(box, nx, ny);
  Image img(nx, ny);
  if (signs) signs->assign(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double re = 0.0;
    bool ok = true;
    try {
      re = fa_resit_closed_form(grid.center(i)).real();
    } catch (const Error&) {
      ok = false;
    }
    if (!ok || !std::isfinite(re)) {
      img.set(grid.ix(i), grid.iy(i), kWhite);
      continue;
    }
    const double t = std::min(1.0, std::log1p(std::abs(re)) / std::log1p(20.0));
    const auto hi = static_cast<std::uint8_t>(std::lround(90 + 165 * t));
    const Rgba c = re < 0 ? Rgba{hi, 40, 40, 255} : Rgba{40, 60, hi, 255};
    img.set(grid.ix(i), grid.iy(i), c);
    if (signs) (*signs)[i] = static_cast<std::int8_t>(re < 0 ? -1 : (re > 0 ? 1 : 0));
  }
  return img;
}

Image render_puzzle(const Raster& raster, const PuzzleSet& set, int depth) {
  const Grid& grid = raster.grid;
  const PuzzleGraph& g = set.graph();
  Image img(grid.nx(), grid.ny());
  const auto& pal = stage_palette();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int x = grid.ix(i);
    const int y = grid.iy(i);
    Rgba c{30, 30, 30, 255};
    if (!g.omega[i]) {
      c = g.omega0[i] ? Rgba{20, 40, 110, 255} : escape_shade(raster.cells[i].value, raster.budget);
    } else if (g.cut[i]) {
      c = kWhite;
    } else if (const std::int32_t id = set.label(depth, i); id >= 0) {
      c = pal[static_cast<std::size_t>(id) % pal.size()];
    }
    img.set(x, y, c);
  }
  return img;
}

}  // namespace fatou
