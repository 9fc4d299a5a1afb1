#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "fatou/families.hpp"
#include "fatou/io.hpp"
#include "fatou/puzzle.hpp"
#include "fatou/raster.hpp"
#include "fatou/rays.hpp"
#include "fatou/tree.hpp"

namespace fatou {

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 255;
  bool operator==(const Rgba&) const = default;
};

/// 8-bit RGBA, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  Image(int w, int h);
  void set(int x, int y, Rgba c);
  Rgba get(int x, int y) const;
  /// c over the current pixel with opacity t in [0, 1].
  void blend(int x, int y, Rgba c, double t);
};

/// Throws InvalidArgument when the file cannot be written.  No time or text
/// chunks, so equal images give equal files.
void write_png(const Image& image, const std::filesystem::path& path);

/// Stage colours cycle through these.
const std::array<Rgba, 12>& stage_palette();

struct JuliaMarks {
  bool critical_orbits = false;
  int orbit_length = 50;
  std::vector<RayPath> rays;
  const FatouTree* tree = nullptr;
};

/// Escape shading, basin colours and the optional overlays.
Image render_julia(const Polynomial& f, const Raster& raster, const JuliaMarks& marks);

/// Draws a polyline on an image aligned with the grid.
void draw_polyline(Image& image, const Grid& grid, const std::vector<cplx>& pts, Rgba colour);

enum class ParamClass : std::uint8_t {
  escaping = 0,
  attracted_to_zero = 1,
  other_attracting = 2,
  parabolic_adjacent = 3,
  undecided = 4,
};
std::string_view to_string(ParamClass c);

/// Fate of the free critical orbits of the family member (c' for f_c, the two
/// critical points other than 0 for f_a): any escaping -> escaping; all
/// attracted to 0 -> attracted_to_zero; any attracted to another attracting
/// cycle -> other_attracting; any converging to a neutral cycle ->
/// parabolic_adjacent; otherwise (or singular parameters) undecided.
ParamClass classify_parameter(Family family, cplx parameter, int budget);

struct ParamRaster {
  Grid grid;
  Family family;
  int budget = 0;
  std::vector<ParamClass> cls;
  /// f_a only: sign of Re(resit) from the closed form (-1, 0, +1; 0 also at a^3 = 1).
  std::vector<std::int8_t> resit_sign;
};

ParamRaster classify_parameters(Family family, const Box& box, int nx, int ny, int budget);

/// Class colours; for f_a, pixels with Re(resit) < 0 are tinted magenta.
Image render_bifurcation(const ParamRaster& params);
json bifurcation_legend(Family family);

/// Re(resit(f_a, a)) over a parameter box: negative (parabolic-attracting)
/// in red, positive in blue, shade by magnitude.  The signs are returned too.
Image render_resit_map(const Box& box, int nx, int ny, std::vector<std::int8_t>* signs = nullptr);

/// Pieces of the given depth coloured by id; graph cuts white.
Image render_puzzle(const Raster& raster, const PuzzleSet& set, int depth);

}  // namespace fatou
