#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fatou/cycles.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/puzzle.hpp"
#include "fatou/raster.hpp"
#include "fatou/rays.hpp"
#include "fatou/tree.hpp"

namespace fatou {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

json to_json(cplx z);
cplx complex_from_json(const json& j);

/// {"degree": d, "coeffs": [[re, im], ...]} with coeffs a_1..a_{d-1}.
json to_json(const Polynomial& f);
Polynomial polynomial_from_json(const json& j);

json to_json(const Box& box);
json to_json(const CycleRecord& c);
/// {kind, points, landing, ...}; landing is null for truncated paths.
json to_json(const RayPath& r);
json to_json(const TreeLevelReport& r, const TreeOptions& opts);
json to_json(const PieceRef& p);
json to_json(const Nest& n);

/// Label legend of CellKind codes.
json cell_legend();

/// Flat u8 dump of the cell kinds (row 0 = top), plus its JSON header.
json write_raster_dump(const Raster& raster, const std::filesystem::path& bin_path);

/// Pretty-printed with a trailing newline; key order is sorted, so equal
/// documents give equal bytes.
void write_json(const json& j, const std::filesystem::path& path);

}  // namespace fatou
