#include "fatou/io.hpp"

#include <fstream>

#include "fatou/error.hpp"

namespace fatou {

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidArgument, "complex must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const Polynomial& f) {
  json coeffs = json::array();
  for (cplx a : f.coeffs()) coeffs.push_back(to_json(a));
  return {{"degree", f.degree()}, {"coeffs", coeffs}};
}

Polynomial polynomial_from_json(const json& j) {
  try {
    std::vector<cplx> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(complex_from_json(c));
    return Polynomial(j.at("degree").get<int>(), std::move(coeffs));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad polynomial JSON: ") + e.what());
  }
}

json to_json(const Box& box) {
  return {{"center", to_json(box.center)}, {"width", box.width}, {"height", box.height}};
}

json to_json(const CycleRecord& c) {
  json pts = json::array();
  for (cplx z : c.points) pts.push_back(to_json(z));
  json j{{"period", c.period},
         {"points", pts},
         {"multiplier", to_json(c.multiplier)},
         {"class", std::string(to_string(c.cls))}};
  if (c.rotation_denominator > 0) j["rotation_denominator"] = c.rotation_denominator;
  if (c.resit) j["resit"] = to_json(*c.resit);
  return j;
}

json to_json(const RayPath& r) {
  json pts = json::array();
  for (cplx z : r.points) pts.push_back(to_json(z));
  json j{{"kind", std::string(to_string(r.kind))},
         {"points", pts},
         {"parameters", r.parameters},
         {"landing", r.landed ? to_json(r.landing) : json(nullptr)}};
  switch (r.kind) {
    case RayKind::external: j["theta"] = r.theta.to_string(); break;
    case RayKind::equipotential:
      j["level"] = r.level;
      j["partial"] = r.partial;
      break;
    case RayKind::internal: j["internal_angle"] = r.internal_angle; break;
  }
  if (!r.truncation.empty()) j["truncation"] = r.truncation;
  return j;
}

json to_json(const TreeLevelReport& r, const TreeOptions& opts) {
  json coverage = json::array();
  for (const auto& level : r.critical_coverage) {
    json items = json::array();
    for (const auto& c : level) {
      items.push_back({{"point", to_json(c.point)},
                       {"multiplicity", c.multiplicity},
                       {"placement", std::string(to_string(c.placement))},
                       {"distance_cells", c.distance_cells}});
    }
    coverage.push_back(items);
  }
  json stages = json::array();
  for (const auto& t : r.trees) {
    stages.push_back({{"level", t.level},
                      {"stages", static_cast<int>(t.stages.size())},
                      {"converged", t.converged},
                      {"cells", count(t.mask())},
                      {"parabolic_layers", t.parabolic_layer_count()}});
  }
  return {{"k_of_f", r.k_of_f},
          {"n_k", r.n_k},
          {"critical_coverage", coverage},
          {"critical_count", r.critical_count},
          {"maximality", std::string(to_string(r.maximality))},
          {"defect_fraction", r.defect_fraction},
          {"stop_reason", r.stop_reason},
          {"levels", stages},
          {"parameters",
           {{"boundary_tol_cells", opts.boundary_tol},
            {"defect_tol", opts.defect_tol},
            {"max_stages", opts.max_stages}}}};
}

json to_json(const PieceRef& p) {
  json j{{"depth", p.depth}, {"diameter", p.diameter}, {"resolved", p.resolved()}};
  if (p.resolved()) j["id"] = p.id;
  return j;
}

json to_json(const Nest& n) {
  json pieces = json::array();
  for (const auto& p : n.pieces) pieces.push_back(to_json(p));
  return {{"target", to_json(n.target)},
          {"pieces", pieces},
          {"degree_sequence", n.degree_sequence},
          {"critical_nest", n.critical_nest},
          {"shrinking", n.shrinking},
          {"finite", n.finite}};
}

json cell_legend() {
  return {{"0", "escaping"}, {"1", "bounded (undecided)"}, {"2", "basin"}, {"3", "graph cut"}};
}

json write_raster_dump(const Raster& raster, const std::filesystem::path& bin_path) {
  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + bin_path.string());
  std::vector<char> bytes(raster.cells.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<char>(raster.cells[i].kind);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  return {{"file", bin_path.filename().string()},
          {"box", to_json(raster.grid.box())},
          {"resolution", {raster.grid.nx(), raster.grid.ny()}},
          {"order", "row-major, row 0 at the top edge"},
          {"legend", cell_legend()}};
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace fatou
