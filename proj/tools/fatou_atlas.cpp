// fatou-atlas: renders and reports for polynomial dynamics.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/io.hpp"
#include "fatou/puzzle.hpp"
#include "fatou/render.hpp"
#include "fatou/roots.hpp"
#include "fatou/tree.hpp"

using namespace fatou;

namespace {

struct Args {
  std::string family;
  std::string param;
  std::string coeffs;
  int degree = 0;
  std::string box;
  std::string res;
  int budget = 200;
  int depth = -1;
  std::string angles;
  std::string out;
  // command specific
  bool critical_orbits = false;
  int tree_level = -1;
  bool dump = false;
  int stages = 200;
  double ray_start = 4.0;
  double ray_end = 1e-8;
  double outer = 0.5;
  int period = 2;
  int samples = 50;
  bool all_depths = false;
};

std::vector<double> numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

cplx parse_param(const std::string& text) {
  const auto v = numbers(text, "--param");
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() != 2) throw Error(ErrorCode::InvalidArgument, "--param expects re,im");
  return {v[0], v[1]};
}

Box parse_box(const std::string& text) {
  if (text.empty()) return Box::square(0.0, 4.0);
  const auto v = numbers(text, "--box");
  if (v.size() != 4 || v[2] <= 0 || v[3] <= 0) throw Error(ErrorCode::InvalidArgument, "--box expects cx,cy,w,h with w,h > 0");
  return Box{{v[0], v[1]}, v[2], v[3]};
}

std::pair<int, int> parse_res(const std::string& text, int fallback) {
  if (text.empty()) return {fallback, fallback};
  const auto v = numbers(text, "--res");
  if (v.size() == 1) return {static_cast<int>(v[0]), static_cast<int>(v[0])};
  if (v.size() != 2) throw Error(ErrorCode::InvalidArgument, "--res expects nx,ny");
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

std::vector<Angle> parse_angles(const std::string& text) {
  std::vector<Angle> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(Angle::parse(item));
  }
  return out;
}

/// --coeffs a1re,a1im,...; --family with --param; or --degree for z^d.
Polynomial target_map(const Args& a) {
  if (!a.coeffs.empty()) {
    const auto v = numbers(a.coeffs, "--coeffs");
    if (v.size() % 2 != 0) throw Error(ErrorCode::InvalidArgument, "--coeffs expects re,im pairs for a_1 .. a_{d-1}");
    std::vector<cplx> c;
    for (std::size_t i = 0; i < v.size(); i += 2) c.emplace_back(v[i], v[i + 1]);
    const int d = static_cast<int>(c.size()) + 1;
    return Polynomial(d, std::move(c));
  }
  if (!a.family.empty()) {
    if (a.param.empty()) throw Error(ErrorCode::InvalidArgument, "--family needs --param");
    return family_member(parse_family(a.family), parse_param(a.param));
  }
  if (a.degree >= 2) return Polynomial::power(a.degree);
  throw Error(ErrorCode::InvalidArgument, "no map given: use --coeffs, --family with --param, or --degree");
}

std::string stem_of(const Args& a, const std::string& command) {
  std::string s = a.out.empty() ? command : a.out;
  for (const char* ext : {".png", ".json"}) {
    const std::string e(ext);
    if (s.size() > e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) s.resize(s.size() - e.size());
  }
  return s;
}

json header(const std::string& command, const Box& box, std::pair<int, int> res, int budget) {
  return {{"command", command},
          {"version", kVersion},
          {"box", to_json(box)},
          {"resolution", {res.first, res.second}},
          {"budget", budget},
          {"errors", json::array()}};
}

json raster_summary(const Raster& r) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& c : r.cells) {
    switch (c.kind) {
      case CellKind::escaping: ++counts["escaping"]; break;
      case CellKind::bounded: ++counts["bounded"]; break;
      case CellKind::basin: ++counts["basin"]; break;
      case CellKind::graph_cut: ++counts["graph_cut"]; break;
    }
  }
  json attractors = json::array();
  for (const auto& at : r.attractors) {
    json j = to_json(at.cycle);
    j["parabolic"] = at.parabolic;
    attractors.push_back(j);
  }
  const auto origin = r.origin_attractor();
  return {{"counts", counts},
          {"attractors", attractors},
          {"origin_attractor", origin ? json(*origin) : json(nullptr)},
          {"escape_radius", r.escape_radius}};
}

json critical_json(const Polynomial& f) {
  json out = json::array();
  for (const auto& c : critical_points(f).points) {
    out.push_back({{"point", to_json(c.z)}, {"multiplicity", c.multiplicity}});
  }
  return out;
}

json classify_tolerances(const ClassifyOptions& o) {
  return {{"capture_radius", o.capture_radius},
          {"max_cycle_period", o.max_cycle_period},
          {"parabolic_budget_factor", o.parabolic_budget_factor}};
}

void add_error(json& report, const std::string& where, const std::exception& e) {
  report["errors"].push_back({{"stage", where}, {"message", e.what()}});
}

int finish(const json& report, const std::string& stem) {
  write_json(report, stem + ".json");
  return report["errors"].empty() ? 0 : 2;
}

/// Tree report when U_f(0) exists; nullopt (with reason) otherwise.
std::optional<TreeLevelReport> try_tree(const Polynomial& f, const Raster& r, int max_level, int stages,
                                        json& report, json& slot) {
  try {
    return tree_report(f, r, max_level, stages);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotAttracting) {
      slot = {{"applicable", false}, {"reason", e.what()}};
    } else {
      add_error(report, "fatou-tree", e);
    }
  }
  return std::nullopt;
}

int render_julia_cmd(const Args& a) {
  const Polynomial f = target_map(a);
  const Box box = parse_box(a.box);
  const auto res = parse_res(a.res, 512);
  ClassifyOptions co;
  co.budget = a.budget;
  const Raster r = classify_grid(f, box, res.first, res.second, co);
  const std::string stem = stem_of(a, "julia");

  json report = header("render-julia", box, res, a.budget);
  report["polynomial"] = to_json(f);
  report["raster"] = raster_summary(r);
  report["critical_points"] = critical_json(f);
  report["tolerances"] = classify_tolerances(co);

  JuliaMarks marks;
  marks.critical_orbits = a.critical_orbits;
  json rays = json::array();
  for (const Angle& th : parse_angles(a.angles)) {
    try {
      marks.rays.push_back(trace_external_ray(f, th, a.ray_start, a.ray_end));
      rays.push_back(to_json(marks.rays.back()));
    } catch (const Error& e) {
      add_error(report, "ray " + th.to_string(), e);
    }
  }
  if (!rays.empty()) report["rays"] = rays;
  if (a.critical_orbits) {
    json orbits = json::array();
    for (const auto& c : critical_points(f).points) {
      json pts = json::array();
      cplx z = c.z;
      for (int n = 0; n <= marks.orbit_length && std::abs(z) < 1e6; ++n, z = f(z)) pts.push_back(to_json(z));
      orbits.push_back(pts);
    }
    report["critical_orbits"] = orbits;
  }

  json tree_slot;
  const int max_level = std::max(1, std::max(a.tree_level, f.degree() - 1));
  const auto tree = try_tree(f, r, max_level, a.stages, report, tree_slot);
  if (tree) {
    report["k_of_f"] = tree->k_of_f;
    report["maximality"] = std::string(to_string(tree->maximality));
    report["defect_fraction"] = tree->defect_fraction;
    if (a.tree_level >= 0 && !tree->trees.empty()) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(a.tree_level), tree->trees.size() - 1);
      marks.tree = &tree->trees[idx];
      report["tree_level_drawn"] = tree->trees[idx].level;
      report["tree_stages"] = static_cast<int>(tree->trees[idx].stages.size());
    }
  } else if (!tree_slot.is_null()) {
    report["tree"] = tree_slot;
  }
  if (a.dump) report["raster_dump"] = write_raster_dump(r, stem + ".bin");
  write_png(render_julia(f, r, marks), stem + ".png");
  return finish(report, stem);
}

int render_bifurcation_cmd(const Args& a) {
  if (a.family.empty()) throw Error(ErrorCode::InvalidArgument, "render-bifurcation needs --family fc|fa");
  const Family fam = parse_family(a.family);
  const Box box = parse_box(a.box);
  const auto res = parse_res(a.res, 400);
  const ParamRaster p = classify_parameters(fam, box, res.first, res.second, a.budget);
  const std::string stem = stem_of(a, "bifurcation");
  json report = header("render-bifurcation", box, res, a.budget);
  report["family"] = std::string(to_string(fam));
  report["legend"] = bifurcation_legend(fam);
  std::map<std::string, std::int64_t> counts;
  for (ParamClass c : p.cls) ++counts[std::string(to_string(c))];
  report["counts"] = counts;
  report["tolerances"] = {{"zero_radius", 1e-3}, {"multiplier_margin", 1e-3}, {"parabolic_radius", 0.05}};
  if (fam == Family::fa) {
    report["resit_negative_pixels"] = std::count(p.resit_sign.begin(), p.resit_sign.end(), std::int8_t{-1});
  }
  write_png(render_bifurcation(p), stem + ".png");
  return finish(report, stem);
}

int trace_ray_cmd(const Args& a) {
  const Polynomial f = target_map(a);
  const Box box = parse_box(a.box);
  const auto res = parse_res(a.res, 512);
  const auto angles = parse_angles(a.angles.empty() ? "0" : a.angles);
  const std::string stem = stem_of(a, "rays");
  json report = header("trace-ray", box, res, a.budget);
  report["polynomial"] = to_json(f);
  const RayOptions ro;
  report["tolerances"] = {{"landing_cutoff", ro.landing_cutoff},
                          {"landing_tol", ro.landing_tol},
                          {"step_ratio", ro.step_ratio},
                          {"potential_start", a.ray_start},
                          {"potential_end", a.ray_end}};
  JuliaMarks marks;
  json rays = json::array();
  for (const Angle& th : angles) {
    try {
      marks.rays.push_back(trace_external_ray(f, th, a.ray_start, a.ray_end, ro));
      json j = to_json(marks.rays.back());
      const AngleOrbit orbit = angle_orbit(th, f.degree(), 64);
      j["preperiod"] = orbit.preperiod;
      j["period"] = orbit.period;
      rays.push_back(j);
    } catch (const Error& e) {
      add_error(report, "ray " + th.to_string(), e);
    }
  }
  report["rays"] = rays;
  ClassifyOptions co;
  co.budget = a.budget;
  const Raster r = classify_grid(f, box, res.first, res.second, co);
  write_png(render_julia(f, r, marks), stem + ".png");
  return finish(report, stem);
}

int fatou_tree_cmd(const Args& a) {
  const Polynomial f = target_map(a);
  const Box box = parse_box(a.box);
  const auto res = parse_res(a.res, 512);
  ClassifyOptions co;
  co.budget = a.budget;
  const Raster r = classify_grid(f, box, res.first, res.second, co);
  const std::string stem = stem_of(a, "tree");
  json report = header("fatou-tree", box, res, a.budget);
  report["polynomial"] = to_json(f);
  report["raster"] = raster_summary(r);
  const int max_level = a.depth >= 0 ? a.depth : std::max(1, f.degree() - 1);
  const TreeLevelReport rep = tree_report(f, r, max_level, a.stages);
  TreeOptions topts;
  topts.max_stages = a.stages;
  report["tree"] = to_json(rep, topts);
  report["k_bound"] = {{"d_minus_2", f.degree() - 2}, {"holds", rep.k_of_f <= f.degree() - 2}};
  JuliaMarks marks;
  if (!rep.trees.empty()) {
    marks.tree = &rep.trees[std::min<std::size_t>(static_cast<std::size_t>(rep.k_of_f), rep.trees.size() - 1)];
  }
  write_png(render_julia(f, r, marks), stem + ".png");
  return finish(report, stem);
}

json shape_stats(const PuzzleSet& set, int depth) {
  const Grid& grid = set.graph().grid;
  auto pieces = set.pieces(depth);
  std::sort(pieces.begin(), pieces.end(), [](const PuzzlePiece& x, const PuzzlePiece& y) {
    return x.cells != y.cells ? x.cells > y.cells : x.id < y.id;
  });
  std::vector<double> shapes;
  Mask m(grid.size(), 0);
  for (std::size_t k = 0; k < pieces.size() && k < 16; ++k) {
    cplx centroid = 0.0;
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      m[i] = set.label(depth, i) == pieces[k].id;
      if (m[i]) {
        cells.push_back(i);
        centroid += grid.center(i);
      }
    }
    centroid /= static_cast<double>(cells.size());
    // interior cell nearest the centroid
    std::optional<cplx> x;
    for (std::size_t i : cells) {
      const int cx = grid.ix(i);
      const int cy = grid.iy(i);
      if (cx == 0 || cy == 0 || cx + 1 == grid.nx() || cy + 1 == grid.ny()) continue;
      if (!m[i - 1] || !m[i + 1] || !m[i - static_cast<std::size_t>(grid.nx())] ||
          !m[i + static_cast<std::size_t>(grid.nx())]) {
        continue;
      }
      if (!x || std::abs(grid.center(i) - centroid) < std::abs(*x - centroid)) x = grid.center(i);
    }
    if (x) shapes.push_back(shape_of(grid, m, *x));
  }
  if (shapes.empty()) return {{"depth", depth}, {"measured", 0}};
  std::sort(shapes.begin(), shapes.end());
  return {{"depth", depth},
          {"measured", shapes.size()},
          {"median", shapes[shapes.size() / 2]},
          {"max", shapes.back()}};
}

int puzzle_cmd(const Args& a) {
  const Polynomial f = target_map(a);
  const Box box = parse_box(a.box);
  const auto res = parse_res(a.res, 512);
  const int depth = a.depth >= 0 ? a.depth : 6;
  ClassifyOptions co;
  co.budget = a.budget;
  co.compute_potential = true;
  const Raster r = classify_grid(f, box, res.first, res.second, co);
  const std::string stem = stem_of(a, "puzzle");
  json report = header("puzzle", box, res, a.budget);
  report["polynomial"] = to_json(f);
  const PuzzleOptions po;
  report["tolerances"] = {{"cycle_tol_cells", po.cycle_tol},
                          {"landing_tol", po.landing_tol},
                          {"outer_level", a.outer},
                          {"cycle_period_hint", a.period}};

  const PuzzleGraph g = build_graph(f, r, a.outer, a.period, po);
  json tails = json::array();
  for (const auto& t : g.external_tails) tails.push_back(t.theta.to_string());
  report["graph"] = {{"cycle", to_json(g.cycle)},
                     {"external_tails", tails},
                     {"inner_level", g.inner_level},
                     {"superattracting", g.superattracting},
                     {"depth0_pieces", g.depth0_count}};
  bool parabolic = !g.parabolic_cuts.empty();
  for (const auto& at : r.attractors) parabolic = parabolic || at.parabolic;
  if (parabolic) report["caveat"] = "surrogate-cuts: parabolic basins are cut with petal-disk surrogates";

  const PuzzleSet set(f, g, depth);
  json depths = json::array();
  json shapes = json::array();
  for (int n = 0; n <= depth; ++n) {
    const DepthStats& s = set.stats(n);
    depths.push_back({{"depth", n},
                      {"pieces", s.pieces},
                      {"cells", s.cells},
                      {"refinement_violations", s.refinement_violations},
                      {"markov_defect", s.markov_defect},
                      {"degree_sum", s.degree_sum}});
    shapes.push_back(shape_stats(set, n));
  }
  report["depths"] = depths;
  report["shape"] = shapes;

  json nests = json::array();
  json entries = json::array();
  int shrunk = 0;
  int bounded = 0;
  std::vector<cplx> targets;
  try {
    targets = julia_samples(f, a.samples, 5);
  } catch (const Error& e) {
    add_error(report, "julia samples", e);
  }
  for (cplx z : targets) {
    try {
      const Nest n = set.nest(z, depth);
      shrunk += n.shrinking;
      const auto bd = bounded_degree_evidence(n);
      bounded += bd.witnessed;
      json j = to_json(n);
      j["bounded_degree"] = {{"witnessed", bd.witnessed}, {"bound", bd.bound}};
      nests.push_back(j);
      json table = json::array();
      for (int k = 0; k + 1 < static_cast<int>(n.pieces.size()); ++k) {
        const auto e = set.first_entry(n, n.pieces[static_cast<std::size_t>(k)]);
        table.push_back(e ? json{{"k", k}, {"r", e->r}, {"degree", e->degree}} : json{{"k", k}, {"r", nullptr}});
      }
      entries.push_back({{"target", to_json(z)}, {"entries", table}});
    } catch (const Error& e) {
      add_error(report, "nest", e);
    }
  }
  json critical = json::array();
  for (const auto& c : critical_points(f).points) {
    try {
      if (!set.locate(c.z, 0)) continue;
      critical.push_back(to_json(set.nest(c.z, depth)));
    } catch (const Error& e) {
      critical.push_back({{"target", to_json(c.z)}, {"skipped", e.what()}});
    }
  }
  report["nests"] = nests;
  report["critical_nests"] = critical;
  report["first_entry"] = entries;
  report["summary"] = {{"sampled_nests", static_cast<int>(nests.size())},
                       {"shrinking", shrunk},
                       {"bounded_degree_witnessed", bounded},
                       {"degree_bound", static_cast<int>(std::lround(std::pow(f.degree(), f.degree() - 1)))}};

  write_png(render_puzzle(r, set, depth), stem + ".png");
  if (a.all_depths) {
    for (int n = 0; n < depth; ++n) write_png(render_puzzle(r, set, n), stem + "_d" + std::to_string(n) + ".png");
  }
  return finish(report, stem);
}

int resit_map_cmd(const Args& a) {
  const Box box = parse_box(a.box);
  const auto res = parse_res(a.res, 400);
  std::vector<std::int8_t> signs;
  const Image img = render_resit_map(box, res.first, res.second, &signs);
  const std::string stem = stem_of(a, "resit");
  json report = header("resit-map", box, res, 0);
  report["family"] = "fa";
  report["formula"] = "1 - 2/(a^3-1) - 1/(a^3-1)^2";
  report["legend"] = {{"negative", "red, brighter with |Re|"}, {"positive", "blue, brighter with |Re|"},
                      {"singular", "white"}};
  const Grid grid(box, res.first, res.second);
  std::int64_t negative = 0;
  json roots = json::array();
  for (int k = 0; k < 3; ++k) {
    const cplx w = std::polar(1.0, 2.0 * M_PI * k / 3.0);
    std::int64_t near = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (signs[i] < 0 && std::abs(grid.center(i) - w) < 0.1) ++near;
    }
    roots.push_back({{"root", to_json(w)}, {"negative_pixels_within_0.1", near}});
  }
  for (auto s : signs) negative += s < 0;
  report["negative_pixels"] = negative;
  report["cube_roots"] = roots;
  write_png(img, stem + ".png");
  return finish(report, stem);
}

void common_options(CLI::App* sub, Args& a) {
  sub->add_option("--family", a.family, "fc or fa");
  sub->add_option("--param", a.param, "family parameter re,im");
  sub->add_option("--coeffs", a.coeffs, "a_1..a_{d-1} of z^d + ... + a_1 z as re,im pairs");
  sub->add_option("--degree", a.degree, "use z^d when no coefficients are given");
  sub->add_option("--box", a.box, "cx,cy,w,h (default 0,0,4,4)");
  sub->add_option("--res", a.res, "nx,ny");
  sub->add_option("--budget", a.budget, "iteration budget")->check(CLI::PositiveNumber);
  sub->add_option("--depth", a.depth, "puzzle depth or highest tree level");
  sub->add_option("--angles", a.angles, "external angles p/q,...");
  sub->add_option("--out", a.out, "output stem; writes <stem>.png and <stem>.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fatou-atlas: Julia sets, parameter planes, rays, Fatou trees and puzzles"};
  app.require_subcommand(1);
  Args a;
  std::map<std::string, int (*)(const Args&)> commands{{"render-julia", render_julia_cmd},
                                                        {"render-bifurcation", render_bifurcation_cmd},
                                                        {"trace-ray", trace_ray_cmd},
                                                        {"fatou-tree", fatou_tree_cmd},
                                                        {"puzzle", puzzle_cmd},
                                                        {"resit-map", resit_map_cmd}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    (void)fn;
    CLI::App* sub = app.add_subcommand(name);
    common_options(sub, a);
    subs[name] = sub;
  }
  subs["render-julia"]->add_flag("--critical-orbits", a.critical_orbits, "draw the first 50 critical iterates");
  subs["render-julia"]->add_option("--tree-level", a.tree_level, "colour the stages of the level-k tree");
  subs["render-julia"]->add_flag("--dump", a.dump, "also write the u8 cell kinds to <stem>.bin");
  for (const char* name : {"render-julia", "trace-ray"}) {
    subs[name]->add_option("--start", a.ray_start, "starting potential of rays");
    subs[name]->add_option("--end", a.ray_end, "final potential of rays");
  }
  for (const char* name : {"render-julia", "fatou-tree"}) {
    subs[name]->add_option("--stages", a.stages, "growth stages per tree level");
  }
  subs["puzzle"]->add_option("--outer", a.outer, "outer equipotential level");
  subs["puzzle"]->add_option("--period", a.period, "preferred period of the boundary cycle");
  subs["puzzle"]->add_option("--samples", a.samples, "number of sampled Julia nests");
  subs["puzzle"]->add_flag("--all-depths", a.all_depths, "write one PNG per depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return commands[name](a);
    } catch (const std::exception& e) {
      std::cerr << "fatou-atlas " << name << ": " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
