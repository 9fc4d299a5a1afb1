#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "fatou/error.hpp"
#include "fatou/families.hpp"
#include "fatou/io.hpp"
#include "fatou/puzzle.hpp"
#include "fatou/render.hpp"
#include "fatou/roots.hpp"
#include "fatou/tree.hpp"

namespace py = pybind11;
using namespace fatou;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Box make_box(std::tuple<double, double, double, double> b) {
  return Box{{std::get<0>(b), std::get<1>(b)}, std::get<2>(b), std::get<3>(b)};
}

// A puzzle keeps its raster and graph alive alongside the piece set.
struct Puzzle {
  Polynomial f;
  Raster raster;
  PuzzleGraph graph;
  std::unique_ptr<PuzzleSet> set;

  Puzzle(const Polynomial& poly, std::tuple<double, double, double, double> box, int n, double outer, int period,
         int depth)
      : f(poly), raster([&] {
          ClassifyOptions o;
          o.compute_potential = true;
          return classify_grid(poly, make_box(box), n, n, o);
        }()),
        graph(build_graph(f, raster, outer, period)),
        set(std::make_unique<PuzzleSet>(f, graph, depth)) {}
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polynomial dynamics: rasters, rays, Fatou trees and puzzles";
  m.attr("__version__") = kVersion;

  static py::exception<Error> error(m, "FatouError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init<int, std::vector<cplx>>(), py::arg("degree"), py::arg("coeffs"),
           "z^d + a_{d-1} z^{d-1} + ... + a_1 z with coeffs = [a_1, ..., a_{d-1}]")
      .def_static("power", &Polynomial::power)
      .def_property_readonly("degree", &Polynomial::degree)
      .def_property_readonly("coeffs", [](const Polynomial& f) {
        return std::vector<cplx>(f.coeffs().begin(), f.coeffs().end());
      })
      .def("__call__", &Polynomial::evaluate)
      .def("derivative", &Polynomial::derivative)
      .def("iterate", &Polynomial::iterate)
      .def("__repr__", [](const Polynomial& f) { return describe(f); });

  m.def("family_fc", &family_fc);
  m.def("family_fa", &family_fa);
  m.def("fc_free_critical", &fc_free_critical);
  m.def("fa_resit_closed_form", &fa_resit_closed_form);
  m.def("critical_points", [](const Polynomial& f) {
    std::vector<std::pair<cplx, int>> out;
    for (const auto& c : critical_points(f).points) out.emplace_back(c.z, c.multiplicity);
    return out;
  });
  m.def("find_cycles", [](const Polynomial& f, int max_period, std::tuple<double, double, double, double> box) {
    py::list out;
    for (const auto& c : find_cycles(f, max_period, make_box(box))) out.append(to_py(to_json(c)));
    return out;
  }, py::arg("f"), py::arg("max_period"), py::arg("box") = std::make_tuple(0.0, 0.0, 4.0, 4.0));
  m.def("residu_iteratif", [](const Polynomial& f, cplx z, int period) {
    return residu_iteratif(f, make_cycle(f, z, period));
  });

  m.def("map_angle", [](const std::string& theta, int d) { return map_angle(Angle::parse(theta), d).to_string(); });
  m.def("periodic_angles", [](int d, int period) {
    std::vector<std::vector<std::string>> out;
    for (const auto& cyc : periodic_angles(d, period)) {
      auto& v = out.emplace_back();
      for (const auto& a : cyc) v.push_back(a.to_string());
    }
    return out;
  });

  m.def("green_function", &green_function, py::arg("f"), py::arg("z"), py::arg("budget") = 2000);
  m.def("escape_radius", &escape_radius);

  py::class_<Raster>(m, "Raster")
      .def_property_readonly("shape", [](const Raster& r) { return std::make_pair(r.grid.ny(), r.grid.nx()); })
      .def_property_readonly("cell_size", [](const Raster& r) { return r.grid.cell_size(); })
      .def("kinds", [](const Raster& r) {
        py::array_t<std::uint8_t> a({r.grid.ny(), r.grid.nx()});
        auto* p = a.mutable_data();
        for (std::size_t i = 0; i < r.cells.size(); ++i) p[i] = static_cast<std::uint8_t>(r.cells[i].kind);
        return a;
      }, "u8 cell kinds, row 0 at the top: 0 escaping, 1 bounded, 2 basin, 3 graph cut");
  m.def("classify_grid", [](const Polynomial& f, std::tuple<double, double, double, double> box, int nx, int ny,
                            int budget) {
    ClassifyOptions o;
    o.budget = budget;
    return classify_grid(f, make_box(box), nx, ny, o);
  }, py::arg("f"), py::arg("box"), py::arg("nx"), py::arg("ny"), py::arg("budget") = 200);

  m.def("trace_external_ray", [](const Polynomial& f, const std::string& theta, double start, double end) {
    return to_py(to_json(trace_external_ray(f, Angle::parse(theta), start, end)));
  }, py::arg("f"), py::arg("theta"), py::arg("start") = 4.0, py::arg("end") = 1e-8);
  m.def("trace_equipotential", [](const Polynomial& f, double level, int samples) {
    return to_py(to_json(trace_equipotential(f, level, samples)));
  });

  m.def("tree_report", [](const Polynomial& f, const Raster& r, int max_level, int max_stages) {
    return to_py(to_json(tree_report(f, r, max_level, max_stages), TreeOptions{}));
  }, py::arg("f"), py::arg("raster"), py::arg("max_level") = 3, py::arg("max_stages") = 200);
  m.def("limb_diameters", &limb_diameters);

  m.def("classify_parameter", [](const std::string& family, cplx p, int budget) {
    return std::string(to_string(classify_parameter(parse_family(family), p, budget)));
  }, py::arg("family"), py::arg("parameter"), py::arg("budget") = 200);

  m.def("julia_samples", &julia_samples, py::arg("f"), py::arg("count"), py::arg("seed") = 5);
  m.def("shape_of", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> mask,
                       std::tuple<double, double, double, double> box, cplx x) {
    if (mask.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "mask must be 2-D");
    const Grid grid(make_box(box), static_cast<int>(mask.shape(1)), static_cast<int>(mask.shape(0)));
    return shape_of(grid, std::span<const std::uint8_t>(mask.data(), grid.size()), x);
  }, py::arg("mask"), py::arg("box"), py::arg("x"));

  py::class_<Puzzle>(m, "Puzzle")
      .def(py::init<const Polynomial&, std::tuple<double, double, double, double>, int, double, int, int>(),
           py::arg("f"), py::arg("box") = std::make_tuple(0.0, 0.0, 4.0, 4.0), py::arg("resolution") = 512,
           py::arg("outer_level") = 0.5, py::arg("cycle_period") = 2, py::arg("depth") = 6)
      .def_property_readonly("external_tails", [](const Puzzle& p) {
        std::vector<std::string> out;
        for (const auto& t : p.graph.external_tails) out.push_back(t.theta.to_string());
        return out;
      })
      .def("piece_counts", [](const Puzzle& p) {
        std::vector<int> out;
        for (int n = 0; n <= p.set->max_depth(); ++n) out.push_back(p.set->stats(n).pieces);
        return out;
      })
      .def("refinement_violations", [](const Puzzle& p, int depth) { return p.set->stats(depth).refinement_violations; })
      .def("nest", [](const Puzzle& p, cplx z, int depth) { return to_py(to_json(p.set->nest(z, depth))); })
      .def("first_entry", [](const Puzzle& p, cplx z, int depth, int k) -> py::object {
        const Nest n = p.set->nest(z, depth);
        if (k < 0 || k >= static_cast<int>(n.pieces.size())) throw Error(ErrorCode::InvalidArgument, "k out of range");
        const auto e = p.set->first_entry(n, n.pieces[static_cast<std::size_t>(k)]);
        if (!e) return py::none();
        return py::make_tuple(e->r, e->degree);
      });
}
