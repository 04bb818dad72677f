#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "transverse/bump.hpp"
#include "transverse/io.hpp"
#include "transverse/perturb.hpp"
#include "transverse/scenario.hpp"

namespace py = pybind11;
using namespace transverse;

namespace {

Box make_box(const Vec& lo, const Vec& hi) {
  Box b;
  b.lo = lo;
  b.hi = hi;
  return b;
}

// The pipeline result carries the state; expose the parts Python callers want.
py::dict result_dict(const PipelineResult& r) {
  py::dict d;
  d["report"] = r.report;
  d["links"] = r.state.chain().size();
  d["chain_dump"] = chain_dump(r.state.chain());
  d["failures"] = r.failures;
  py::list logs;
  for (const auto& log : r.logs) logs.append(to_string(log));
  d["logs"] = logs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Transversality by perturbing smooth triangulations";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<SamplingError>(m, "SamplingError", PyExc_RuntimeError);

  py::class_<SimplicialComplex>(m, "SimplicialComplex")
      .def_property_readonly("dim", &SimplicialComplex::dim)
      .def("count", &SimplicialComplex::count)
      .def("__len__", &SimplicialComplex::size)
      .def("vertices", [](const SimplicialComplex& k, SimplexId id) { return k.simplex(id).vertices; });

  py::class_<Mesh>(m, "Mesh")
      .def_readonly("complex", &Mesh::complex)
      .def_property_readonly("ambient_dim", [](const Mesh& mesh) { return mesh.realization.ambient_dim(); })
      .def("coord", [](const Mesh& mesh, int v) { return mesh.realization.coord(v); })
      .def("to_soff", &mesh_to_string);

  m.def("grid_triangulation",
        [](const Vec& lo, const Vec& hi, int res) { return grid_triangulation(make_box(lo, hi), res); },
        py::arg("lo"), py::arg("hi"), py::arg("resolution"));
  m.def("read_mesh_file", &read_mesh_file);
  m.def("subdivision_top_count", [](const Mesh& mesh) {
    Subdivision sd = barycentric_subdivision(mesh.complex, mesh.realization);
    return sd.complex.count(sd.complex.dim());
  });

  py::class_<SmoothMap>(m, "SmoothMap")
      .def_static("point", &SmoothMap::point)
      .def_static("line", &SmoothMap::line)
      .def_static("circle", py::overload_cast<Vec, double>(&SmoothMap::circle))
      .def_static("polynomial_curve", &SmoothMap::polynomial_curve)
      .def_static("torus_knot", &SmoothMap::torus_knot)
      .def_property_readonly("domain_dim", &SmoothMap::domain_dim)
      .def_property_readonly("ambient_dim", &SmoothMap::ambient_dim)
      .def_property_readonly("family", &SmoothMap::family_name)
      .def("eval", &SmoothMap::eval)
      .def("jacobian", &SmoothMap::jacobian);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("max_retries", &PipelineConfig::max_retries)
      .def_readwrite("tol_rank", &PipelineConfig::tol_rank)
      .def_readwrite("verify_density", &PipelineConfig::verify_density)
      .def_readwrite("surface_density", &PipelineConfig::surface_density)
      .def_readwrite("warp_rate", &PipelineConfig::warp_rate)
      .def("validate", &PipelineConfig::validate);

  py::class_<IntersectionRecord>(m, "IntersectionRecord")
      .def_readonly("simplex", &IntersectionRecord::simplex)
      .def_readonly("dim", &IntersectionRecord::dim)
      .def_readonly("point", &IntersectionRecord::point)
      .def_readonly("margin", &IntersectionRecord::margin)
      .def_property_readonly("classification",
                             [](const IntersectionRecord& r) { return to_string(r.classification); });

  py::class_<TransversalityReport>(m, "TransversalityReport")
      .def_readonly("passed", &TransversalityReport::pass)
      .def_readonly("records", &TransversalityReport::records)
      .def_readonly("transverse_count", &TransversalityReport::transverse_count)
      .def_readonly("tangent_count", &TransversalityReport::tangent_count)
      .def_readonly("skeleton_hits", &TransversalityReport::skeleton_hits)
      .def_readonly("min_margin", &TransversalityReport::min_margin)
      .def_readonly("min_vertex_distance", &TransversalityReport::min_vertex_distance)
      .def("to_csv", &report_csv);

  m.def("verify", [](const Mesh& mesh, const SmoothMap& h, const PipelineConfig& cfg) {
    return verify_triangulation(TriangulationState(mesh), h, cfg);
  });
  m.def("make_transverse", [](const Mesh& mesh, const SmoothMap& h, const PipelineConfig& cfg) {
    try {
      return result_dict(make_transverse(mesh, h, cfg));
    } catch (const PipelineError& e) {
      py::dict d = result_dict(e.result());
      d["error"] = std::string(e.what());
      return d;
    }
  });
  m.def("run_scenario", [](const std::string& path, const std::string& out_dir, bool verify_only) {
    RunOutcome r = run_scenario(load_scenario(path), out_dir, verify_only);
    py::dict d;
    d["exit_code"] = r.exit_code;
    d["report"] = r.report;
    d["links"] = r.links;
    d["files"] = r.files;
    return d;
  }, py::arg("path"), py::arg("out_dir"), py::arg("verify_only") = false);

  m.def("transversality_margin", &transversality_margin);
  m.def("rho", &bump::rho);
  m.def("rho_l", &bump::rho_l);
  m.def("beta", &bump::beta);
  m.def("warp", &bump::warp, py::arg("t"), py::arg("rate") = 1.0);
}
