#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netiqc/netfile.hpp"

namespace py = pybind11;
using namespace netiqc;

namespace {

py::dict result_dict(const FeasibilityResult& r) {
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["t_star"] = r.t_star;
  d["lower_bound"] = r.lower_bound;
  d["eps_feas"] = r.eps_feas;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["certificate"] = r.certificate;
  return d;
}

AnalysisOptions make_options(const std::string& path, const std::string& mode,
                             const std::string& x, int merge) {
  AnalysisOptions o;
  if (path == "sparse") o.path = LmiPath::Sparse;
  else if (path == "lumped") o.path = LmiPath::Lumped;
  else if (path == "both") o.path = LmiPath::Both;
  else throw std::invalid_argument("path must be sparse, lumped or both");
  if (mode == "central") o.mode = SolveMode::Centralized;
  else if (mode == "dist") o.mode = SolveMode::Distributed;
  else throw std::invalid_argument("mode must be central or dist");
  if (x == "scalar") o.x_mode = XMode::SharedScalar;
  else if (x == "diag") o.x_mode = XMode::Diagonal;
  else throw std::invalid_argument("x must be scalar or diag");
  o.merge_max_order = merge;
  return o;
}

}  // namespace

PYBIND11_MODULE(_netiqc, m) {
  m.doc() = "Sparse IQC robust stability analysis of interconnected systems";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Network>(m, "Network")
      .def_property_readonly("size", &Network::size)
      .def_property_readonly("total_d", &Network::total_d)
      .def_property_readonly("total_m", &Network::total_m)
      .def_property_readonly("total_l", &Network::total_l)
      .def_property_readonly("gamma", [](const Network& n) { return n.gamma().assembled(); })
      .def("lumped", [](const Network& n, double w) { return lumped_system(n, w); }, py::arg("omega"))
      .def("to_text", [](const Network& n) {
        std::ostringstream os;
        write_network_file(os, NetworkFile{n, std::nullopt, {}, {}});
        return os.str();
      });

  m.def("chain",
        [](int n, double pole, double gain, double coupling, double delta) {
          return make_chain(n, ChainTemplate{pole, gain, coupling, delta});
        },
        py::arg("n"), py::arg("pole") = 1.0, py::arg("gain") = 0.5, py::arg("coupling") = 0.1,
        py::arg("delta") = 1.0, "Chain of n first-order uncertain subsystems.");

  m.def("parse_network", [](const std::string& text) { return parse_network_file(text).network; },
        py::arg("text"));

  m.def("structure",
        [](const Network& n, double omega, int merge) {
          const auto form = build_sparse_lmi(n, omega, XMode::SharedScalar);
          const auto s = clique_stats(form, merge);
          py::dict d;
          d["order"] = s.order;
          d["nonzeros"] = s.nonzeros;
          d["cliques"] = s.cliques;
          d["max_clique"] = s.max_clique;
          d["merged_cliques"] = s.solved_cliques;
          d["merged_max_clique"] = s.solved_max_clique;
          return d;
        },
        py::arg("network"), py::arg("omega") = 1.0, py::arg("merge") = 0,
        "Chordal structure of the sparse LMI.");

  m.def("analyze",
        [](const Network& n, std::vector<double> grid, const std::string& path,
           const std::string& mode, const std::string& x, int merge) {
          const auto opts = make_options(path, mode, x, merge);
          const auto rep = analyze(n, FrequencyGrid::of(std::move(grid)), opts);
          py::dict d;
          d["overall"] = to_string(rep.overall);
          py::list recs;
          for (const auto& r : rep.records) {
            py::dict rd;
            rd["omega"] = r.omega;
            rd["wellposed"] = r.wellposed;
            if (r.sparse) rd["sparse"] = result_dict(*r.sparse);
            if (r.lumped) rd["lumped"] = result_dict(*r.lumped);
            recs.append(rd);
          }
          d["records"] = recs;
          return d;
        },
        py::arg("network"), py::arg("grid"), py::arg("path") = "sparse",
        py::arg("mode") = "central", py::arg("x") = "scalar", py::arg("merge") = 0);

  m.def("mu_upper", [](const Network& n, double w) { return mu_upper_oracle(n, w); },
        py::arg("network"), py::arg("omega"));

  m.def("eig_sym", [](const MatrixXr& a) {
    auto e = eig_sym(a);
    return py::make_tuple(e.values, e.vectors);
  });
  m.def("project_nsd", &project_nsd);
}
