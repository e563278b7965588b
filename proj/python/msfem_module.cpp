// Python bindings for the main operations.
#include <algorithm>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msfem/bench.hpp"
#include "msfem/homogenization.hpp"

namespace py = pybind11;
using namespace msfem;

namespace {

struct Meshes {
  CoarseMesh coarse;
  FineMesh fine;
};

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> tensors(const std::vector<Mat2>& A) {
  py::array_t<double> out({static_cast<py::ssize_t>(A.size()), py::ssize_t{2}, py::ssize_t{2}});
  auto r = out.mutable_unchecked<3>();
  for (size_t e = 0; e < A.size(); ++e)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(e, i, j) = A[e][2 * i + j];
  return out;
}

py::array_t<double> vectors(const std::vector<Vec2>& B) {
  py::array_t<double> out({static_cast<py::ssize_t>(B.size()), py::ssize_t{2}});
  auto r = out.mutable_unchecked<2>();
  for (size_t e = 0; e < B.size(); ++e)
    for (int i = 0; i < 2; ++i) r(e, i) = B[e][i];
  return out;
}

py::array_t<double> mat2(const Mat2& A) {
  py::array_t<double> out({py::ssize_t{2}, py::ssize_t{2}});
  auto r = out.mutable_unchecked<2>();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = A[2 * i + j];
  return out;
}

py::dict coefficients(const EffectiveCoefficients& c) {
  py::dict d;
  d["M"] = to_array(c.M);
  d["B1"] = vectors(c.B1);
  d["B2"] = vectors(c.B2);
  d["A"] = tensors(c.A);
  return d;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["H"] = 1.0 / r.n;
  d["n"] = r.n;
  d["method"] = r.method.token();
  d["rel_err"] = r.rel_err;
  d["rel_diff_G"] = r.rel_diff_G;
  d["offline_seconds"] = r.offline_seconds;
  d["online_seconds"] = r.online_seconds;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_msfem, m) {
  m.doc() = "Multiscale finite elements with non-intrusive effective coefficients";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", m.attr("Error"));
  py::register_exception<GlueSingular>(m, "GlueSingular", m.attr("Error"));
  py::register_exception<SingularMatrix>(m, "SingularMatrix", m.attr("Error"));
  py::register_exception<InvalidArgument>(m, "InvalidArgument", m.attr("Error"));
  py::register_exception<RegistryError>(m, "RegistryError", m.attr("Error"));

  py::class_<ProblemSpec>(m, "Problem")
      .def_readonly("eps", &ProblemSpec::eps)
      .def_readonly("m", &ProblemSpec::m)
      .def_readonly("M", &ProblemSpec::M)
      .def_property(
          "rhs", [](const ProblemSpec& p) { return rhs_name(p.rhs); },
          [](ProblemSpec& p, const std::string& s) { p.rhs = rhs_from_name(s); })
      .def("coefficient", [](const ProblemSpec& p, double x, double y) { return mat2(eval_coefficient(p, {x, y}).A); })
      .def("__repr__", [](const ProblemSpec& p) { return "Problem(" + p.canonical() + ")"; });

  m.def(
      "make_problem",
      [](const std::string& name, const std::vector<double>& params, double eps, const std::string& rhs) {
        ProblemSpec p = make_problem(name, params, eps);
        p.rhs = rhs_from_name(rhs);
        return p;
      },
      py::arg("name"), py::arg("params") = std::vector<double>{}, py::arg("eps") = 0.0, py::arg("rhs") = "sin");

  py::class_<Meshes>(m, "Meshes")
      .def(py::init([](int n, int r) {
             Meshes s;
             s.coarse = build_coarse_mesh(n);
             s.fine = build_fine_mesh(s.coarse, r);
             return s;
           }),
           py::arg("n"), py::arg("r"))
      .def_property_readonly("num_coarse_elements", [](const Meshes& s) { return s.coarse.num_elements(); })
      .def_property_readonly("num_fine_vertices", [](const Meshes& s) { return s.fine.num_vertices(); })
      .def_property_readonly("fine_vertices", [](const Meshes& s) {
        py::array_t<double> out({static_cast<py::ssize_t>(s.fine.vertices.size()), py::ssize_t{2}});
        auto r = out.mutable_unchecked<2>();
        for (size_t i = 0; i < s.fine.vertices.size(); ++i) {
          r(i, 0) = s.fine.vertices[i].x;
          r(i, 1) = s.fine.vertices[i].y;
        }
        return out;
      });

  py::class_<MethodConfig>(m, "Method")
      .def(py::init([](const std::string& token, double rho) { return MethodConfig::parse(token, rho); }),
           py::arg("token"), py::arg("rho") = 3.0)
      .def_property_readonly("token", &MethodConfig::token)
      .def_readonly("rho", &MethodConfig::rho)
      .def("__repr__", [](const MethodConfig& c) { return "Method('" + c.token() + "')"; });

  py::class_<OfflineData>(m, "OfflineData")
      .def_property_readonly("pg", [](const OfflineData& o) { return coefficients(o.pg); })
      .def_property_readonly("galerkin", [](const OfflineData& o) { return coefficients(o.galerkin); })
      .def_property_readonly("glue_det_ratios", [](const OfflineData& o) {
        std::vector<double> r;
        for (const auto& cs : o.correctors) r.push_back(cs.glue_det_ratio);
        return to_array(r);
      })
      .def("min_eig", [](const OfflineData& o, double m) { return to_array(coercivity_check(o.galerkin, m).min_eig); },
           py::arg("m") = 1.0, "Smallest eigenvalue of sym(Abar) per element, Galerkin flavor.");

  m.def(
      "offline",
      [](const Meshes& s, const ProblemSpec& p, const MethodConfig& c, int threads) {
        py::gil_scoped_release release;
        return offline(s.coarse, s.fine, p, c, threads);
      },
      py::arg("meshes"), py::arg("problem"), py::arg("method"), py::arg("threads") = 1);

  py::class_<MultiscaleSolution>(m, "Solution")
      .def_property_readonly("method", [](const MultiscaleSolution& u) { return u.cfg.token(); });

  m.def(
      "solve",
      [](const Meshes& s, const ProblemSpec& p, const MethodConfig& c, const OfflineData& off) {
        py::gil_scoped_release release;
        return run_method(s.coarse, s.fine, p, c, off);
      },
      py::arg("meshes"), py::arg("problem"), py::arg("method"), py::arg("offline"));

  m.def(
      "reference_solve",
      [](const Meshes& s, const ProblemSpec& p) {
        std::vector<double> u;
        {
          py::gil_scoped_release release;
          u = reference_solve(s.fine, p);
        }
        return to_array(u);
      },
      py::arg("meshes"), py::arg("problem"), "Fine P1 solution at the fine vertices.");

  m.def(
      "relative_h1_error",
      [](const Meshes& s, const MultiscaleSolution& u, const std::vector<double>& ref) {
        return broken_h1_error(to_broken(s.fine, u), to_broken(s.fine, ref), s.fine).relative;
      },
      py::arg("meshes"), py::arg("solution"), py::arg("reference"));
  m.def(
      "relative_h1_difference",
      [](const Meshes& s, const MultiscaleSolution& u, const MultiscaleSolution& v) {
        return broken_h1_error(to_broken(s.fine, u), to_broken(s.fine, v), s.fine).relative;
      },
      py::arg("meshes"), py::arg("u"), py::arg("v"));

  m.def(
      "cell_tensor",
      [](const std::function<py::object(double, double)>& A, int n) {
        PeriodicSampler sampler = [&](Point y) {
          const auto a = py::cast<py::array_t<double, py::array::c_style | py::array::forcecast>>(A(y.x, y.y));
          if (a.size() != 4) throw InvalidArgument("cell_tensor: coefficient must return a 2x2 array");
          const double* d = a.data();
          return Mat2{d[0], d[1], d[2], d[3]};
        };
        return mat2(solve_cell_problems(sampler, n).Astar);
      },
      py::arg("coefficient"), py::arg("n"), "Homogenized tensor of a 1-periodic coefficient y -> 2x2 array.");
  m.def(
      "cell_tensor_of",
      [](const ProblemSpec& p, int n) {
        Mat2 A;
        {
          py::gil_scoped_release release;
          A = solve_cell_problems([&](Point y) { return periodic_profile(p, y); }, n).Astar;
        }
        return mat2(A);
      },
      py::arg("problem"), py::arg("n"), "Homogenized tensor of a registered periodic coefficient.");
  m.def("laminate_tensor", [](double a1, double a2) { return mat2(laminate_tensor(a1, a2)); });
  m.def("checkerboard_tensor", [](double a1, double a2) { return mat2(checkerboard_tensor(a1, a2)); });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("parse", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("serialize", [](const ExperimentConfig& c) { return serialize(c); })
      .def_readonly("coarse", &ExperimentConfig::coarse)
      .def_readonly("fine", &ExperimentConfig::fine)
      .def_readonly("eps", &ExperimentConfig::eps)
      .def_property_readonly("methods", [](const ExperimentConfig& c) {
        std::vector<std::string> t;
        for (const auto& mc : c.method_configs()) t.push_back(mc.token());
        return t;
      });

  m.def(
      "run_experiment",
      [](const ExperimentConfig& c, int threads, const std::string& cache) {
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(c, threads, cache);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("cache") = "");
  m.def(
      "sweep_csv",
      [](const ExperimentConfig& c, int threads, const std::string& cache) {
        py::gil_scoped_release release;
        return to_csv(run_experiment(c, threads, cache), c.timings);
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("cache") = "");
}
