#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trunclap/eigen.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/geometry.hpp"
#include "trunclap/io.hpp"
#include "trunclap/radial.hpp"
#include "trunclap/solver.hpp"
#include "trunclap/verify.hpp"

namespace py = pybind11;
using namespace trunclap;

namespace {

ConvexBody domain_from(const std::string& text) { return parse_domain(nlohmann::json::parse(text)); }

SymMatrix sym_from(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  const int n = static_cast<int>(m.rows());
  std::vector<double> flat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flat[static_cast<std::size_t>(i) * n + j] = m(i, j);
  return SymMatrix::from_row_major(n, flat);
}

Eigen::MatrixXd positions(const Grid& g) {
  Eigen::MatrixXd x(g.size(), g.dim());
  for (int i = 0; i < g.size(); ++i) x.row(i) = g.position(i).transpose();
  return x;
}

SchemeConfig make_config(int k, const std::string& b, const std::string& b_sign, const std::string& method,
                         const ConvexBody& body) {
  DriftSpec d = parse_drift_spec(b);
  if (b_sign == "minus") d.sign = Side::minus;
  else if (b_sign != "plus") throw std::invalid_argument("b_sign must be 'plus' or 'minus'");
  SchemeConfig cfg;
  cfg.k = k;
  const Vec center = body.kind() == BodyKind::ball ? body.impl().center : Vec::Zero(body.dim());
  cfg.drift = d.drift(center);
  if (method == "explicit") cfg.method = SolveMethod::explicit_jacobi;
  else if (method != "policy") throw std::invalid_argument("method must be 'policy' or 'explicit'");
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Truncated Laplacian operators, radial profiles, convex-body geometry and grid solvers.";

  py::register_exception<NonexistenceThreshold>(m, "NonexistenceThreshold", PyExc_RuntimeError);
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", PyExc_RuntimeError);
  py::register_exception<BracketFailure>(m, "BracketFailure", PyExc_RuntimeError);

  m.def("pk_plus", [](const Eigen::MatrixXd& a, int k) { return pk_plus(sym_from(a), k); }, py::arg("matrix"), py::arg("k"),
        "Sum of the k largest eigenvalues of a symmetric matrix.");
  m.def("pk_minus", [](const Eigen::MatrixXd& a, int k) { return pk_minus(sym_from(a), k); }, py::arg("matrix"),
        py::arg("k"), "Sum of the k smallest eigenvalues of a symmetric matrix.");
  m.def("eigenvalues", [](const Eigen::MatrixXd& a) { return eigenvalues_sorted(sym_from(a)); }, py::arg("matrix"));

  py::class_<RadialProfile>(m, "RadialProfile")
      .def_property_readonly("regime", [](const RadialProfile& p) { return regime_name(p.regime); })
      .def_readonly("R", &RadialProfile::R)
      .def_readonly("glue_radii", &RadialProfile::glue_radii)
      .def("value", &RadialProfile::value, py::arg("r"))
      .def("first", &RadialProfile::first, py::arg("r"))
      .def("second", &RadialProfile::second, py::arg("r"))
      .def("__call__", &RadialProfile::value, py::arg("r"));

  m.def("profile_const_b", &profile_const_b, py::arg("b"), py::arg("R"), py::arg("k"));
  m.def("profile_minus_b", &profile_minus_b, py::arg("b"), py::arg("R"), py::arg("k"));
  m.def("critical_eigen_profile", &critical_eigen_profile, py::arg("mu"), py::arg("a"), py::arg("R"), py::arg("k"));
  m.def(
      "profile_weighted",
      [](const std::string& b, double R, int k, int N) { return profile_weighted(parse_drift_spec(b).radial(R, k, N)); },
      py::arg("b"), py::arg("R"), py::arg("k"), py::arg("N") = 2,
      "Radial profile for a drift spec such as 'radial:r' or 'radial:affine:c0,c1'.");

  m.def(
      "classify",
      [](const std::string& domain) {
        const auto body = domain_from(domain);
        const auto c = classify(body);
        py::dict gj;
        for (int j = 1; j < body.dim(); ++j) gj[py::int_(j)] = static_cast<bool>(c.gj[j]);
        py::dict out;
        out["d"] = c.d;
        out["cj_max"] = c.cj_max;
        out["gj"] = gj;
        out["diameter"] = body.diameter();
        return out;
      },
      py::arg("domain_json"));
  m.def("psi", [](const std::string& domain, const Vec& x) { return psi_value(domain_from(domain), x); },
        py::arg("domain_json"), py::arg("x"));

  m.def(
      "solve",
      [](const std::string& domain, double h, int k, const std::string& b, double f, const std::string& b_sign,
         const std::string& method) {
        const auto body = domain_from(domain);
        const auto cfg = make_config(k, b, b_sign, method, body);
        SolveReport rep;
        {
          py::gil_scoped_release release;
          rep = solve_dirichlet(body, [f](const Vec&) { return f; }, h, cfg);
        }
        py::dict out;
        out["outcome"] = outcome_name(rep.outcome);
        out["iterations"] = rep.iterations;
        out["residual"] = rep.residual;
        out["positions"] = positions(*rep.grid);
        out["field"] = rep.field;
        return out;
      },
      py::arg("domain_json"), py::arg("h"), py::arg("k") = 1, py::arg("b") = "0", py::arg("f") = -1.0,
      py::arg("b_sign") = "plus", py::arg("method") = "policy");

  m.def(
      "estimate_mu1",
      [](const std::string& domain, double h, double tol) {
        const auto body = domain_from(domain);
        EigenEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_mu1(body, h, SchemeConfig{}, tol);
        }
        py::dict out;
        out["mu_lo"] = e.mu_lo;
        out["mu_hi"] = e.mu_hi;
        out["mu"] = e.mu();
        out["positions"] = positions(*e.grid);
        out["eigenfunction"] = e.eigenfunction;
        return out;
      },
      py::arg("domain_json"), py::arg("h"), py::arg("tol") = 1e-2);
  m.def("mu_lower_bound", &mu_lower_bound, py::arg("k"), py::arg("b"), py::arg("R"));
  m.def(
      "critical_drift_gap_check",
      [](double R, int k) {
        const auto c = critical_drift_gap_check(R, k);
        py::dict out;
        out["mu"] = c.mu;
        out["max_residual"] = c.max_residual;
        out["perturbed_mu"] = c.perturbed_mu;
        out["perturbed_failure_detected"] = c.perturbed_failure_detected;
        out["failure_radius"] = c.failure_radius;
        return out;
      },
      py::arg("R"), py::arg("k"));

  m.def("interior_ball_delta", &interior_ball_delta, py::arg("R"), py::arg("t"), py::arg("dist"));

  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed, double tolerance_scale) {
        VerifyOptions o;
        o.seed = seed;
        o.tolerance_scale = tolerance_scale;
        return verify_summary_json(run_verify_suite(suite, o)).dump();
      },
      py::arg("suite") = "all", py::arg("seed") = 42, py::arg("tolerance_scale") = 1.0,
      "Run a property suite; returns the JSON summary as a string.");
}
