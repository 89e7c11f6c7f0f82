#include <algorithm>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbp/analysis.hpp"
#include "sbp/errors.hpp"
#include "sbp/operators.hpp"
#include "sbp/pseudoinverse.hpp"
#include "sbp/sat.hpp"
#include "sbp/solvers.hpp"

namespace py = pybind11;
using namespace sbp;

namespace {

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) view(i, j) = m(i, j);
  return out;
}

py::array_t<double> to_numpy(const Vector& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

BoundaryKind parse_kind(const std::string& name) {
  if (name == "dirichlet") return BoundaryKind::dirichlet;
  if (name == "neumann") return BoundaryKind::neumann;
  throw UsageError("unknown boundary condition '" + name + "'");
}

std::pair<BoundaryKind, BoundaryKind> parse_bc(const std::string& name) {
  if (name == "mixed") return {BoundaryKind::dirichlet, BoundaryKind::neumann};
  const BoundaryKind kind = parse_kind(name);
  return {kind, kind};
}

SpectrumFamily parse_family(const std::string& name) {
  if (name == "none" || name == "stiffness") return SpectrumFamily::stiffness;
  if (name == "neumann") return SpectrumFamily::neumann;
  if (name == "dirichlet") return SpectrumFamily::dirichlet;
  if (name == "mixed") return SpectrumFamily::mixed;
  throw UsageError("unknown spectrum family '" + name + "'");
}

py::dict operator_dict(const SbpSecondDerivative& op) {
  py::dict d;
  d["n"] = op.grid.n;
  d["h"] = op.grid.h;
  d["order"] = op.interior_order;
  d["alpha"] = op.free_parameter;
  d["x"] = to_numpy(op.grid.nodes);
  d["H"] = to_numpy(op.norm_weights);
  d["A"] = to_numpy(op.stiffness);
  d["dL"] = to_numpy(op.left_derivative);
  d["dR"] = to_numpy(op.right_derivative);
  d["D"] = to_numpy(op.matrix);
  return d;
}

py::dict spectrum_dict(const SpectrumReport& r) {
  py::dict d;
  d["eigenvalues"] = to_numpy(r.eigenvalues);
  d["spectral_radius"] = r.spectral_radius;
  d["min_eigenvalue"] = r.min_eigenvalue;
  d["numeric_rank"] = r.numeric_rank;
  return d;
}

py::dict error_dict(const ErrorReport& e) {
  py::dict d;
  d["h_norm"] = e.h_norm;
  d["l2_norm"] = e.l2_norm;
  d["max_norm"] = e.max_norm;
  if (e.mean_over_time) d["mean_h_norm"] = *e.mean_over_time;
  return d;
}

SatDiscretization discretization(long long n, int order, std::optional<double> alpha, const std::string& bc,
                                 double phi) {
  const auto [left, right] = parse_bc(bc);
  return build_discretization(build_d2(make_grid(n), order, alpha), left, right, phi);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Summation-by-parts second-derivative operators and SAT discretizations";

  const auto& base_error = py::register_exception<Error>(m, "SbpError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base_error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base_error.ptr());

  m.attr("BETA_ACCURACY") = kBetaAccuracy;
  m.attr("BETA_BANDWIDTH") = kBetaBandwidth;

  m.def(
      "build_d2", [](long long n, int order, std::optional<double> alpha) { return operator_dict(build_d2(make_grid(n), order, alpha)); },
      py::arg("n"), py::arg("order") = 6, py::arg("alpha") = py::none(),
      "H, A, boundary derivative rows and D2 as numpy arrays");

  m.def(
      "verify",
      [](long long n, int order, std::optional<double> alpha) {
        py::list rows;
        for (const auto& c : verify_sbp(build_d2(make_grid(n), order, alpha)).checks) {
          py::dict d;
          d["check"] = c.name;
          d["residual"] = c.residual;
          d["tolerance"] = c.tolerance;
          d["passed"] = c.passed();
          rows.append(d);
        }
        return rows;
      },
      py::arg("n"), py::arg("order") = 6, py::arg("alpha") = py::none());

  m.def(
      "alpha_star",
      [](std::size_t n) {
        const AlphaStarResult r = alpha_star(n);
        return py::make_tuple(r.roots[0], r.roots[1]);
      },
      py::arg("n"), "both roots of the boundary determinant; the larger one is the threshold");
  m.def("alpha_star_spectral", &alpha_star_spectral, py::arg("n"), py::arg("tolerance") = 1e-9);

  m.def(
      "borrowing", [](long long n, double alpha) { return borrowing_capacity(build_d2(make_grid(n), 6, alpha)).gamma; },
      py::arg("n"), py::arg("alpha"));

  m.def(
      "compatibility",
      [](long long n, double alpha, double beta) {
        const Grid g = make_grid(n);
        const CompatibilityReport r = compatibility(build_d2(g, 6, alpha), build_d1_beta(g, beta));
        return py::make_tuple(r.compatible, r.min_eig_R);
      },
      py::arg("n"), py::arg("alpha"), py::arg("beta"));
  m.def("compatibility_min_alpha", &compatibility_min_alpha, py::arg("beta"), py::arg("n") = 24);

  m.def(
      "truncation_optimum",
      [](std::size_t n) {
        const TruncationOptimum t = truncation_optimum(n);
        return py::make_tuple(t.alpha_l2, t.alpha_h);
      },
      py::arg("n") = 24);

  m.def(
      "moore_penrose", [](long long n, int order, std::optional<double> alpha) { return to_numpy(moore_penrose(build_d2(make_grid(n), order, alpha))); },
      py::arg("n"), py::arg("order") = 6, py::arg("alpha") = py::none());

  m.def(
      "spectrum",
      [](const std::string& family, std::size_t n, double alpha, double phi) {
        return spectrum_dict(family_spectrum(parse_family(family), n, alpha, phi));
      },
      py::arg("family"), py::arg("n"), py::arg("alpha"), py::arg("phi") = 1.0,
      "eigenvalues of A ('none') or of -D for a SAT family");

  m.def(
      "sat_matrix",
      [](long long n, double alpha, const std::string& bc, double phi) {
        return to_numpy(discretization(n, 6, alpha, bc, phi).matrix);
      },
      py::arg("n"), py::arg("alpha"), py::arg("bc") = "neumann", py::arg("phi") = 1.0);

  m.def(
      "poisson",
      [](long long n, double alpha, const std::string& bc, double phi, const std::string& solution) {
        const SteadyResult r = poisson_solve(discretization(n, 6, alpha, bc, phi), make_solution(solution));
        py::dict d = error_dict(r.error);
        d["solution"] = to_numpy(r.solution);
        return d;
      },
      py::arg("n"), py::arg("alpha"), py::arg("bc") = "neumann", py::arg("phi") = 2.0, py::arg("solution") = "poly5");

  for (const char* name : {"heat", "wave"}) {
    const bool heat = std::string(name) == "heat";
    m.def(
        name,
        [heat](long long n, double alpha, double t_end, const std::string& bc, double phi, std::optional<double> dt,
               double parameter) {
          MarchOptions options;
          options.dt = dt;
          const SatDiscretization disc = discretization(n, 6, alpha, bc, phi);
          const ManufacturedSolution ms = make_solution(heat ? "heat_c" : "wave_trig", parameter);
          const Trajectory tr = heat ? heat_solve(disc, ms, t_end, options) : wave_solve(disc, ms, t_end, options);
          py::dict d = error_dict(tr.summary);
          d["dt"] = tr.dt;
          d["steps"] = tr.steps;
          return d;
        },
        py::arg("n"), py::arg("alpha"), py::arg("t_end"), py::arg("bc") = heat ? "neumann" : "dirichlet",
        py::arg("phi") = 2.0, py::arg("dt") = py::none(), py::arg("c") = 3.0);
  }

  m.def(
      "optimum_sweep",
      [](std::size_t n, const std::vector<double>& alphas, const std::vector<double>& phis, const std::string& bc,
         unsigned jobs) {
        const SweepTask task = bc == "mixed" ? SweepTask::mixed : SweepTask::dirichlet;
        py::list rows;
        for (const SweepCell& c : optimum_sweep(n, alphas, phis, task, jobs)) {
          py::dict d = error_dict(c.error);
          d["alpha"] = c.alpha;
          d["phi"] = c.phi;
          d["rho"] = c.rho;
          d["rel_error"] = c.rel_error;
          d["rel_rho"] = c.rel_rho;
          d["pareto"] = c.pareto;
          rows.append(d);
        }
        return rows;
      },
      py::arg("n"), py::arg("alphas"), py::arg("phis"), py::arg("bc") = "dirichlet", py::arg("jobs") = 1);
}
