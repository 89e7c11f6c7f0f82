#include <doctest.h>

#include <cmath>

#include "sbp/analysis.hpp"
#include "sbp/errors.hpp"
#include "sbp/solvers.hpp"
#include "support.hpp"

using namespace sbp;

namespace {

SatDiscretization make_disc(const std::string& bc, double alpha, long long n = 24, double phi = 2.0) {
  const SbpSecondDerivative op = build_d2(make_grid(n), 6, alpha);
  if (bc == "neumann") return build_discretization(op, BoundaryKind::neumann, BoundaryKind::neumann);
  if (bc == "dirichlet") return build_discretization(op, BoundaryKind::dirichlet, BoundaryKind::dirichlet, phi);
  return build_discretization(op, BoundaryKind::dirichlet, BoundaryKind::neumann, phi);
}

}  // namespace

TEST_CASE("manufactured forcing matches finite differences of the evaluators") {
  auto rng = sbp::testing::make_rng(21);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  const double d = 1e-4;
  for (const char* name : {"poly5", "quad", "heat_c", "wave_trig"}) {
    const ManufacturedSolution ms = make_solution(name);
    for (int s = 0; s < 20; ++s) {
      const double x = u01(rng), t = u01(rng);
      const double uxx = (ms.u(x + d, t) - 2 * ms.u(x, t) + ms.u(x - d, t)) / (d * d);
      const double ut = (ms.u(x, t + d) - ms.u(x, t - d)) / (2 * d);
      const double utt = (ms.u(x, t + d) - 2 * ms.u(x, t) + ms.u(x, t - d)) / (d * d);
      const double ux = (ms.u(x + d, t) - ms.u(x - d, t)) / (2 * d);
      const double scale = std::max(1.0, std::abs(ms.u_xx(x, t)));
      CHECK(std::abs(ms.u_x(x, t) - ux) < 1e-6 * scale);
      CHECK(std::abs(ms.u_xx(x, t) - uxx) < 1e-5 * scale);
      CHECK(std::abs(ms.u_t(x, t) - ut) < 1e-5 * scale);
      CHECK(std::abs(ms.u_tt(x, t) - utt) < 1e-4 * scale);
      CHECK(std::abs(ms.forcing(Equation::poisson, x, t) + uxx) < 1e-5 * scale);
    }
  }
  const ManufacturedSolution heat = make_solution("heat_c", 3.0);
  CHECK(std::abs(heat.forcing(Equation::heat, 0.3, 0.7)) < 1e-9);
  const ManufacturedSolution wave = make_solution("wave_trig");
  CHECK(std::abs(wave.forcing(Equation::wave, 0.3, 0.7)) < 1e-9);
  CHECK_THROWS_AS(make_solution("cubic"), UsageError);
}

TEST_CASE("error norms") {
  const Vector zeros(5, 0.0);
  const ErrorReport z = error_norms(zeros, Vector(5, 0.25));
  CHECK(z.h_norm == 0.0);
  CHECK(z.l2_norm == 0.0);
  CHECK(z.max_norm == 0.0);

  const std::size_t n = 8;
  const double h = 1.0 / n;
  const ErrorReport ones = error_norms(Vector(n + 1, 1.0), Vector(n + 1, h));
  CHECK(ones.h_norm == doctest::Approx(std::sqrt(n + 1.0) * std::sqrt(h)));
  CHECK(ones.l2_norm == doctest::Approx(std::sqrt(n + 1.0)));
  CHECK(ones.max_norm == 1.0);

  const SbpSecondDerivative op = build_d2(make_grid(24), 6, 490.0);
  Vector el(25, 0.0);
  el[0] = 1.0;
  CHECK(error_norms(el, op.norm_weights).h_norm == doctest::Approx(std::sqrt(13649.0 * op.grid.h / 43200)));

  auto rng = sbp::testing::make_rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector e = sbp::testing::random_vector(rng, 25);
    const ErrorReport r = error_norms(e, op.norm_weights);
    double max_w = 0.0;
    for (double w : op.norm_weights) max_w = std::max(max_w, w);
    CHECK(r.h_norm <= std::sqrt(max_w) * r.l2_norm + 1e-15);
  }
  CHECK_THROWS_AS(error_norms(Vector(3, 0.0), Vector(4, 1.0)), DimensionMismatch);
}

TEST_CASE("steady solves are exact on low-degree polynomials") {
  for (const char* bc : {"neumann", "dirichlet", "mixed"}) {
    const SteadyResult r = poisson_solve(make_disc(bc, 490.0), make_solution("quad"));
    CHECK_MESSAGE(r.error.max_norm <= 1e-9, bc);
  }
  const SteadyResult neumann = poisson_solve(make_disc("neumann", 486.0), make_solution("poly5"));
  CHECK(std::abs(mean(neumann.solution)) < 1e-12);
}

TEST_CASE("steady solve preconditions") {
  CHECK_THROWS_AS(poisson_solve(make_disc("dirichlet", 490.0, 24, 1.0), make_solution("quad")), SingularSystem);
  CHECK_THROWS_AS(poisson_solve(make_disc("neumann", alpha_star(24).threshold()), make_solution("quad")),
                  SingularInterior);
}

TEST_CASE("Neumann Poisson error is minimized near the tuned parameter") {
  double best = 1e300, best_alpha = 0.0;
  for (int i = 0; i <= 80; ++i) {
    const double alpha = 482.0 + 0.05 * i;
    const double e = poisson_solve(make_disc("neumann", alpha), make_solution("poly5")).error.h_norm;
    if (e < best) {
      best = e;
      best_alpha = alpha;
    }
  }
  CHECK(best_alpha >= 484.0);
  CHECK(best_alpha <= 484.6);
  const double ratio = poisson_solve(make_disc("neumann", 484.3), make_solution("poly5")).error.h_norm /
                       poisson_solve(make_disc("neumann", 490.0), make_solution("poly5")).error.h_norm;
  CHECK(ratio >= 0.85);
  CHECK(ratio <= 0.95);
}

TEST_CASE("time-independent quadratics stay exact under time marching") {
  const SatDiscretization disc = make_disc("mixed", 490.0, 24);
  const Trajectory heat = heat_solve(disc, make_solution("quad"), 0.01);
  CHECK(heat.summary.max_norm < 1e-9);
  const Trajectory wave = wave_solve(disc, make_solution("quad"), 0.1);
  CHECK(wave.summary.max_norm < 1e-9);
}

TEST_CASE("time step bookkeeping") {
  const SatDiscretization disc = make_disc("neumann", 490.0, 24);
  MarchOptions opt;
  opt.dt = 1e-4;
  opt.snapshot_stride = 7;
  const Trajectory tr = heat_solve(disc, make_solution("heat_c"), 0.00255, opt);
  CHECK(tr.steps == 26);
  CHECK(tr.times.size() == tr.steps);
  CHECK(tr.errors.size() == tr.steps);
  CHECK(tr.times.back() == doctest::Approx(0.00255).epsilon(1e-14));
  CHECK(tr.dt * 26 == doctest::Approx(0.00255).epsilon(1e-14));
  CHECK(tr.snapshots.front().time == 0.0);
  CHECK(tr.snapshots.size() == 1 + 26 / 7);
  REQUIRE(tr.summary.mean_over_time);

  const double rho = spectral_radius(disc);
  opt.dt = 3.0 / rho;
  CHECK_THROWS_AS(heat_solve(disc, make_solution("heat_c"), 0.1, opt), InvalidTimeStep);
  opt.dt = -1.0;
  CHECK_THROWS_AS(wave_solve(disc, make_solution("wave_trig"), 0.1, opt), InvalidTimeStep);
}

TEST_CASE("heat equation stability follows the stability threshold") {
  const SatDiscretization unstable = make_disc("neumann", 480.0, 30);
  bool raised = false;
  try {
    heat_solve(unstable, make_solution("heat_c", 3.0), 10.0);
  } catch (const UnstableStep& e) {
    raised = true;
    const Trajectory& partial = e.partial();
    REQUIRE(!partial.errors.empty());
    CHECK(partial.errors.back().h_norm > 10.0 * partial.errors.front().h_norm);
  }
  CHECK(raised);

  const Trajectory stable = heat_solve(make_disc("neumann", 490.0, 30), make_solution("heat_c", 3.0), 2.0);
  double peak = 0.0;
  for (const auto& e : stable.errors) peak = std::max(peak, e.h_norm);
  CHECK(peak <= 5.0 * *stable.summary.mean_over_time);
}

TEST_CASE("halving the time step leaves the spatial error plateau unchanged") {
  const SatDiscretization disc = make_disc("neumann", 490.0, 30);
  const Trajectory coarse = heat_solve(disc, make_solution("heat_c", 3.0), 0.5);
  MarchOptions half;
  half.dt = coarse.dt / 2;
  const Trajectory fine = heat_solve(disc, make_solution("heat_c", 3.0), 0.5, half);
  CHECK(std::abs(*fine.summary.mean_over_time / *coarse.summary.mean_over_time - 1.0) < 0.01);
}

TEST_CASE("wave error decreases with the penalty factor") {
  double previous = 1e300;
  for (double phi : {1.0, 2.0, 4.0, 8.0}) {
    const Trajectory tr = wave_solve(make_disc("dirichlet", 490.0, 30, phi), make_solution("wave_trig"), 2.0);
    CHECK(*tr.summary.mean_over_time < previous);
    previous = *tr.summary.mean_over_time;
  }
}

TEST_CASE("optimum sweep") {
  const Vector alphas = {482.5, 486.0, 490.0};
  const Vector phis = {1.2, 2.0, 4.0};
  const auto cells = optimum_sweep(24, alphas, phis, SweepTask::dirichlet, 1);
  const auto threaded = optimum_sweep(24, alphas, phis, SweepTask::dirichlet, 3);
  REQUIRE(cells.size() == 9);
  double min_error = 1e300, min_rel_rho = 1e300;
  bool any_pareto = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].alpha == alphas[i / 3]);
    CHECK(cells[i].phi == phis[i % 3]);
    CHECK(cells[i].rel_error >= 1.0);
    CHECK(cells[i].rel_rho >= 1.0);
    CHECK(cells[i].rel_error == threaded[i].rel_error);
    CHECK(cells[i].pareto == threaded[i].pareto);
    min_error = std::min(min_error, cells[i].rel_error);
    min_rel_rho = std::min(min_rel_rho, cells[i].rel_rho);
    any_pareto = any_pareto || cells[i].pareto;
  }
  CHECK(min_error == 1.0);
  CHECK(min_rel_rho == 1.0);
  CHECK(any_pareto);
  // No frontier cell is dominated by another cell.
  for (const auto& a : cells) {
    if (!a.pareto) continue;
    for (const auto& b : cells)
      CHECK_FALSE((b.rel_error <= a.rel_error && b.rel_rho <= a.rel_rho &&
                   (b.rel_error < a.rel_error || b.rel_rho < a.rel_rho)));
  }
  const SweepCell mixed = evaluate_cell(24, 486.0, 2.0, SweepTask::mixed);
  CHECK(mixed.error.h_norm > 0.0);
  CHECK_THROWS_AS(optimum_sweep(24, Vector{}, phis, SweepTask::dirichlet), UsageError);
}
