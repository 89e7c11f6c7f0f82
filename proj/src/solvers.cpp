#include "sbp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sbp/parallel.hpp"
#include "sbp/pseudoinverse.hpp"

namespace sbp {

double ManufacturedSolution::forcing(Equation eq, double x, double t) const {
  switch (eq) {
    case Equation::poisson:
      return -u_xx(x, t);
    case Equation::heat:
      return u_t(x, t) - u_xx(x, t);
    case Equation::wave:
      return u_tt(x, t) - u_xx(x, t);
  }
  return 0.0;
}

double ManufacturedSolution::boundary_data(BoundaryKind kind, double x, double t) const {
  return kind == BoundaryKind::dirichlet ? u(x, t) : u_x(x, t);
}

ManufacturedSolution make_solution(const std::string& name, double parameter) {
  ManufacturedSolution ms;
  ms.name = name;
  auto zero = [](double, double) { return 0.0; };
  if (name == "poly5") {
    ms.u = [](double x, double) { return std::pow(x, 5); };
    ms.u_x = [](double x, double) { return 5.0 * std::pow(x, 4); };
    ms.u_xx = [](double x, double) { return 20.0 * std::pow(x, 3); };
    ms.u_t = zero;
    ms.u_tt = zero;
  } else if (name == "quad") {
    ms.u = [](double x, double) { return x * x; };
    ms.u_x = [](double x, double) { return 2.0 * x; };
    ms.u_xx = [](double, double) { return 2.0; };
    ms.u_t = zero;
    ms.u_tt = zero;
  } else if (name == "heat_c") {
    const double c = parameter;
    ms.parameter = c;
    const double scale = std::exp(c) + std::exp(-c);
    // u = [sin(cx + 2c²t)·e^{c(x-1)} + sin(-cx + 2c²t)·e^{-c(x-1)}] / (e^c + e^{-c})
    struct Parts {
      double s1, c1, e1, s2, c2, e2;
    };
    auto parts = [c](double x, double t) {
      const double a1 = c * x + 2 * c * c * t;
      const double a2 = -c * x + 2 * c * c * t;
      return Parts{std::sin(a1), std::cos(a1), std::exp(c * (x - 1)), std::sin(a2), std::cos(a2), std::exp(-c * (x - 1))};
    };
    ms.u = [=](double x, double t) {
      const Parts p = parts(x, t);
      return (p.s1 * p.e1 + p.s2 * p.e2) / scale;
    };
    ms.u_x = [=](double x, double t) {
      const Parts p = parts(x, t);
      return c * ((p.c1 + p.s1) * p.e1 - (p.c2 + p.s2) * p.e2) / scale;
    };
    ms.u_xx = [=](double x, double t) {
      const Parts p = parts(x, t);
      return 2 * c * c * (p.c1 * p.e1 + p.c2 * p.e2) / scale;
    };
    ms.u_t = ms.u_xx;
    ms.u_tt = [=](double x, double t) {
      const Parts p = parts(x, t);
      return -4 * c * c * c * c * (p.s1 * p.e1 + p.s2 * p.e2) / scale;
    };
  } else if (name == "wave_trig") {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ms.u = [](double x, double t) { return std::cos(two_pi * x + 1) * std::cos(two_pi * t + 2); };
    ms.u_x = [](double x, double t) { return -two_pi * std::sin(two_pi * x + 1) * std::cos(two_pi * t + 2); };
    ms.u_xx = [](double x, double t) { return -two_pi * two_pi * std::cos(two_pi * x + 1) * std::cos(two_pi * t + 2); };
    ms.u_t = [](double x, double t) { return -two_pi * std::cos(two_pi * x + 1) * std::sin(two_pi * t + 2); };
    ms.u_tt = ms.u_xx;
  } else {
    throw UsageError("unknown manufactured solution '" + name + "'");
  }
  return ms;
}

ErrorReport error_norms(std::span<const double> eps, std::span<const double> norm_weights) {
  if (eps.size() != norm_weights.size()) throw DimensionMismatch("error vector and norm differ in length");
  ErrorReport r;
  double hs = 0.0, ls = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    hs += norm_weights[i] * eps[i] * eps[i];
    ls += eps[i] * eps[i];
    r.max_norm = std::max(r.max_norm, std::abs(eps[i]));
  }
  r.h_norm = std::sqrt(hs);
  r.l2_norm = std::sqrt(ls);
  return r;
}

namespace {

Vector sample(const ManufacturedSolution::Field& field, const Vector& nodes, double t) {
  Vector v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = field(nodes[i], t);
  return v;
}

Vector forcing_at(const SatDiscretization& disc, const ManufacturedSolution& ms, Equation eq, double t) {
  const Vector& x = disc.op.grid.nodes;
  Vector f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = ms.forcing(eq, x[i], t);
  return assemble_forcing(disc, f, ms.boundary_data(disc.bc_left, 0.0, t),
                          ms.boundary_data(disc.bc_right, 1.0, t));
}

std::size_t step_count(double t_end, double& dt) {
  if (!(t_end >= 0.0)) throw UsageError("t_end must be non-negative");
  if (t_end == 0.0) return 0;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  dt = t_end / static_cast<double>(std::max<std::size_t>(steps, 1));
  return std::max<std::size_t>(steps, 1);
}

class Recorder {
 public:
  Recorder(const SatDiscretization& disc, const ManufacturedSolution& ms, double dt, std::size_t stride)
      : disc_(disc), ms_(ms), stride_(std::max<std::size_t>(stride, 1)) {
    traj_.dt = dt;
    const Vector u0 = sample(ms.u, disc.op.grid.nodes, 0.0);
    threshold_ = 1e6 * std::max(error_norms(u0, disc.op.norm_weights).h_norm, 1.0);
  }

  void initial(const Vector& v) { traj_.snapshots.push_back({0.0, v}); }

  void record(std::size_t step, double t, const Vector& v) {
    const Vector exact = sample(ms_.u, disc_.op.grid.nodes, t);
    Vector eps = subtract(exact, v);
    const ErrorReport e = error_norms(eps, disc_.op.norm_weights);
    traj_.times.push_back(t);
    traj_.errors.push_back(e);
    traj_.steps = step;
    if (step % stride_ == 0) traj_.snapshots.push_back({t, v});
    if (!std::isfinite(e.h_norm) || e.h_norm > threshold_) {
      traj_.final_solution = v;
      finish();
      throw UnstableStep("error " + describe(e.h_norm) + " at t = " + describe(t), traj_);
    }
  }

  Trajectory done(const Vector& v) {
    traj_.final_solution = v;
    finish();
    return std::move(traj_);
  }

 private:
  void finish() {
    if (traj_.errors.empty()) return;
    traj_.summary = traj_.errors.back();
    double sum = 0.0;
    for (const auto& e : traj_.errors) sum += e.h_norm;
    traj_.summary.mean_over_time = sum / static_cast<double>(traj_.errors.size());
  }

  const SatDiscretization& disc_;
  const ManufacturedSolution& ms_;
  std::size_t stride_;
  double threshold_ = 0.0;
  Trajectory traj_;
};

}  // namespace

SteadyResult poisson_solve(const SatDiscretization& disc, const ManufacturedSolution& ms) {
  const Vector& x = disc.op.grid.nodes;
  const Vector& w = disc.op.norm_weights;
  const Vector forcing = forcing_at(disc, ms, Equation::poisson, 0.0);
  Vector rhs(forcing.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = w[i] * forcing[i];
  const Vector exact = sample(ms.u, x, 0.0);

  SteadyResult result;
  if (disc.any_dirichlet()) {
    if (!(disc.phi > 1.0)) throw SingularSystem("penalty factor 1 makes the Dirichlet system singular");
    try {
      result.solution = LuFactorization(-1.0 * disc.symmetric_form).solve(rhs);
    } catch (const SingularMatrix& e) {
      throw SingularSystem(e.what());
    }
    result.error = error_norms(subtract(exact, result.solution), w);
  } else {
    result.solution = solve_neumann_system(disc.op, rhs);
    Vector eps = subtract(exact, result.solution);
    const double m = mean(exact);
    for (double& e : eps) e -= m;
    result.error = error_norms(eps, w);
  }
  return result;
}

double spectral_radius(const SatDiscretization& disc) { return negated_spectrum(disc).spectral_radius; }

double default_heat_dt(double rho) { return std::min(2.0 / rho, 2.5e-4); }

double default_wave_dt(double rho) { return 0.1 * 2.6 / std::sqrt(rho); }

Trajectory heat_solve(const SatDiscretization& disc, const ManufacturedSolution& ms, double t_end,
                      const MarchOptions& options) {
  const double rho = spectral_radius(disc);
  double dt = options.dt.value_or(default_heat_dt(rho));
  if (!(dt > 0.0) || dt * rho > 2.5 * (1 + 1e-12))
    throw InvalidTimeStep("heat step must satisfy 0 < dt <= 2.5/rho = " + describe(2.5 / rho));
  const std::size_t steps = step_count(t_end, dt);

  const Vector& x = disc.op.grid.nodes;
  const Matrix& d = disc.matrix;
  auto rhs = [&](double t, const Vector& v) {
    Vector r = d * v;
    axpy(1.0, forcing_at(disc, ms, Equation::heat, t), r);
    return r;
  };

  Vector v = sample(ms.u, x, 0.0);
  Recorder rec(disc, ms, dt, options.snapshot_stride);
  rec.initial(v);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const Vector k1 = rhs(t, v);
    Vector tmp = v;
    axpy(0.5 * dt, k1, tmp);
    const Vector k2 = rhs(t + 0.5 * dt, tmp);
    tmp = v;
    axpy(0.5 * dt, k2, tmp);
    const Vector k3 = rhs(t + 0.5 * dt, tmp);
    tmp = v;
    axpy(dt, k3, tmp);
    const Vector k4 = rhs(t + dt, tmp);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    rec.record(s + 1, static_cast<double>(s + 1) * dt, v);
  }
  return rec.done(v);
}

Trajectory wave_solve(const SatDiscretization& disc, const ManufacturedSolution& ms, double t_end,
                      const MarchOptions& options) {
  const double rho = spectral_radius(disc);
  double dt = options.dt.value_or(default_wave_dt(rho));
  if (!(dt > 0.0) || dt * std::sqrt(rho) > 2.6 * (1 + 1e-12))
    throw InvalidTimeStep("wave step must satisfy 0 < dt <= 2.6/sqrt(rho) = " + describe(2.6 / std::sqrt(rho)));
  const std::size_t steps = step_count(t_end, dt);

  const Vector& x = disc.op.grid.nodes;
  const Matrix& d = disc.matrix;
  const std::size_t size = x.size();
  auto accel = [&](double t, const Vector& v) {
    Vector r = d * v;
    axpy(1.0, forcing_at(disc, ms, Equation::wave, t), r);
    return r;
  };

  Vector v = sample(ms.u, x, 0.0);
  Vector w = sample(ms.u_t, x, 0.0);
  Recorder rec(disc, ms, dt, options.snapshot_stride);
  rec.initial(v);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const Vector& a1 = w;
    const Vector b1 = accel(t, v);
    Vector v2 = v, w2 = w;
    axpy(0.5 * dt, a1, v2);
    axpy(0.5 * dt, b1, w2);
    const Vector b2 = accel(t + 0.5 * dt, v2);
    Vector v3 = v, w3 = w;
    axpy(0.5 * dt, w2, v3);
    axpy(0.5 * dt, b2, w3);
    const Vector b3 = accel(t + 0.5 * dt, v3);
    Vector v4 = v, w4 = w;
    axpy(dt, w3, v4);
    axpy(dt, b3, w4);
    const Vector b4 = accel(t + dt, v4);
    for (std::size_t i = 0; i < size; ++i) {
      v[i] += dt / 6.0 * (a1[i] + 2 * w2[i] + 2 * w3[i] + w4[i]);
      w[i] += dt / 6.0 * (b1[i] + 2 * b2[i] + 2 * b3[i] + b4[i]);
    }
    rec.record(s + 1, static_cast<double>(s + 1) * dt, v);
  }
  return rec.done(v);
}

SweepCell evaluate_cell(std::size_t n, double alpha, double phi, SweepTask task) {
  const SbpSecondDerivative op = build_d2(make_grid(static_cast<long long>(n)), 6, alpha);
  const BoundaryKind right = task == SweepTask::dirichlet ? BoundaryKind::dirichlet : BoundaryKind::neumann;
  const SatDiscretization disc = build_discretization(op, BoundaryKind::dirichlet, right, phi);
  SweepCell cell;
  cell.alpha = alpha;
  cell.phi = phi;
  cell.error = poisson_solve(disc, make_solution("poly5")).error;
  cell.rho = spectral_radius(disc);
  return cell;
}

std::vector<SweepCell> optimum_sweep(std::size_t n, std::span<const double> alpha_grid,
                                     std::span<const double> phi_grid, SweepTask task, unsigned jobs) {
  if (alpha_grid.empty() || phi_grid.empty()) throw UsageError("sweep grids must be non-empty");
  const std::size_t count = alpha_grid.size() * phi_grid.size();
  std::vector<SweepCell> cells = parallel_map<SweepCell>(count, jobs, [&](std::size_t idx) {
    return evaluate_cell(n, alpha_grid[idx / phi_grid.size()], phi_grid[idx % phi_grid.size()], task);
  });

  double min_error = std::numeric_limits<double>::infinity();
  double min_rho = std::numeric_limits<double>::infinity();
  for (const auto& c : cells) {
    min_error = std::min(min_error, c.error.h_norm);
    min_rho = std::min(min_rho, c.rho);
  }
  for (auto& c : cells) {
    c.rel_error = c.error.h_norm / min_error;
    c.rel_rho = c.rho / min_rho;
  }

  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cells[a].rel_error != cells[b].rel_error) return cells[a].rel_error < cells[b].rel_error;
    if (cells[a].rel_rho != cells[b].rel_rho) return cells[a].rel_rho < cells[b].rel_rho;
    return a < b;
  });
  double best_rho = std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    if (cells[idx].rel_rho < best_rho) {
      cells[idx].pareto = true;
      best_rho = cells[idx].rel_rho;
    }
  }
  return cells;
}

}  // namespace sbp
