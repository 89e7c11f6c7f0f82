#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/linalg.hpp"
#include "sbp/sat.hpp"

namespace sbp {

enum class Equation { poisson, heat, wave };

/// An exact solution u(x, t) with the derivatives needed for forcing and boundary data.
struct ManufacturedSolution {
  using Field = std::function<double(double, double)>;

  std::string name;
  double parameter = 0.0;
  Field u, u_x, u_xx, u_t, u_tt;

  /// u_t - u_xx (heat), u_tt - u_xx (wave) or -u_xx (Poisson).
  double forcing(Equation eq, double x, double t) const;
  /// Dirichlet data is u, Neumann data is u_x.
  double boundary_data(BoundaryKind kind, double x, double t) const;
};

/// Names: poly5, quad, heat_c (parameter c, default 3), wave_trig.
ManufacturedSolution make_solution(const std::string& name, double parameter = 3.0);

struct ErrorReport {
  double h_norm = 0.0;
  double l2_norm = 0.0;
  double max_norm = 0.0;
  std::optional<double> mean_over_time;
};

ErrorReport error_norms(std::span<const double> eps, std::span<const double> norm_weights);

struct SteadyResult {
  Vector solution;
  ErrorReport error;
};

SteadyResult poisson_solve(const SatDiscretization& disc, const ManufacturedSolution& ms);

struct Snapshot {
  double time = 0.0;
  Vector values;
};

struct Trajectory {
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> times;          // one per completed step
  std::vector<ErrorReport> errors;    // one per completed step
  std::vector<Snapshot> snapshots;    // every `snapshot_stride` steps, plus the initial state
  Vector final_solution;
  ErrorReport summary;                // final-step norms with the time-mean H-norm error
};

/// Time-marching diverged; carries everything computed before the blow-up.
class UnstableStep : public NumericalError {
 public:
  UnstableStep(const std::string& what, Trajectory partial)
      : NumericalError("UnstableStep: " + what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

struct MarchOptions {
  std::optional<double> dt;  // default chosen from the spectral radius
  std::size_t snapshot_stride = 10;
};

/// Largest |λ| of D.
double spectral_radius(const SatDiscretization& disc);

double default_heat_dt(double rho);
double default_wave_dt(double rho);

Trajectory heat_solve(const SatDiscretization& disc, const ManufacturedSolution& ms, double t_end,
                      const MarchOptions& options = {});
Trajectory wave_solve(const SatDiscretization& disc, const ManufacturedSolution& ms, double t_end,
                      const MarchOptions& options = {});

enum class SweepTask { dirichlet, mixed };

struct SweepCell {
  double alpha = 0.0;
  double phi = 0.0;
  ErrorReport error;
  double rho = 0.0;
  double rel_error = 0.0;
  double rel_rho = 0.0;
  bool pareto = false;
};

/// poly5 Poisson error and spectral radius over an (α, φ) grid, normalized by
/// the grid minima, with the non-dominated cells flagged.
std::vector<SweepCell> optimum_sweep(std::size_t n, std::span<const double> alpha_grid,
                                     std::span<const double> phi_grid, SweepTask task, unsigned jobs = 1);

/// Poisson error and spectral radius of a single (α, φ) cell.
SweepCell evaluate_cell(std::size_t n, double alpha, double phi, SweepTask task);

}  // namespace sbp
