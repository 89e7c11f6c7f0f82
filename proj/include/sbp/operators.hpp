#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbp/linalg.hpp"

namespace sbp {

/// Uniform nodes on [0, 1]: n intervals, n + 1 nodes.
struct Grid {
  std::size_t n = 0;
  double h = 0.0;
  Vector nodes;

  std::size_t size() const { return n + 1; }
};

Grid make_grid(long long n);

/// Unit vectors at the first and last node.
Vector left_unit(const Grid& grid);
Vector right_unit(const Grid& grid);

/// Nodes raised elementwise to a power.
Vector node_powers(const Grid& grid, int power);

struct SbpSecondDerivative {
  Grid grid;
  int interior_order = 0;
  std::optional<double> free_parameter;  // order 6 only
  Vector norm_weights;                   // diagonal of the quadrature norm
  Matrix stiffness;                      // symmetric positive semi-definite part
  Vector left_derivative;                // boundary first-derivative row at x = 0
  Vector right_derivative;               // boundary first-derivative row at x = 1
  Matrix matrix;                         // the second-derivative operator itself
};

struct SbpFirstDerivative {
  Grid grid;
  int interior_order = 0;
  std::optional<double> nullspace_coordinate;  // order 6 only
  std::optional<double> calibrated_parameter;  // order 6 only, via calibrate_beta
  Vector norm_weights;
  Matrix skew_form;  // Q with Q + Qᵀ = diag(-1, 0, ..., 0, 1)
  Matrix matrix;     // H⁻¹Q
};

/// Boundary block size of the closures for a given interior order.
std::size_t closure_block(int interior_order);
std::size_t minimum_intervals(int interior_order);

/// Boundary block of the norm, divided by h.
Vector boundary_norm_weights(int interior_order);

/// Order-6 constants. The corner is M₀ of the closure, i.e. 180·h·A at α = 0.
Matrix sixth_order_base_corner();
Vector sixth_order_free_direction();  // (1, -5, 10, -10, 5, -1)

/// A linear system in the unknown upper-triangle entries of a symmetric
/// (or skew) boundary corner.
struct ClosureSystem {
  Matrix coefficients;
  Vector rhs;
  std::vector<std::pair<std::size_t, std::size_t>> unknowns;  // (i, j) with i <= j
};

struct ClosureSolution {
  Matrix corner;               // 180·h·A at α = 0 for the sixth-order system
  std::size_t nullspace_dim = 0;
  Matrix nullspace_direction;  // unit Frobenius norm, positive (0,0) entry
  std::size_t system_rank = 0;
  double residual = 0.0;
};

/// The 24 × 21 moment system for the sixth-order corner.
ClosureSystem sixth_order_closure_system();

/// Symmetric-corner moment system: for each block row i and each moment m,
/// Σ_j c_ij (j - i)^m + (interior couplings) equals -1 for (i = 0, m = 1) and
/// -2·norm_i for m = 2 when norm rows are given. The interior stencil is that
/// of h·A (centered, odd length).
ClosureSystem symmetric_closure_system(std::size_t block, std::span<const double> interior_stencil,
                                       std::span<const int> moments,
                                       std::optional<Vector> norm_rows = std::nullopt);

/// Solves a closure system; throws InconsistentSystem when the least-squares
/// residual exceeds 1e-8.
ClosureSolution solve_closure(const ClosureSystem& system, std::size_t block);

/// Sixth-order system solve, shifted to the α = 0 member of the family.
ClosureSolution solve_closure_system(const Grid& grid);

/// Minimal one-sided first-derivative stencil at x = 0 with order+1 points.
Vector build_boundary_derivative(int order_of_accuracy, double h);

SbpSecondDerivative build_d2(const Grid& grid, int interior_order,
                             std::optional<double> alpha = std::nullopt);

/// Raw order-6 first-derivative family: particular solution and unit
/// nullspace direction of the corner unknowns.
struct FirstDerivativeFamily {
  Matrix base;       // Q at t = 0 for the given grid
  Matrix direction;  // dQ/dt
  std::size_t system_rank = 0;
  std::size_t unknown_count = 0;
};

FirstDerivativeFamily first_derivative_family(const Grid& grid, int interior_order);

SbpFirstDerivative build_d1(const Grid& grid, int interior_order,
                            std::optional<double> t = std::nullopt);

/// β = slope·t + offset.
struct BetaMap {
  double slope = 0.0;
  double offset = 0.0;
  double t_accuracy = 0.0;
  double t_bandwidth = 0.0;
  std::size_t vanishing_entry = 0;  // column in row 0 that vanishes at t_bandwidth
  double cross_check_threshold = 0.0;

  double beta(double t) const { return slope * t + offset; }
  double t(double beta) const { return (beta - offset) / slope; }
};

inline constexpr double kBetaAccuracy = 342523.0 / 518400.0;
inline constexpr double kBetaBandwidth = 89387.0 / 129600.0;

BetaMap calibrate_beta(const Grid& grid);

SbpFirstDerivative build_d1_beta(const Grid& grid, double beta);

struct VerificationReport {
  struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed() const { return residual <= tolerance; }
  };
  std::vector<Check> checks;
  bool all_passed() const;
};

VerificationReport verify_sbp(const SbpSecondDerivative& op);
VerificationReport verify_sbp(const SbpFirstDerivative& op);

}  // namespace sbp
