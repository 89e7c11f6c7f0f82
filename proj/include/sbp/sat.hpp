#pragma once

#include <optional>
#include <string>

#include "sbp/linalg.hpp"
#include "sbp/operators.hpp"

namespace sbp {

enum class BoundaryKind { dirichlet, neumann };

std::string to_string(BoundaryKind kind);

/// A second-derivative operator with boundary conditions imposed weakly.
struct SatDiscretization {
  SbpSecondDerivative op;
  BoundaryKind bc_left = BoundaryKind::neumann;
  BoundaryKind bc_right = BoundaryKind::neumann;
  double phi = 1.0;
  std::optional<double> gamma;  // present when a side is Dirichlet
  std::optional<double> mu;     // -phi / (h·gamma)
  double sigma_left = 1.0;
  double sigma_right = -1.0;
  Matrix matrix;          // D
  Matrix symmetric_form;  // H·D

  bool any_dirichlet() const {
    return bc_left == BoundaryKind::dirichlet || bc_right == BoundaryKind::dirichlet;
  }
};

SatDiscretization build_discretization(const SbpSecondDerivative& op, BoundaryKind bc_left,
                                       BoundaryKind bc_right, double phi = 1.0);

/// Interior forcing plus the boundary-data penalty contributions.
Vector assemble_forcing(const SatDiscretization& disc, std::span<const double> f_values, double g_left,
                        double g_right);

/// Eigenvalues of -D through the symmetric similarity H^(-1/2)·(-H·D)·H^(-1/2).
SpectrumReport negated_spectrum(const SatDiscretization& disc, double rank_rel_tol = kDefaultRankTolerance);

}  // namespace sbp
