#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "sbp/linalg.hpp"
#include "sbp/operators.hpp"

namespace sbp {

struct RankRelation {
  std::size_t rank_full = 0;
  std::size_t rank_interior = 0;
  bool holds = false;
};

/// rank(A) = rank(Ā) + 1 at the given relative tolerance.
RankRelation check_rank_relation(const SbpSecondDerivative& op, double rel_tol = kDefaultRankTolerance);

/// Z·A·Zᵀ, verified to equal blockdiag(0, Ā, 1).
Matrix sylvester_transform(const SbpSecondDerivative& op);

struct AlphaStarResult {
  std::size_t n = 0;
  std::array<double, 2> roots{};            // ascending
  std::array<double, 2> eigenvalues_2x2{};  // ascending

  double threshold() const { return roots[1]; }
};

AlphaStarResult alpha_star(std::size_t n);

/// Same threshold found by bisecting on the sign of the smallest nontrivial
/// eigenvalue of A(α).
double alpha_star_spectral(std::size_t n, double tolerance = 1e-9);

struct BorrowingResult {
  double gamma = 0.0;
  double xi_boundary = 0.0;
  double xi_cross = 0.0;
};

BorrowingResult borrowing_capacity(const SbpSecondDerivative& op);

struct CompatibilityReport {
  double alpha = 0.0;
  std::optional<double> beta;
  double min_eig_R = 0.0;
  bool compatible = false;
};

/// R = A - D1ᵀ·H·D1.
Matrix compatibility_remainder(const SbpSecondDerivative& op2, const SbpFirstDerivative& op1);
CompatibilityReport compatibility(const SbpSecondDerivative& op2, const SbpFirstDerivative& op1);

/// Smallest α for which the order-6 pair is compatible, with the first
/// derivative given by its raw nullspace coordinate.
double compatibility_min_alpha_t(double t, std::size_t n);
double compatibility_min_alpha(double beta, std::size_t n);

/// -D2·x⁵ + 20·x³ (bottom rows evaluated with the shifted monomial (x - 1)⁵).
Vector truncation_vector(const SbpSecondDerivative& op);

struct TruncationOptimum {
  double alpha_l2 = 0.0;
  double alpha_h = 0.0;
};

/// Closed-form minimizers over α of the discrete L2 and H norms of the
/// boundary truncation entries.
TruncationOptimum truncation_optimum(std::size_t n);

enum class SpectrumFamily { stiffness, neumann, dirichlet, mixed };

struct SpectrumRow {
  double alpha = 0.0;
  double phi = 0.0;
  SpectrumReport report;
};

/// Eigenvalues of -D for the SAT families and of A itself for `stiffness`.
SpectrumReport family_spectrum(SpectrumFamily family, std::size_t n, double alpha, double phi,
                               double rank_rel_tol = kDefaultRankTolerance);

/// Rows follow alpha_grid × phi_grid order regardless of `jobs`.
std::vector<SpectrumRow> spectrum_sweep(SpectrumFamily family, std::size_t n, std::span<const double> alpha_grid,
                                        std::span<const double> phi_grid, unsigned jobs = 1,
                                        double rank_rel_tol = kDefaultRankTolerance);

}  // namespace sbp
