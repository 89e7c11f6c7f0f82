#pragma once

#include <memory>

#include "sbp/linalg.hpp"
#include "sbp/operators.hpp"

namespace sbp {

/// Block obtained by deleting the first and last row and column.
Matrix extract_interior(const Matrix& a);

/// Inverse of the interior block embedded in a border of zeros.
/// Throws SingularInterior when the interior block is numerically singular.
Matrix build_g2(const SbpSecondDerivative& op);

Matrix moore_penrose(const SbpSecondDerivative& op);

/// G2 + x·xᵀ: a cheaper generalized inverse that is exact after removing the mean.
Matrix filtered_pseudoinverse(const SbpSecondDerivative& op);

enum class NeumannMethod { moore_penrose, filtered };

/// Everything needed to solve the singular Neumann system repeatedly.
class PseudoinverseBundle {
 public:
  explicit PseudoinverseBundle(const SbpSecondDerivative& op);

  const SbpSecondDerivative& source() const { return source_; }
  const LuFactorization& interior_factorization() const { return *interior_; }
  const Matrix& g2() const { return g2_; }
  /// Materialized on first use.
  const Matrix& moore_penrose() const;
  const Matrix& filtered() const;

  /// Mean-zero solution of A·v = b.
  Vector solve(std::span<const double> b, NeumannMethod method = NeumannMethod::moore_penrose) const;

 private:
  Vector apply_g2(std::span<const double> b) const;

  SbpSecondDerivative source_;
  std::shared_ptr<const LuFactorization> interior_;
  Matrix g2_;
  mutable Matrix moore_penrose_;
  mutable Matrix filtered_;
};

Vector solve_neumann_system(const SbpSecondDerivative& op, std::span<const double> b,
                            NeumannMethod method = NeumannMethod::moore_penrose);

}  // namespace sbp
