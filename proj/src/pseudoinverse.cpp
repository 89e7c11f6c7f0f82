#include "sbp/pseudoinverse.hpp"

#include <cmath>
#include <string>

#include "sbp/errors.hpp"

namespace sbp {

namespace {

std::shared_ptr<const LuFactorization> factor_interior(const Matrix& interior) {
  try {
    return std::make_shared<const LuFactorization>(interior, 1e-12);
  } catch (const SingularMatrix& e) {
    throw SingularInterior(e.what());
  }
}

Matrix embed(const Matrix& inner) {
  const std::size_t size = inner.rows() + 2;
  Matrix out(size, size);
  out.set_block(1, 1, inner);
  return out;
}

// A·G2 = I - e_L(1 - x)ᵀ - e_R xᵀ
void check_right_identity(const SbpSecondDerivative& op, const Matrix& g2) {
  const std::size_t size = op.grid.size();
  Matrix expected = Matrix::identity(size);
  for (std::size_t j = 0; j < size; ++j) {
    expected(0, j) -= 1.0 - op.grid.nodes[j];
    expected(size - 1, j) -= op.grid.nodes[j];
  }
  const double residual = max_abs(op.stiffness * g2 - expected);
  const double scale = norm_inf(op.stiffness) * norm_inf(g2);
  if (residual > 1e-8 * std::max(1.0, scale)) {
    throw SingularInterior("interior inverse fails the bordered identity, residual " + describe(residual));
  }
}

Matrix mean_projector(std::size_t size) {
  Matrix p = Matrix::identity(size);
  const double w = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) p(i, j) -= w;
  return p;
}

}  // namespace

Matrix extract_interior(const Matrix& a) {
  if (!a.is_square() || a.rows() < 3) throw DimensionMismatch("interior needs a square matrix of size >= 3");
  return a.block(1, 1, a.rows() - 2, a.cols() - 2);
}

PseudoinverseBundle::PseudoinverseBundle(const SbpSecondDerivative& op)
    : source_(op), interior_(factor_interior(extract_interior(op.stiffness))) {
  g2_ = embed(interior_->inverse());
  check_right_identity(source_, g2_);
}

const Matrix& PseudoinverseBundle::moore_penrose() const {
  if (moore_penrose_.empty()) {
    const std::size_t size = g2_.rows();
    const Matrix p = mean_projector(size);
    Matrix result = p * g2_ * p;
    Vector centered = source_.grid.nodes;
    for (double& v : centered) v -= 0.5;
    result += Matrix::outer(centered, centered);
    moore_penrose_ = std::move(result);
  }
  return moore_penrose_;
}

const Matrix& PseudoinverseBundle::filtered() const {
  if (filtered_.empty()) filtered_ = g2_ + Matrix::outer(source_.grid.nodes, source_.grid.nodes);
  return filtered_;
}

Vector PseudoinverseBundle::apply_g2(std::span<const double> b) const {
  const std::size_t size = g2_.rows();
  const Vector inner = interior_->solve(b.subspan(1, size - 2));
  Vector out(size, 0.0);
  std::copy(inner.begin(), inner.end(), out.begin() + 1);
  return out;
}

Vector PseudoinverseBundle::solve(std::span<const double> b, NeumannMethod method) const {
  const std::size_t size = g2_.rows();
  if (b.size() != size) throw DimensionMismatch("Neumann rhs length");
  const Vector& x = source_.grid.nodes;
  if (method == NeumannMethod::filtered) {
    Vector v = apply_g2(b);
    axpy(dot(x, b), x, v);
    const double m = mean(v);
    for (double& e : v) e -= m;
    return v;
  }
  Vector projected(b.begin(), b.end());
  const double mb = mean(projected);
  for (double& e : projected) e -= mb;
  Vector v = apply_g2(projected);
  const double mv = mean(v);
  for (double& e : v) e -= mv;
  double weight = 0.0;
  for (std::size_t i = 0; i < size; ++i) weight += (x[i] - 0.5) * b[i];
  for (std::size_t i = 0; i < size; ++i) v[i] += weight * (x[i] - 0.5);
  return v;
}

Matrix build_g2(const SbpSecondDerivative& op) { return PseudoinverseBundle(op).g2(); }

Matrix moore_penrose(const SbpSecondDerivative& op) { return PseudoinverseBundle(op).moore_penrose(); }

Matrix filtered_pseudoinverse(const SbpSecondDerivative& op) { return PseudoinverseBundle(op).filtered(); }

Vector solve_neumann_system(const SbpSecondDerivative& op, std::span<const double> b, NeumannMethod method) {
  return PseudoinverseBundle(op).solve(b, method);
}

}  // namespace sbp
