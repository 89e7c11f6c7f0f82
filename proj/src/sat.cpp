#include "sbp/sat.hpp"

#include <cmath>
#include <string>

#include "sbp/analysis.hpp"
#include "sbp/errors.hpp"

namespace sbp {

std::string to_string(BoundaryKind kind) { return kind == BoundaryKind::dirichlet ? "dirichlet" : "neumann"; }

SatDiscretization build_discretization(const SbpSecondDerivative& op, BoundaryKind bc_left, BoundaryKind bc_right,
                                       double phi) {
  SatDiscretization disc;
  disc.op = op;
  disc.bc_left = bc_left;
  disc.bc_right = bc_right;
  disc.phi = phi;

  const std::size_t size = op.grid.size();
  const std::size_t last = size - 1;
  const Vector& w = op.norm_weights;
  const Vector& dL = op.left_derivative;
  const Vector& dR = op.right_derivative;

  if (disc.any_dirichlet()) {
    if (!(phi >= 1.0)) throw InvalidPhi("penalty factor must be >= 1, got " + describe(phi));
    try {
      disc.gamma = borrowing_capacity(op).gamma;
    } catch (const SingularInterior& e) {
      throw BorrowingUnavailable(e.what());
    }
    disc.mu = -phi / (op.grid.h * *disc.gamma);
  }

  // Build H·D directly; D follows by scaling rows.
  Matrix form = -1.0 * op.stiffness;
  for (std::size_t j = 0; j < size; ++j) {
    form(0, j) -= dL[j];
    form(last, j) += dR[j];
  }
  if (bc_left == BoundaryKind::dirichlet) {
    for (std::size_t i = 0; i < size; ++i) form(i, 0) -= dL[i];
    form(0, 0) += *disc.mu;
  } else {
    for (std::size_t j = 0; j < size; ++j) form(0, j) += disc.sigma_left * dL[j];
  }
  if (bc_right == BoundaryKind::dirichlet) {
    for (std::size_t i = 0; i < size; ++i) form(i, last) += dR[i];
    form(last, last) += *disc.mu;
  } else {
    for (std::size_t j = 0; j < size; ++j) form(last, j) += disc.sigma_right * dR[j];
  }

  const double scale = norm_inf(form);
  if (asymmetry(form) > 1e-11 * scale) throw NotSymmetric("SAT symmetric form is not symmetric");
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j) {
      const double avg = 0.5 * (form(i, j) + form(j, i));
      form(i, j) = avg;
      form(j, i) = avg;
    }

  disc.matrix = form;
  for (std::size_t i = 0; i < size; ++i)
    for (double& v : disc.matrix.row(i)) v /= w[i];
  disc.symmetric_form = std::move(form);
  return disc;
}

Vector assemble_forcing(const SatDiscretization& disc, std::span<const double> f_values, double g_left,
                        double g_right) {
  const std::size_t size = disc.op.grid.size();
  if (f_values.size() != size) throw DimensionMismatch("forcing length");
  const Vector& w = disc.op.norm_weights;
  const Vector& dL = disc.op.left_derivative;
  const Vector& dR = disc.op.right_derivative;
  Vector out(f_values.begin(), f_values.end());
  if (disc.bc_left == BoundaryKind::dirichlet) {
    for (std::size_t i = 0; i < size; ++i) out[i] += dL[i] * g_left / w[i];
    out[0] -= *disc.mu * g_left / w[0];
  } else {
    out[0] -= disc.sigma_left * g_left / w[0];
  }
  if (disc.bc_right == BoundaryKind::dirichlet) {
    for (std::size_t i = 0; i < size; ++i) out[i] -= dR[i] * g_right / w[i];
    out[size - 1] -= *disc.mu * g_right / w[size - 1];
  } else {
    out[size - 1] -= disc.sigma_right * g_right / w[size - 1];
  }
  return out;
}

SpectrumReport negated_spectrum(const SatDiscretization& disc, double rank_rel_tol) {
  const std::size_t size = disc.op.grid.size();
  Vector inv_sqrt(size);
  for (std::size_t i = 0; i < size; ++i) inv_sqrt[i] = 1.0 / std::sqrt(disc.op.norm_weights[i]);
  Matrix s(size, size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) s(i, j) = -disc.symmetric_form(i, j) * inv_sqrt[i] * inv_sqrt[j];
  return sym_eigenvalues(s, rank_rel_tol);
}

}  // namespace sbp
