#include "sbp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbp/errors.hpp"
#include "sbp/parallel.hpp"
#include "sbp/pseudoinverse.hpp"
#include "sbp/sat.hpp"

namespace sbp {

RankRelation check_rank_relation(const SbpSecondDerivative& op, double rel_tol) {
  RankRelation r;
  r.rank_full = numeric_rank(op.stiffness, rel_tol);
  r.rank_interior = numeric_rank(extract_interior(op.stiffness), rel_tol);
  r.holds = r.rank_full == r.rank_interior + 1;
  return r;
}

Matrix sylvester_transform(const SbpSecondDerivative& op) {
  const std::size_t size = op.grid.size();
  const std::size_t last = size - 1;
  Matrix z(size, size);
  for (std::size_t j = 0; j < size; ++j) z(0, j) = 1.0;
  for (std::size_t i = 1; i < last; ++i) {
    z(i, i) = 1.0;
    z(last, i) = op.grid.nodes[i];
  }
  z(last, last) = 1.0;
  Matrix delta = z * op.stiffness * z.transpose();

  Matrix expected(size, size);
  expected.set_block(1, 1, extract_interior(op.stiffness));
  expected(last, last) = 1.0;
  const double residual = max_abs(delta - expected);
  if (residual > 1e-9 * norm_inf(op.stiffness)) {
    throw TransformResidual("congruence residual " + describe(residual));
  }
  return delta;
}

AlphaStarResult alpha_star(std::size_t n) {
  const Grid grid = make_grid(static_cast<long long>(n));
  const SbpSecondDerivative op = build_d2(grid, 6, 490.0);
  const LuFactorization interior(extract_interior(op.stiffness));

  // Interior restriction of the free direction at each boundary.
  const std::size_t m = n - 1;
  const Vector k = sixth_order_free_direction();
  Vector left(m, 0.0), right(m, 0.0);
  for (std::size_t i = 1; i < 6; ++i) {
    left[i - 1] = k[i];
    right[m - i] = k[i];
  }
  const Vector solved_left = interior.solve(left);
  const Vector solved_right = interior.solve(right);
  const double a = dot(left, solved_left);
  const double c = dot(right, solved_right);
  const double b = 0.5 * (dot(left, solved_right) + dot(right, solved_left));

  const double centre = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  AlphaStarResult r;
  r.n = n;
  r.eigenvalues_2x2 = {centre - radius, centre + radius};
  for (std::size_t i = 0; i < 2; ++i) r.roots[i] = 490.0 - 180.0 * grid.h / r.eigenvalues_2x2[i];
  std::sort(r.roots.begin(), r.roots.end());
  return r;
}

double alpha_star_spectral(std::size_t n, double tolerance) {
  const Grid grid = make_grid(static_cast<long long>(n));
  auto psd = [&](double alpha) {
    const Matrix a = build_d2(grid, 6, alpha).stiffness;
    return min_eigenvalue_deflated(a) >= -1e-10 * norm_inf(a);
  };
  double lo = 470.0, hi = 490.0;
  if (psd(lo) || !psd(hi)) throw NoCrossing("no semi-definiteness crossing in [470, 490]");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (psd(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

BorrowingResult borrowing_capacity(const SbpSecondDerivative& op) {
  const PseudoinverseBundle bundle(op);
  const Matrix& g2 = bundle.g2();
  const Vector g2_left = g2 * op.left_derivative;
  BorrowingResult r;
  r.xi_boundary = 1.0 + dot(op.left_derivative, g2_left);
  r.xi_cross = 1.0 + dot(op.right_derivative, g2_left);
  r.gamma = 1.0 / (op.grid.h * (r.xi_boundary + std::abs(r.xi_cross)));
  return r;
}

namespace {

void require_same_norm(const SbpSecondDerivative& op2, const SbpFirstDerivative& op1) {
  if (op2.grid.n != op1.grid.n) throw NormMismatch("operators live on different grids");
  const double scale = norm_inf(op2.norm_weights);
  if (norm_inf(subtract(op2.norm_weights, op1.norm_weights)) > 1e-13 * scale)
    throw NormMismatch("first- and second-derivative norms differ");
}

Matrix first_derivative_energy(const SbpFirstDerivative& op1) {
  // D1ᵀ·H·D1 = Qᵀ·H⁻¹·Q
  Matrix scaled_q = op1.skew_form;
  for (std::size_t i = 0; i < scaled_q.rows(); ++i)
    for (double& v : scaled_q.row(i)) v /= op1.norm_weights[i];
  return op1.skew_form.transpose() * scaled_q;
}

}  // namespace

Matrix compatibility_remainder(const SbpSecondDerivative& op2, const SbpFirstDerivative& op1) {
  require_same_norm(op2, op1);
  return op2.stiffness - first_derivative_energy(op1);
}

CompatibilityReport compatibility(const SbpSecondDerivative& op2, const SbpFirstDerivative& op1) {
  const Matrix r = compatibility_remainder(op2, op1);
  CompatibilityReport rep;
  rep.alpha = op2.free_parameter.value_or(std::nan(""));
  rep.beta = op1.calibrated_parameter;
  rep.min_eig_R = sym_eigen(r, false).values.front();
  rep.compatible = rep.min_eig_R >= -1e-10 * norm_inf(r);
  return rep;
}

double compatibility_min_alpha_t(double t, std::size_t n) {
  const Grid grid = make_grid(static_cast<long long>(n));
  const Matrix energy = first_derivative_energy(build_d1(grid, 6, t));
  // Both constants and linears lie in the null space of the remainder.
  const std::vector<Vector> null_vectors = {Vector(grid.size(), 1.0), grid.nodes};
  auto compatible = [&](double alpha) {
    const Matrix r = build_d2(grid, 6, alpha).stiffness - energy;
    return min_eigenvalue_deflated(r, null_vectors) >= -1e-10 * norm_inf(r);
  };
  double lo = alpha_star(n).threshold() - 1.0;
  double hi = 600.0;
  if (!compatible(hi)) throw NoCrossing("incompatible for every alpha <= 600");
  if (compatible(lo)) return lo;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (compatible(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double compatibility_min_alpha(double beta, std::size_t n) {
  const BetaMap map = calibrate_beta(make_grid(static_cast<long long>(n)));
  return compatibility_min_alpha_t(map.t(beta), n);
}

Vector truncation_vector(const SbpSecondDerivative& op) {
  if (op.interior_order != 6) throw UsageError("truncation vector is defined for the sixth-order family");
  const Grid& g = op.grid;
  const std::size_t size = g.size();
  Vector top(size), bottom(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double x = g.nodes[i];
    const double s = x - 1.0;
    top[i] = x * x * x * x * x;
    bottom[i] = s * s * s * s * s;
  }
  const Vector d_top = op.matrix * top;
  const Vector d_bottom = op.matrix * bottom;
  Vector r(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (2 * i <= g.n) {
      const double x = g.nodes[i];
      r[i] = -d_top[i] + 20.0 * x * x * x;
    } else {
      const double s = g.nodes[i] - 1.0;
      r[i] = -d_bottom[i] + 20.0 * s * s * s;
    }
  }
  return r;
}

TruncationOptimum truncation_optimum(std::size_t n) {
  const Grid grid = make_grid(static_cast<long long>(n));
  const SbpSecondDerivative base = build_d2(grid, 6, 0.0);
  const Vector r0 = truncation_vector(base);
  const Vector r1 = subtract(truncation_vector(build_d2(grid, 6, 1.0)), r0);
  double l2_num = 0, l2_den = 0, h_num = 0, h_den = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i >= 6 && i + 6 <= grid.n) continue;
    const double w = base.norm_weights[i];
    l2_num += r0[i] * r1[i];
    l2_den += r1[i] * r1[i];
    h_num += w * r0[i] * r1[i];
    h_den += w * r1[i] * r1[i];
  }
  return {-l2_num / l2_den, -h_num / h_den};
}

SpectrumReport family_spectrum(SpectrumFamily family, std::size_t n, double alpha, double phi,
                               double rank_rel_tol) {
  const SbpSecondDerivative op = build_d2(make_grid(static_cast<long long>(n)), 6, alpha);
  switch (family) {
    case SpectrumFamily::stiffness:
      return sym_eigenvalues(op.stiffness, rank_rel_tol);
    case SpectrumFamily::neumann:
      return negated_spectrum(build_discretization(op, BoundaryKind::neumann, BoundaryKind::neumann), rank_rel_tol);
    case SpectrumFamily::dirichlet:
      return negated_spectrum(build_discretization(op, BoundaryKind::dirichlet, BoundaryKind::dirichlet, phi),
                              rank_rel_tol);
    case SpectrumFamily::mixed:
      return negated_spectrum(build_discretization(op, BoundaryKind::dirichlet, BoundaryKind::neumann, phi),
                              rank_rel_tol);
  }
  throw UsageError("unknown spectrum family");
}

std::vector<SpectrumRow> spectrum_sweep(SpectrumFamily family, std::size_t n, std::span<const double> alpha_grid,
                                        std::span<const double> phi_grid, unsigned jobs, double rank_rel_tol) {
  const Vector default_phi = {1.0};
  const std::span<const double> phis = phi_grid.empty() ? std::span<const double>(default_phi) : phi_grid;
  const std::size_t count = alpha_grid.size() * phis.size();
  return parallel_map<SpectrumRow>(count, jobs, [&](std::size_t idx) {
    SpectrumRow row;
    row.alpha = alpha_grid[idx / phis.size()];
    row.phi = phis[idx % phis.size()];
    row.report = family_spectrum(family, n, row.alpha, row.phi, rank_rel_tol);
    return row;
  });
}

}  // namespace sbp
