#include "sbp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbp/errors.hpp"

namespace sbp {

namespace {

// Integer power with 0^0 = 1.
double ipow(double base, int exponent) {
  double r = 1.0;
  for (int k = 0; k < exponent; ++k) r *= base;
  return r;
}

void require_order(int order) {
  if (order != 2 && order != 4 && order != 6)
    throw UsageError("interior order must be 2, 4 or 6, got " + std::to_string(order));
}

const Vector& stiffness_stencil(int order) {
  static const Vector second = {-1.0, 2.0, -1.0};
  static const Vector fourth = {1.0 / 12, -16.0 / 12, 30.0 / 12, -16.0 / 12, 1.0 / 12};
  static const Vector sixth = {-2.0 / 180, 27.0 / 180, -270.0 / 180, 490.0 / 180,
                               -270.0 / 180, 27.0 / 180, -2.0 / 180};
  return order == 2 ? second : order == 4 ? fourth : sixth;
}

const Vector& skew_stencil(int order) {
  static const Vector second = {-0.5, 0.0, 0.5};
  static const Vector fourth = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  static const Vector sixth = {-1.0 / 60, 9.0 / 60, -45.0 / 60, 0.0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
  return order == 2 ? second : order == 4 ? fourth : sixth;
}

Vector full_norm_weights(const Grid& grid, int order) {
  const Vector boundary = boundary_norm_weights(order);
  Vector w(grid.size(), grid.h);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    w[i] = boundary[i] * grid.h;
    w[grid.n - i] = boundary[i] * grid.h;
  }
  return w;
}

void check_grid(const Grid& grid, int order) {
  if (grid.n < minimum_intervals(order)) {
    throw GridTooSmall("order " + std::to_string(order) + " needs n >= " +
                       std::to_string(minimum_intervals(order)) + ", got " + std::to_string(grid.n));
  }
}

// h·A from a corner (in h·A units) and the interior stencil, with the bottom
// corner filled in by mirror symmetry.
Matrix assemble_scaled_stiffness(const Grid& grid, const Matrix& corner, std::span<const double> stencil) {
  const std::size_t size = grid.size();
  const std::size_t half = stencil.size() / 2;
  const std::size_t b = corner.rows();
  Matrix a(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t o = 0; o < stencil.size(); ++o) {
      const long long j = static_cast<long long>(i) + static_cast<long long>(o) - static_cast<long long>(half);
      if (j >= 0 && j < static_cast<long long>(size)) a(i, static_cast<std::size_t>(j)) = stencil[o];
    }
  }
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      a(i, j) = corner(i, j);
      a(grid.n - i, grid.n - j) = corner(i, j);
    }
  }
  return a;
}

Matrix second_derivative_matrix(const Vector& weights, const Matrix& stiffness, const Vector& left,
                                const Vector& right) {
  const std::size_t size = weights.size();
  Matrix d = -1.0 * stiffness;
  for (std::size_t j = 0; j < size; ++j) {
    d(0, j) -= left[j];
    d(size - 1, j) += right[j];
  }
  for (std::size_t i = 0; i < size; ++i)
    for (double& v : d.row(i)) v /= weights[i];
  return d;
}

const ClosureSolution& fourth_order_closure() {
  static const ClosureSolution solution = [] {
    const int moments[] = {0, 1, 2, 3};
    return solve_closure(symmetric_closure_system(4, stiffness_stencil(4), moments, boundary_norm_weights(4)), 4);
  }();
  return solution;
}

const ClosureSolution& second_order_closure() {
  static const ClosureSolution solution = [] {
    const int moments[] = {0, 1, 2};
    return solve_closure(symmetric_closure_system(1, stiffness_stencil(2), moments, boundary_norm_weights(2)), 1);
  }();
  return solution;
}

}  // namespace

Grid make_grid(long long n) {
  if (n < 2) throw InvalidN("need n >= 2, got " + std::to_string(n));
  Grid g;
  g.n = static_cast<std::size_t>(n);
  g.h = 1.0 / static_cast<double>(n);
  g.nodes.resize(g.n + 1);
  for (std::size_t i = 0; i <= g.n; ++i) g.nodes[i] = static_cast<double>(i) / static_cast<double>(n);
  return g;
}

Vector left_unit(const Grid& grid) {
  Vector e(grid.size(), 0.0);
  e.front() = 1.0;
  return e;
}

Vector right_unit(const Grid& grid) {
  Vector e(grid.size(), 0.0);
  e.back() = 1.0;
  return e;
}

Vector node_powers(const Grid& grid, int power) {
  Vector v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ipow(grid.nodes[i], power);
  return v;
}

std::size_t closure_block(int interior_order) {
  require_order(interior_order);
  return interior_order == 2 ? 1 : interior_order == 4 ? 4 : 6;
}

std::size_t minimum_intervals(int interior_order) {
  require_order(interior_order);
  return interior_order == 2 ? 3 : interior_order == 4 ? 7 : 11;
}

Vector boundary_norm_weights(int interior_order) {
  require_order(interior_order);
  if (interior_order == 2) return {0.5};
  if (interior_order == 4) return {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
  return {13649.0 / 43200, 60065.0 / 43200, 27110.0 / 43200,
          53590.0 / 43200, 39385.0 / 43200, 43801.0 / 43200};
}

Matrix sixth_order_base_corner() {
  static const double table[6][6] = {
      {-19697.0 / 72, 2098907.0 / 960, -3475609.0 / 720, 6987397.0 / 1440, -193649.0 / 80, 278033.0 / 576},
      {2098907.0 / 960, -839647.0 / 72, 6921397.0 / 288, -387859.0 / 16, 6969449.0 / 576, -1739359.0 / 720},
      {-3475609.0 / 720, 6921397.0 / 288, -577009.0 / 12, 6943085.0 / 144, -3481031.0 / 144, 2321591.0 / 480},
      {6987397.0 / 1440, -387859.0 / 16, 6943085.0 / 144, -1726033.0 / 36, 2298631.0 / 96, -3473101.0 / 720},
      {-193649.0 / 80, 6969449.0 / 576, -3481031.0 / 144, 2298631.0 / 96, -104756.0 / 9, 6235729.0 / 2880},
      {278033.0 / 576, -1739359.0 / 720, 2321591.0 / 480, -3473101.0 / 720, 6235729.0 / 2880, 0.0}};
  Matrix m(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) m(i, j) = table[i][j];
  return m;
}

Vector sixth_order_free_direction() { return {1.0, -5.0, 10.0, -10.0, 5.0, -1.0}; }

ClosureSystem sixth_order_closure_system() {
  struct Row {
    int coefficients[21];
    int rhs_over_180;
  };
  static const Row rows[24] = {
      {{1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 1, 2, 3, 4, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, -180},
      {{0, 1, 8, 27, 64, 125, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 1, 16, 81, 256, 625, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, -1, 0, 0, 0, 0, 0, 1, 2, 3, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, -1, 0, 0, 0, 0, 0, 1, 8, 27, 64, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 1, 0, 0, 0, 0, 0, 1, 16, 81, 256, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 0, -2, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 2, 3, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 0, -8, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 8, 27, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 0, 16, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 16, 81, 0, 0, 0, 0, 0, 0}, 0},
      {{0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 1, 0, 0, 0}, 2},
      {{0, 0, 0, -3, 0, 0, 0, 0, -2, 0, 0, 0, -1, 0, 0, 0, 1, 2, 0, 0, 0}, 6},
      {{0, 0, 0, -27, 0, 0, 0, 0, -8, 0, 0, 0, -1, 0, 0, 0, 1, 8, 0, 0, 0}, 54},
      {{0, 0, 0, 81, 0, 0, 0, 0, 16, 0, 0, 0, 1, 0, 0, 0, 1, 16, 0, 0, 0}, 162},
      {{0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 1, 0}, -25},
      {{0, 0, 0, 0, -4, 0, 0, 0, 0, -3, 0, 0, 0, -2, 0, 0, -1, 0, 0, 1, 0}, -48},
      {{0, 0, 0, 0, -64, 0, 0, 0, 0, -27, 0, 0, 0, -8, 0, 0, -1, 0, 0, 1, 0}, -162},
      {{0, 0, 0, 0, 256, 0, 0, 0, 0, 81, 0, 0, 0, 16, 0, 0, 1, 0, 0, 1, 0}, -270},
      {{0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 1}, 245},
      {{0, 0, 0, 0, 0, -5, 0, 0, 0, 0, -4, 0, 0, 0, -3, 0, 0, -2, 0, -1, 0}, 222},
      {{0, 0, 0, 0, 0, -125, 0, 0, 0, 0, -64, 0, 0, 0, -27, 0, 0, -8, 0, -1, 0}, 108},
      {{0, 0, 0, 0, 0, 625, 0, 0, 0, 0, 256, 0, 0, 0, 81, 0, 0, 16, 0, 1, 0}, 0},
  };
  ClosureSystem sys;
  sys.coefficients = Matrix(24, 21);
  sys.rhs.resize(24);
  for (std::size_t r = 0; r < 24; ++r) {
    for (std::size_t c = 0; c < 21; ++c) sys.coefficients(r, c) = rows[r].coefficients[c];
    sys.rhs[r] = rows[r].rhs_over_180 / 180.0;
  }
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i; j < 6; ++j) sys.unknowns.emplace_back(i, j);
  return sys;
}

ClosureSystem symmetric_closure_system(std::size_t block, std::span<const double> interior_stencil,
                                       std::span<const int> moments, std::optional<Vector> norm_rows) {
  const long long half = static_cast<long long>(interior_stencil.size() / 2);
  ClosureSystem sys;
  for (std::size_t i = 0; i < block; ++i)
    for (std::size_t j = i; j < block; ++j) sys.unknowns.emplace_back(i, j);

  sys.coefficients = Matrix(block * moments.size(), sys.unknowns.size());
  sys.rhs.assign(block * moments.size(), 0.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < block; ++i) {
    for (int m : moments) {
      for (std::size_t u = 0; u < sys.unknowns.size(); ++u) {
        const auto [a, c] = sys.unknowns[u];
        if (a == i) {
          sys.coefficients(row, u) += ipow(static_cast<double>(c) - static_cast<double>(i), m);
        } else if (c == i) {
          sys.coefficients(row, u) += ipow(static_cast<double>(a) - static_cast<double>(i), m);
        }
      }
      double known = 0.0;
      for (long long o = -half; o <= half; ++o) {
        const long long j = static_cast<long long>(i) + o;
        if (j >= static_cast<long long>(block))
          known += interior_stencil[static_cast<std::size_t>(o + half)] * ipow(static_cast<double>(o), m);
      }
      double target = 0.0;
      if (m == 1 && i == 0) target = -1.0;
      if (m == 2 && norm_rows) target = -2.0 * (*norm_rows)[i];
      sys.rhs[row] = target - known;
      ++row;
    }
  }
  return sys;
}

ClosureSolution solve_closure(const ClosureSystem& system, std::size_t block) {
  const LeastSquaresSolution ls = least_squares(system.coefficients, system.rhs);
  if (ls.residual_inf > 1e-8) {
    throw InconsistentSystem("closure system residual " + describe(ls.residual_inf));
  }
  auto to_corner = [&](std::span<const double> v) {
    Matrix c(block, block);
    for (std::size_t u = 0; u < system.unknowns.size(); ++u) {
      const auto [a, b] = system.unknowns[u];
      c(a, b) = v[u];
      c(b, a) = v[u];
    }
    return c;
  };
  ClosureSolution sol;
  sol.corner = to_corner(ls.x);
  sol.system_rank = ls.rank;
  sol.nullspace_dim = ls.nullspace.cols();
  sol.residual = ls.residual_inf;
  if (sol.nullspace_dim > 0) {
    Matrix dir = to_corner(ls.nullspace.column(0));
    dir *= 1.0 / norm_frobenius(dir);
    if (dir(0, 0) < 0) dir *= -1.0;
    sol.nullspace_direction = std::move(dir);
  }
  return sol;
}

ClosureSolution solve_closure_system(const Grid& grid) {
  check_grid(grid, 6);
  ClosureSolution sol = solve_closure(sixth_order_closure_system(), 6);
  if (sol.nullspace_dim == 1) {
    // Move along the free direction to the member with a vanishing last diagonal entry.
    const Matrix& dir = sol.nullspace_direction;
    const double shift = sol.corner(5, 5) / dir(5, 5);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) sol.corner(i, j) -= shift * dir(i, j);
  }
  sol.corner *= 180.0;
  return sol;
}

Vector build_boundary_derivative(int order_of_accuracy, double h) {
  if (order_of_accuracy < 1) throw UsageError("boundary derivative order must be positive");
  const std::size_t points = static_cast<std::size_t>(order_of_accuracy) + 1;
  Matrix vandermonde(points, points);
  Vector rhs(points, 0.0);
  for (std::size_t k = 0; k < points; ++k) {
    for (std::size_t j = 0; j < points; ++j) vandermonde(k, j) = ipow(static_cast<double>(j), static_cast<int>(k));
  }
  rhs[1] = 1.0;
  Vector d = lu_solve(vandermonde, rhs);
  for (double& v : d) v /= h;
  return d;
}

SbpSecondDerivative build_d2(const Grid& grid, int interior_order, std::optional<double> alpha) {
  require_order(interior_order);
  if (interior_order == 6 && !alpha) throw MissingAlpha("the sixth-order operator needs alpha");
  check_grid(grid, interior_order);

  Matrix corner;
  if (interior_order == 6) {
    corner = sixth_order_base_corner();
    const Vector k = sixth_order_free_direction();
    corner += *alpha * Matrix::outer(k, k);
    corner *= 1.0 / 180.0;
  } else if (interior_order == 4) {
    corner = fourth_order_closure().corner;
  } else {
    corner = second_order_closure().corner;
  }

  SbpSecondDerivative op;
  op.grid = grid;
  op.interior_order = interior_order;
  if (interior_order == 6) op.free_parameter = alpha;
  op.norm_weights = full_norm_weights(grid, interior_order);
  op.stiffness = assemble_scaled_stiffness(grid, corner, stiffness_stencil(interior_order));
  op.stiffness *= 1.0 / grid.h;

  const Vector stencil = build_boundary_derivative(interior_order / 2 + 1, grid.h);
  op.left_derivative.assign(grid.size(), 0.0);
  op.right_derivative.assign(grid.size(), 0.0);
  for (std::size_t j = 0; j < stencil.size(); ++j) {
    op.left_derivative[j] = stencil[j];
    op.right_derivative[grid.n - j] = -stencil[j];
  }
  op.matrix = second_derivative_matrix(op.norm_weights, op.stiffness, op.left_derivative, op.right_derivative);
  return op;
}

FirstDerivativeFamily first_derivative_family(const Grid& grid, int interior_order) {
  require_order(interior_order);
  check_grid(grid, interior_order);
  const std::size_t block = closure_block(interior_order);
  const int degree = interior_order / 2;
  const Vector& stencil = skew_stencil(interior_order);
  const long long half = static_cast<long long>(stencil.size() / 2);
  const Vector weights = boundary_norm_weights(interior_order);
  const std::size_t size = grid.size();

  // Fixed part: interior stencil everywhere, corner cleared, boundary -1/2, +1/2.
  Matrix fixed(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    for (long long o = -half; o <= half; ++o) {
      const long long j = static_cast<long long>(i) + o;
      if (j >= 0 && j < static_cast<long long>(size))
        fixed(i, static_cast<std::size_t>(j)) = stencil[static_cast<std::size_t>(o + half)];
    }
  }
  for (std::size_t i = 0; i < block; ++i) {
    for (std::size_t j = 0; j < block; ++j) {
      fixed(i, j) = 0.0;
      fixed(grid.n - i, grid.n - j) = 0.0;
    }
  }
  fixed(0, 0) = -0.5;
  fixed(grid.n, grid.n) = 0.5;

  std::vector<std::pair<std::size_t, std::size_t>> unknowns;
  for (std::size_t i = 0; i < block; ++i)
    for (std::size_t j = i + 1; j < block; ++j) unknowns.emplace_back(i, j);

  Matrix coeffs(block * static_cast<std::size_t>(degree + 1), unknowns.size());
  Vector rhs(coeffs.rows(), 0.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < block; ++i) {
    for (int k = 0; k <= degree; ++k) {
      for (std::size_t u = 0; u < unknowns.size(); ++u) {
        const auto [a, c] = unknowns[u];
        if (a == i) coeffs(row, u) += ipow(static_cast<double>(c), k);
        if (c == i) coeffs(row, u) -= ipow(static_cast<double>(a), k);
      }
      double known = 0.0;
      for (std::size_t j = 0; j < size; ++j) known += fixed(i, j) * ipow(static_cast<double>(j), k);
      const double target = k == 0 ? 0.0 : weights[i] * k * ipow(static_cast<double>(i), k - 1);
      rhs[row++] = target - known;
    }
  }

  FirstDerivativeFamily family;
  family.unknown_count = unknowns.size();
  family.base = fixed;
  family.direction = Matrix(size, size);
  if (unknowns.empty()) return family;

  const LeastSquaresSolution ls = least_squares(coeffs, rhs);
  if (ls.residual_inf > 1e-10) throw InconsistentSystem("first-derivative closure residual " + describe(ls.residual_inf));
  family.system_rank = ls.rank;

  auto place = [&](Matrix& q, std::span<const double> v) {
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      const auto [a, c] = unknowns[u];
      q(a, c) = v[u];
      q(c, a) = -v[u];
      q(grid.n - a, grid.n - c) = -v[u];
      q(grid.n - c, grid.n - a) = v[u];
    }
  };
  place(family.base, ls.x);
  if (ls.nullspace.cols() > 0) {
    Vector dir = ls.nullspace.column(0);
    if (dir[0] < 0) dir = scaled(dir, -1.0);  // unknown 0 is entry (0, 1)
    place(family.direction, dir);
  }
  return family;
}

SbpFirstDerivative build_d1(const Grid& grid, int interior_order, std::optional<double> t) {
  require_order(interior_order);
  if (interior_order == 6 && !t) throw MissingParameter("the sixth-order first derivative needs its free parameter");
  const FirstDerivativeFamily family = first_derivative_family(grid, interior_order);
  SbpFirstDerivative op;
  op.grid = grid;
  op.interior_order = interior_order;
  op.norm_weights = full_norm_weights(grid, interior_order);
  op.skew_form = family.base;
  if (interior_order == 6) {
    op.nullspace_coordinate = t;
    op.skew_form += *t * family.direction;
  }
  op.matrix = op.skew_form;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (double& v : op.matrix.row(i)) v /= op.norm_weights[i];
  return op;
}

SbpFirstDerivative build_d1_beta(const Grid& grid, double beta) {
  const BetaMap map = calibrate_beta(grid);
  SbpFirstDerivative op = build_d1(grid, 6, map.t(beta));
  op.calibrated_parameter = beta;
  return op;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) { return norm_inf(subtract(a, b)); }

// Largest residual of op·x^k - expected over the given rows.
double accuracy_residual(const Matrix& op, const Grid& grid, int k, int derivative, std::size_t row_begin,
                         std::size_t row_end) {
  const Vector w = node_powers(grid, k);
  const Vector applied = op * w;
  double worst = 0.0;
  for (std::size_t i = row_begin; i < row_end; ++i) {
    double expected = 0.0;
    if (derivative == 1 && k >= 1) expected = k * ipow(grid.nodes[i], k - 1);
    if (derivative == 2 && k >= 2) expected = k * (k - 1) * ipow(grid.nodes[i], k - 2);
    worst = std::max(worst, std::abs(applied[i] - expected));
  }
  return worst;
}

}  // namespace

VerificationReport verify_sbp(const SbpSecondDerivative& op) {
  VerificationReport rep;
  const Grid& g = op.grid;
  const double h = g.h;
  const double tol2 = 1e-10 / (h * h);
  const std::size_t size = g.size();
  const Vector ones(size, 1.0);
  const Vector eL = left_unit(g), eR = right_unit(g);

  Matrix identity_rhs = -1.0 * op.stiffness;
  for (std::size_t j = 0; j < size; ++j) {
    identity_rhs(0, j) -= op.left_derivative[j];
    identity_rhs(size - 1, j) += op.right_derivative[j];
  }
  Matrix weighted = op.matrix;
  for (std::size_t i = 0; i < size; ++i)
    for (double& v : weighted.row(i)) v *= op.norm_weights[i];
  rep.checks.push_back({"sbp_identity", max_abs(weighted - identity_rhs), 1e-12 / (h * h)});

  rep.checks.push_back({"stiffness_symmetry", asymmetry(op.stiffness), 1e-12 / h});
  double mirror = 0.0;
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j)
      mirror = std::max(mirror, std::abs(op.stiffness(g.n - i, g.n - j) - op.stiffness(i, j)));
  rep.checks.push_back({"stiffness_mirror", mirror, 1e-12 / h});
  Vector reversed_right(op.right_derivative.rbegin(), op.right_derivative.rend());
  rep.checks.push_back({"boundary_mirror", max_abs_diff(op.left_derivative, scaled(reversed_right, -1.0)), 1e-12 / h});

  double min_weight = *std::min_element(op.norm_weights.begin(), op.norm_weights.end());
  rep.checks.push_back({"norm_positive", min_weight > 0 ? 0.0 : 1.0, 0.0});

  rep.checks.push_back({"d2_constant", norm_inf(op.matrix * ones), 1e-11 / (h * h)});
  rep.checks.push_back({"d2_linear", norm_inf(op.matrix * g.nodes), 1e-11 / (h * h)});
  rep.checks.push_back({"left_derivative_constant", std::abs(dot(op.left_derivative, ones)), 1e-11 / (h * h)});
  rep.checks.push_back({"left_derivative_linear", std::abs(dot(op.left_derivative, g.nodes) - 1.0), 1e-11 / (h * h)});
  rep.checks.push_back({"right_derivative_constant", std::abs(dot(op.right_derivative, ones)), 1e-11 / (h * h)});
  rep.checks.push_back({"right_derivative_linear", std::abs(dot(op.right_derivative, g.nodes) - 1.0), 1e-11 / (h * h)});
  rep.checks.push_back({"stiffness_constant", norm_inf(op.stiffness * ones), 1e-11 / h});
  rep.checks.push_back({"stiffness_linear", max_abs_diff(op.stiffness * g.nodes, subtract(eR, eL)), 1e-11 / h});

  const std::size_t block = closure_block(op.interior_order);
  const int boundary_degree = op.interior_order / 2 + 1;
  for (int k = 0; k <= op.interior_order + 1; ++k) {
    rep.checks.push_back({"interior_accuracy_x" + std::to_string(k),
                          accuracy_residual(op.matrix, g, k, 2, block, size - block), tol2});
  }
  for (int k = 0; k <= boundary_degree; ++k) {
    const double top = accuracy_residual(op.matrix, g, k, 2, 0, block);
    const double bottom = accuracy_residual(op.matrix, g, k, 2, size - block, size);
    rep.checks.push_back({"boundary_accuracy_x" + std::to_string(k), std::max(top, bottom), tol2});
  }
  return rep;
}

VerificationReport verify_sbp(const SbpFirstDerivative& op) {
  VerificationReport rep;
  const Grid& g = op.grid;
  const std::size_t size = g.size();
  Matrix boundary = op.skew_form + op.skew_form.transpose();
  boundary(0, 0) += 1.0;
  boundary(size - 1, size - 1) -= 1.0;
  rep.checks.push_back({"skew_boundary", max_abs(boundary), 1e-13});
  const double min_weight = *std::min_element(op.norm_weights.begin(), op.norm_weights.end());
  rep.checks.push_back({"norm_positive", min_weight > 0 ? 0.0 : 1.0, 0.0});

  const std::size_t block = closure_block(op.interior_order);
  const int boundary_degree = op.interior_order / 2;
  for (int k = 0; k <= boundary_degree; ++k) {
    rep.checks.push_back({"all_rows_accuracy_x" + std::to_string(k), accuracy_residual(op.matrix, g, k, 1, 0, size),
                          1e-10 / ipow(g.h, k)});
  }
  for (int k = boundary_degree + 1; k <= op.interior_order; ++k) {
    rep.checks.push_back({"interior_accuracy_x" + std::to_string(k),
                          accuracy_residual(op.matrix, g, k, 1, block, size - block), 1e-10 / ipow(g.h, k)});
  }
  return rep;
}

}  // namespace sbp
