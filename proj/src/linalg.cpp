#include "sbp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sbp/errors.hpp"

namespace sbp {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::outer(std::span<const double> u, std::span<const double> v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const {
  if (r0 + nrows > rows_ || c0 + ncols > cols_) throw DimensionMismatch("block out of range");
  Matrix b(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionMismatch("block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix +=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix -=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double asymmetry(const Matrix& a) {
  if (!a.is_square()) throw DimensionMismatch("asymmetry of non-square matrix");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("add");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("subtract");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vector scaled(std::span<const double> a, double s) {
  Vector c(a.begin(), a.end());
  for (double& x : c) x *= s;
  return c;
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// LU

LuFactorization::LuFactorization(Matrix m, double pivot_rel_tol) : lu_(std::move(m)) {
  if (!lu_.is_square() || lu_.empty()) throw DimensionMismatch("LU needs a non-empty square matrix");
  const std::size_t n = lu_.rows();
  const double threshold = pivot_rel_tol * norm_inf(lu_);
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  min_pivot_ = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    min_pivot_ = std::min(min_pivot_, best);
    if (!(best > threshold)) {
      throw SingularMatrix("pivot " + describe(best) + " at column " + std::to_string(k) +
                           " below " + describe(threshold));
    }
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const double pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw DimensionMismatch("LU solve: rhs length");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Matrix LuFactorization::solve(const Matrix& b) const {
  if (b.rows() != size()) throw DimensionMismatch("LU solve: rhs rows");
  Matrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const Vector col = solve(b.column(j));
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

Matrix LuFactorization::inverse() const { return solve(Matrix::identity(size())); }

Vector lu_solve(const Matrix& m, std::span<const double> b) {
  if (b.size() != m.rows()) throw DimensionMismatch("lu_solve: rhs length");
  return LuFactorization(m).solve(b);
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues: cyclic Jacobi

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiRelOffTol = 1e-13;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& s, bool want_vectors) {
  if (!s.is_square() || s.empty()) throw DimensionMismatch("sym_eigen needs a square matrix");
  const double scale = norm_inf(s);
  if (asymmetry(s) > 1e-12 * scale) throw NotSymmetric("asymmetry exceeds 1e-12 ||S||inf");

  const std::size_t n = s.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix();

  const double target = kJacobiRelOffTol * norm_frobenius(a);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double hh = a(r, q);
          const double np = g - sn * (hh + g * tau);
          const double nq = hh + sn * (g - hh * tau);
          a(r, p) = np;
          a(p, r) = np;
          a(r, q) = nq;
          a(q, r) = nq;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            const double g = v(r, p);
            const double hh = v(r, q);
            v(r, p) = g - sn * (hh + g * tau);
            v(r, q) = hh + sn * (g - hh * tau);
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = a(order[k], order[k]);
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

SpectrumReport sym_eigenvalues(const Matrix& s, double rank_rel_tol) {
  SpectrumReport rep;
  rep.eigenvalues = sym_eigen(s, false).values;
  const double lo = rep.eigenvalues.front();
  const double hi = rep.eigenvalues.back();
  rep.min_eigenvalue = lo;
  rep.spectral_radius = std::max(std::abs(lo), std::abs(hi));
  rep.tolerance_used = rank_rel_tol * rep.spectral_radius;
  rep.numeric_rank = static_cast<std::size_t>(std::count_if(
      rep.eigenvalues.begin(), rep.eigenvalues.end(),
      [&](double l) { return std::abs(l) > rep.tolerance_used; }));
  return rep;
}

std::size_t numeric_rank(const Matrix& s, double rel_tol) {
  if (!(rel_tol > 0)) throw UsageError("numeric_rank: rel_tol must be positive");
  return sym_eigenvalues(s, rel_tol).numeric_rank;
}

double min_eigenvalue_deflated(const Matrix& s, std::span<const Vector> null_vectors) {
  const std::size_t n = s.rows();
  std::vector<Vector> basis;
  if (null_vectors.empty()) {
    basis.emplace_back(n, 1.0);
  } else {
    basis.assign(null_vectors.begin(), null_vectors.end());
  }
  // Modified Gram-Schmidt.
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].size() != n) throw DimensionMismatch("null vector length");
    for (std::size_t j = 0; j < k; ++j) axpy(-dot(basis[j], basis[k]), basis[j], basis[k]);
    const double len = norm2(basis[k]);
    if (len == 0.0) throw UsageError("null vectors are linearly dependent");
    for (double& v : basis[k]) v /= len;
  }
  Matrix shifted = s;
  const double shift = norm_inf(s);
  for (const Vector& q : basis)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) shifted(i, j) += shift * q[i] * q[j];
  return sym_eigen(shifted, false).values.front();
}

// ---------------------------------------------------------------------------
// SVD: one-sided Jacobi (Hestenes)

SvdResult svd(const Matrix& a_in) {
  if (a_in.empty()) throw DimensionMismatch("svd of empty matrix");
  const bool transposed = a_in.rows() < a_in.cols();
  const Matrix a = transposed ? a_in.transpose() : a_in;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  // Work column-major for cache-friendly column rotations.
  std::vector<Vector> u(n, Vector(m));
  std::vector<Vector> v(n, Vector(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) u[j][i] = a(i, j);
    v[j][j] = 1.0;
  }

  constexpr double eps = 1e-15;
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool rotated = false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double alpha = dot(u[j], u[j]);
        const double beta = dot(u[k], u[k]);
        const double gamma = dot(u[j], u[k]);
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double uj = u[j][i];
          const double uk = u[k][i];
          u[j][i] = c * uj - s * uk;
          u[k][i] = s * uj + c * uk;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vj = v[j][i];
          const double vk = v[k][i];
          v[j][i] = c * vj - s * vk;
          v[k][i] = s * vj + c * vk;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(u[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult out;
  out.singular_values.resize(n);
  Matrix uu(m, n), vv(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    for (std::size_t i = 0; i < m; ++i) uu(i, k) = sigma[j] > 0 ? u[j][i] / sigma[j] : 0.0;
    for (std::size_t i = 0; i < n; ++i) vv(i, k) = v[j][i];
  }
  if (transposed) {
    out.u = std::move(vv);
    out.v = std::move(uu);
  } else {
    out.u = std::move(uu);
    out.v = std::move(vv);
  }
  return out;
}

LeastSquaresSolution least_squares(const Matrix& a, std::span<const double> b, double rel_tol) {
  if (b.size() != a.rows()) throw DimensionMismatch("least_squares: rhs length");
  // Pad with zero rows so the thin SVD exposes a complete right basis.
  Matrix work = a;
  if (a.rows() < a.cols()) {
    work = Matrix(a.cols(), a.cols());
    work.set_block(0, 0, a);
  }
  Vector rhs(work.rows(), 0.0);
  std::copy(b.begin(), b.end(), rhs.begin());

  const SvdResult dec = svd(work);
  const std::size_t n = a.cols();
  const double cutoff = rel_tol * dec.singular_values.front();

  LeastSquaresSolution out;
  out.x.assign(n, 0.0);
  std::vector<std::size_t> null_cols;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = dec.singular_values[k];
    if (s > cutoff) {
      ++out.rank;
      double coeff = 0.0;
      for (std::size_t i = 0; i < work.rows(); ++i) coeff += dec.u(i, k) * rhs[i];
      coeff /= s;
      for (std::size_t i = 0; i < n; ++i) out.x[i] += coeff * dec.v(i, k);
    } else {
      null_cols.push_back(k);
    }
  }
  out.nullspace = Matrix(n, null_cols.size());
  for (std::size_t c = 0; c < null_cols.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) out.nullspace(i, c) = dec.v(i, null_cols[c]);
  out.residual_inf = norm_inf(subtract(a * out.x, b));
  return out;
}

}  // namespace sbp
