#pragma once

// Small dense real linear algebra: just what the operator constructions and
// analyses need (LU, symmetric eigenvalues, SVD, numeric rank).

#include <cstddef>
#include <span>
#include <vector>

namespace sbp {

using Vector = std::vector<double>;

/// Relative tolerance used by numeric_rank when the caller does not supply one.
inline constexpr double kDefaultRankTolerance = 1e-9;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix outer(std::span<const double> u, std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  /// Copy of the block starting at (r0, c0) with the given shape.
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double norm_inf(const Matrix& a);
double norm_frobenius(const Matrix& a);
double max_abs(const Matrix& a);
/// max |a - aᵀ|
double asymmetry(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> v);
double norm2(std::span<const double> v);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double s);
/// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y);
double mean(std::span<const double> v);

/// LU factorization with row pivoting. Construction fails with SingularMatrix
/// when a pivot drops below pivot_rel_tol * ||M||inf.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix m, double pivot_rel_tol = 1e-14);

  std::size_t size() const { return lu_.rows(); }
  Vector solve(std::span<const double> b) const;
  /// Solves for every column of b.
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;
  double min_pivot() const { return min_pivot_; }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double min_pivot_ = 0.0;
};

Vector lu_solve(const Matrix& m, std::span<const double> b);

struct SpectrumReport {
  Vector eigenvalues;  // ascending
  double spectral_radius = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t numeric_rank = 0;
  double tolerance_used = 0.0;  // absolute threshold applied to |λ|
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column k belongs to values[k]
};

/// Cyclic Jacobi on (S + Sᵀ)/2. Throws NotSymmetric when ||S - Sᵀ||inf > 1e-12 ||S||inf.
EigenDecomposition sym_eigen(const Matrix& s, bool want_vectors = true);
SpectrumReport sym_eigenvalues(const Matrix& s, double rank_rel_tol = kDefaultRankTolerance);
std::size_t numeric_rank(const Matrix& s, double rel_tol = kDefaultRankTolerance);

/// Smallest eigenvalue of S after shifting known null vectors out of the way:
/// S + ||S||inf·P with P the orthogonal projector onto their span. Without
/// explicit vectors the constant vector is used.
double min_eigenvalue_deflated(const Matrix& s, std::span<const Vector> null_vectors = {});

struct SvdResult {
  Matrix u;                // m × k
  Vector singular_values;  // descending, k = min(m, n)
  Matrix v;                // n × k
};

/// One-sided Jacobi SVD (thin).
SvdResult svd(const Matrix& a);

struct LeastSquaresSolution {
  Vector x;                 // minimum-norm least-squares solution
  std::size_t rank = 0;
  Matrix nullspace;         // n × (n - rank), orthonormal columns
  double residual_inf = 0;  // ||a x - b||inf
};

/// Minimum-norm least squares via the SVD; singular values below rel_tol·σmax count as zero.
LeastSquaresSolution least_squares(const Matrix& a, std::span<const double> b,
                                   double rel_tol = 1e-10);

}  // namespace sbp
