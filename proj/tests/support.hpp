#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "sbp/linalg.hpp"

namespace sbp::testing {

inline constexpr std::uint64_t kSeed = 20240611;

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) { return std::mt19937_64(kSeed + salt); }

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(size);
  for (double& x : v) x = u(rng);
  return v;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t size) {
  const Matrix m = random_matrix(rng, size, size);
  return 0.5 * (m + m.transpose());
}

/// Diagonally dominant, hence well conditioned.
inline Matrix random_well_conditioned(std::mt19937_64& rng, std::size_t size) {
  Matrix m = random_matrix(rng, size, size);
  for (std::size_t i = 0; i < size; ++i) m(i, i) += static_cast<double>(size);
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace sbp::testing
