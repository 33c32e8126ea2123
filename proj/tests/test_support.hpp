#pragma once

#include <cmath>
#include <cstdint>

#include "pulearn/linalg.hpp"
#include "pulearn/rng.hpp"

namespace testing {

using pulearn::Index;
using pulearn::Matrix;
using pulearn::Vector;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  pulearn::Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline pulearn::SymMatrix random_spd(Index order, std::uint64_t seed) {
  const Matrix a = gaussian(order, order + 2, seed);
  return pulearn::SymMatrix(a * a.transpose() +
                            0.1 * Matrix::Identity(order, order));
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Laplace expansion along the first row.
inline double cofactor_det(const Matrix& m) {
  const Index n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (Index c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (Index i = 1; i < n; ++i)
      for (Index j = 0, k = 0; j < n; ++j)
        if (j != c) minor(i - 1, k++) = m(i, j);
    det += ((c % 2) ? -1.0 : 1.0) * m(0, c) * cofactor_det(minor);
  }
  return det;
}

}  // namespace testing
