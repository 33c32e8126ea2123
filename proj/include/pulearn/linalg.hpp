#pragma once

#include <Eigen/Dense>

namespace pulearn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real symmetric matrix. Symmetry is exact: construction averages the
/// input with its transpose, which is a no-op on already symmetric input.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Index order);
  static SymMatrix zero(Index order);
  static SymMatrix diagonal(const Vector& d);

  Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Eigenpairs with eigenvalues sorted in descending order; eigenvector i is
/// column i of `vectors`.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

/// Null-space basis M of a homogeneous constraint matrix C (C * M = 0).
struct EliminationBasis {
  Matrix basis;            // (Dn) x N_V
  Index rank_removed = 0;  // rank(C)

  Index rows() const { return basis.rows(); }
  Index cols() const { return basis.cols(); }
};

/// Relative threshold below which an eigenvalue (or pivot) is treated as zero.
inline constexpr double kDegeneracyTolerance = 1e-12;

/// Full symmetric eigendecomposition. Ties are broken deterministically and
/// each eigenvector is signed so that its first nonzero component is positive.
EigenDecomposition sym_eig(const SymMatrix& a);

/// Solves A v = mu B v for SPD B. Eigenvectors are B-orthonormal.
/// Throws DegenerateError when B is not positive definite.
EigenDecomposition gen_eig(const SymMatrix& a, const SymMatrix& b);

/// G^{-1/2} with the positive branch on every eigenvalue.
SymMatrix inv_sqrt_psd(const SymMatrix& g);

/// Inverse of an SPD matrix via its eigendecomposition; same degeneracy
/// check as inv_sqrt_psd.
SymMatrix inv_psd(const SymMatrix& g);

/// Orthonormal null-space basis of `c`; rank and kernel come from Gaussian
/// elimination with full pivoting.
/// `cols` is the number of unknowns; it is needed when `c` has no rows.
EliminationBasis eliminate_constraints(const Matrix& c, Index cols);

bool all_finite(const Matrix& m);

}  // namespace pulearn
