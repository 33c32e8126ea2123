#include "pulearn/linalg.hpp"

#include <cmath>
#include <sstream>

#include "pulearn/errors.hpp"

namespace pulearn {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InputError("SymMatrix: matrix is not square");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Index order) {
  return SymMatrix(Matrix::Identity(order, order));
}

SymMatrix SymMatrix::zero(Index order) {
  return SymMatrix(Matrix::Zero(order, order));
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()));
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

namespace {

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) {
    throw InputError(std::string(who) + ": non-finite matrix entries");
  }
}

// Reverses Eigen's ascending order and fixes each eigenvector's sign.
EigenDecomposition descending(const Vector& values, const Matrix& vectors) {
  const Index n = values.size();
  EigenDecomposition out;
  out.values = values.reverse();
  out.vectors = vectors.rowwise().reverse();
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < out.vectors.rows(); ++r) {
      const double v = out.vectors(r, c);
      if (v != 0.0) {
        if (v < 0.0) out.vectors.col(c) *= -1.0;
        break;
      }
    }
  }
  return out;
}

void require_positive_definite(const Vector& ascending, const char* who) {
  const double lo = ascending.size() ? ascending(0) : 1.0;
  const double hi = ascending.size() ? ascending(ascending.size() - 1) : 1.0;
  if (!(hi > 0.0) || !(lo > kDegeneracyTolerance * hi)) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": matrix is not positive definite (min eigenvalue " << lo
       << ", max eigenvalue " << hi << ")";
    throw DegenerateError(os.str(), lo);
  }
}

// Ascending eigenvalues (and eigenvectors when `vectors`) of a symmetric
// matrix.
void eigensolve(const Matrix& a, bool vectors, Vector& values, Matrix& vecs,
                const char* who) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw InputError(std::string(who) + ": eigensolver did not converge");
  }
  values = es.eigenvalues();
  if (vectors) vecs = es.eigenvectors();
}

}  // namespace

EigenDecomposition sym_eig(const SymMatrix& a) {
  require_finite(a.matrix(), "sym_eig");
  if (a.order() == 0) return {};
  Vector values;
  Matrix vectors;
  eigensolve(a.matrix(), true, values, vectors, "sym_eig");
  return descending(values, vectors);
}

EigenDecomposition gen_eig(const SymMatrix& a, const SymMatrix& b) {
  require_finite(a.matrix(), "gen_eig");
  require_finite(b.matrix(), "gen_eig");
  if (a.order() != b.order()) {
    throw InputError("gen_eig: matrix orders differ");
  }
  if (a.order() == 0) return {};
  Vector metric_values;
  Matrix unused;
  eigensolve(b.matrix(), false, metric_values, unused, "gen_eig");
  require_positive_definite(metric_values, "gen_eig metric");

  // Cholesky reduction B = L L^T, then A' = L^{-1} A L^{-T}.
  Eigen::LLT<Matrix> llt(b.matrix());
  if (llt.info() != Eigen::Success) {
    throw DegenerateError("gen_eig metric: Cholesky factorization failed",
                          metric_values(0));
  }
  Matrix reduced = llt.matrixL().solve(a.matrix());
  reduced = llt.matrixL().solve(reduced.transpose()).transpose();
  reduced = 0.5 * (reduced + reduced.transpose());
  Vector values;
  Matrix w;
  eigensolve(reduced, true, values, w, "gen_eig");
  return descending(values, llt.matrixU().solve(w));
}

SymMatrix inv_sqrt_psd(const SymMatrix& g) {
  require_finite(g.matrix(), "inv_sqrt_psd");
  if (g.order() == 0) return g;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.matrix());
  require_positive_definite(es.eigenvalues(), "inv_sqrt_psd");
  const Vector scale = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix& v = es.eigenvectors();
  return SymMatrix(v * scale.asDiagonal() * v.transpose());
}

SymMatrix inv_psd(const SymMatrix& g) {
  require_finite(g.matrix(), "inv_psd");
  if (g.order() == 0) return g;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.matrix());
  require_positive_definite(es.eigenvalues(), "inv_psd");
  const Vector scale = es.eigenvalues().cwiseInverse();
  const Matrix& v = es.eigenvectors();
  return SymMatrix(v * scale.asDiagonal() * v.transpose());
}

EliminationBasis eliminate_constraints(const Matrix& c, Index cols) {
  require_finite(c, "eliminate_constraints");
  if (c.rows() > 0 && c.cols() != cols) {
    throw InputError("eliminate_constraints: column count mismatch");
  }
  EliminationBasis out;
  if (c.rows() == 0 || c.cwiseAbs().maxCoeff() == 0.0) {
    out.basis = Matrix::Identity(cols, cols);
    out.rank_removed = 0;
    return out;
  }
  // Full pivoting puts max|C| in the first pivot, so Eigen's threshold
  // (relative to the largest pivot) is relative to max|C|.
  Eigen::FullPivLU<Matrix> lu(c);
  lu.setThreshold(kDegeneracyTolerance);
  out.rank_removed = lu.rank();
  if (out.rank_removed == cols) {
    out.basis = Matrix(cols, 0);
  } else {
    // Orthonormal columns keep the reduced metric as well conditioned as
    // Q itself; the raw kernel basis can be far from orthogonal.
    const Matrix kernel = lu.kernel();
    out.basis = kernel.householderQr().householderQ() *
                Matrix::Identity(cols, kernel.cols());
  }
  return out;
}

}  // namespace pulearn
