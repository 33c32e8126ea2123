#include "pulearn/tensor.hpp"

#include <cmath>
#include <sstream>

#include "pulearn/errors.hpp"

namespace pulearn {

SymMatrix gram_from_sample(const Matrix& vectors, const Vector& weights) {
  if (vectors.rows() != weights.size()) {
    throw InputError("gram_from_sample: vector and weight counts differ");
  }
  if (vectors.rows() == 0) {
    throw InputError("gram_from_sample: empty sample");
  }
  const Index n = vectors.cols();
  Matrix g = Matrix::Zero(n, n);
  for (Index l = 0; l < vectors.rows(); ++l) {
    const double w = weights(l);
    for (Index k2 = 0; k2 < n; ++k2) {
      const double wk2 = w * vectors(l, k2);
      for (Index k = k2; k < n; ++k) g(k, k2) += wk2 * vectors(l, k);
    }
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return SymMatrix(g);
}

namespace {

// Orthonormalizing transform R with R G R^T = I. Degenerate matrices are
// reported together with their near-null directions.
Matrix orthonormalizer(const SymMatrix& g, Orthogonalization method,
                       const char* space) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.matrix());
  const Vector& ev = es.eigenvalues();
  const double hi = ev(ev.size() - 1);
  if (!(hi > 0.0) || !(ev(0) > kDegeneracyTolerance * hi)) {
    std::ostringstream os;
    os.precision(6);
    os << space << "-space Gram matrix is degenerate (information-incomplete "
       << "sample); near-null directions:";
    for (Index i = 0; i < ev.size(); ++i) {
      if (ev(i) > kDegeneracyTolerance * hi && hi > 0.0) break;
      os << " [eigenvalue " << ev(i) << ": "
         << es.eigenvectors().col(i).transpose() << "]";
    }
    throw DegenerateError(os.str(), ev(0));
  }
  if (method == Orthogonalization::gram_schmidt) {
    Eigen::LLT<Matrix> llt(g.matrix());
    const Index n = g.order();
    return llt.matrixL().solve(Matrix::Identity(n, n));
  }
  const Vector scale = ev.cwiseSqrt().cwiseInverse();
  const Matrix& v = es.eigenvectors();
  return SymMatrix(v * scale.asDiagonal() * v.transpose()).matrix();
}

FidelityTensor accumulate_pairs(const Vector& weights, const Matrix& alpha,
                                const Matrix& beta) {
  const Index n = alpha.cols();
  const Index d = beta.cols();
  const Index dn = d * n;
  Matrix s = Matrix::Zero(dn, dn);
  Vector z(dn);
  for (Index l = 0; l < weights.size(); ++l) {
    for (Index j = 0; j < d; ++j) {
      z.segment(j * n, n) = beta(l, j) * alpha.row(l).transpose();
    }
    s.selfadjointView<Eigen::Lower>().rankUpdate(z, weights(l));
  }
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return FidelityTensor{d, n, SymMatrix(s)};
}

}  // namespace

std::pair<ObservationSample, GramPair> regularize(
    const ObservationSample& sample, Orthogonalization method) {
  sample.validate();
  GramPair grams;
  grams.gx = gram_from_sample(sample.x, sample.weights);
  grams.gf = gram_from_sample(sample.f, sample.weights);
  grams.rx = orthonormalizer(grams.gx, method, "x");
  grams.rf = orthonormalizer(grams.gf, method, "f");

  ObservationSample out;
  out.weights = sample.weights;
  out.x = sample.x * grams.rx.transpose();
  out.f = sample.f * grams.rf.transpose();
  out.orthogonalized = true;
  return {std::move(out), std::move(grams)};
}

GramPair identity_grams(const ObservationSample& sample) {
  GramPair grams;
  grams.gx = gram_from_sample(sample.x, sample.weights);
  grams.gf = gram_from_sample(sample.f, sample.weights);
  grams.rx = Matrix::Identity(sample.n(), sample.n());
  grams.rf = Matrix::Identity(sample.d(), sample.d());
  return grams;
}

FidelityTensor build_tensor_pairs(const ObservationSample& sample) {
  sample.validate();
  return accumulate_pairs(sample.weights, sample.x, sample.f);
}

FidelityTensor build_tensor_timeseries(const Matrix& states,
                                       const Vector& weights) {
  if (states.rows() < 2) {
    throw InputError("build_tensor_timeseries: need at least 2 states");
  }
  if (weights.size() != states.rows() - 1) {
    throw InputError("build_tensor_timeseries: need one weight per pair");
  }
  ObservationSample pairs;
  pairs.weights = weights;
  pairs.x = states.topRows(states.rows() - 1);
  pairs.f = states.bottomRows(states.rows() - 1);
  return build_tensor_pairs(pairs);
}

double christoffel(const Vector& point, const SymMatrix& gram_inverse) {
  if (point.size() != gram_inverse.order()) {
    throw InputError("christoffel: dimension mismatch");
  }
  const double q = point.dot(gram_inverse.matrix() * point);
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw InputError("christoffel: quadratic form is not positive");
  }
  return 1.0 / q;
}

LocalizedState localized_state(const Vector& point,
                               const SymMatrix& gram_inverse) {
  const double k = christoffel(point, gram_inverse);
  return {std::sqrt(k) * (gram_inverse.matrix() * point)};
}

FidelityTensor build_tensor_localized(const ObservationSample& sample) {
  sample.validate();
  const SymMatrix ix = SymMatrix::identity(sample.n());
  const SymMatrix iff = SymMatrix::identity(sample.d());
  Matrix alpha(sample.size(), sample.n());
  Matrix beta(sample.size(), sample.d());
  for (Index l = 0; l < sample.size(); ++l) {
    alpha.row(l) = localized_state(sample.x.row(l).transpose(), ix)
                       .coefficients.transpose();
    beta.row(l) = localized_state(sample.f.row(l).transpose(), iff)
                      .coefficients.transpose();
  }
  return accumulate_pairs(sample.weights, alpha, beta);
}

FidelityTensor build_tensor_vqa(const SymMatrix& o, const SymMatrix& rho0) {
  const Index d = o.order();
  const Index n = rho0.order();
  if (d == 0 || n == 0) throw InputError("build_tensor_vqa: empty operator");
  if (d > n) throw InputError("build_tensor_vqa: D exceeds n");
  Matrix s(d * n, d * n);
  for (Index j = 0; j < d; ++j) {
    for (Index j2 = 0; j2 < d; ++j2) {
      s.block(j * n, j2 * n, n, n) = o(j, j2) * rho0.matrix();
    }
  }
  return FidelityTensor{d, n, SymMatrix(s)};
}

double fidelity(const Matrix& u, const FidelityTensor& s) {
  s.validate();
  if (u.rows() != s.d || u.cols() != s.n) {
    throw InputError("fidelity: u shape does not match the tensor");
  }
  const Vector v = flatten(u);
  return v.dot(s.s.matrix() * v);
}

double evaluate_probability(const Matrix& u, const GramPair& grams,
                            const Vector& x, const Vector& f) {
  if (u.rows() != f.size() || u.cols() != x.size() ||
      grams.gx.order() != x.size() || grams.gf.order() != f.size()) {
    throw InputError("evaluate_probability: dimension mismatch");
  }
  if (x.squaredNorm() == 0.0 || f.squaredNorm() == 0.0) {
    throw InputError("evaluate_probability: zero-norm x or f");
  }
  const Matrix gfi = inv_psd(grams.gf).matrix();
  const Matrix gxi = inv_psd(grams.gx).matrix();
  const Vector gf_inv_f = gfi * f;
  const double amplitude = gf_inv_f.dot(u * x);
  return amplitude * amplitude / (f.dot(gf_inv_f) * x.dot(gxi * x));
}

MaxProbabilityOutcome max_probability_outcome(const Matrix& u,
                                              const GramPair& grams,
                                              const Vector& x) {
  if (u.cols() != x.size() || grams.gx.order() != x.size() ||
      grams.gf.order() != u.rows()) {
    throw InputError("max_probability_outcome: dimension mismatch");
  }
  if (x.squaredNorm() == 0.0) {
    throw InputError("max_probability_outcome: zero-norm x");
  }
  const double k = christoffel(x, inv_psd(grams.gx));
  const Vector a = inv_psd(grams.gf).matrix() * (u * x) * std::sqrt(k);
  MaxProbabilityOutcome out;
  out.f = grams.gf.matrix() * a;
  out.probability = a.dot(out.f);
  return out;
}

}  // namespace pulearn
