#include "pulearn/model.hpp"

#include "pulearn/errors.hpp"

namespace pulearn {

namespace {
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

Index flatten_index(Index j, Index k, Index n) {
  if (j < 0 || k < 0 || k >= n) {
    throw InputError("flatten_index: index out of range");
  }
  return j * n + k;
}

Vector flatten(const Matrix& u) {
  RowMajorMatrix r = u;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

Matrix unflatten(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw InputError("unflatten: size mismatch");
  }
  return Eigen::Map<const RowMajorMatrix>(v.data(), rows, cols);
}

void ObservationSample::validate() const {
  if (x.rows() != weights.size() || f.rows() != weights.size()) {
    throw InputError("sample: record counts of weights, x and f differ");
  }
  if (d() > n()) {
    throw InputError("sample: OUT dimension D exceeds IN dimension n");
  }
  if (!weights.allFinite() || !x.allFinite() || !f.allFinite()) {
    throw InputError("sample: non-finite values");
  }
  if (size() > 0 && !(weights.minCoeff() > 0.0)) {
    throw InputError("sample: weights must be positive");
  }
}

ObservationSample ObservationSample::truncated(Index new_n, Index new_d) const {
  if (new_n < 1 || new_n > n() || new_d < 1 || new_d > d()) {
    throw InputError("sample: requested columns exceed the sample");
  }
  ObservationSample out;
  out.weights = weights;
  out.x = x.leftCols(new_n);
  out.f = f.leftCols(new_d);
  out.orthogonalized = false;
  return out;
}

void FidelityTensor::validate() const {
  if (s.order() != d * n) {
    throw InputError("fidelity tensor: order is not D * n");
  }
}

double PartialIsometry::feasibility_residual() const {
  if (u.size() == 0) return 0.0;
  return (u * u.transpose() - Matrix::Identity(d(), d())).cwiseAbs().maxCoeff();
}

Index constraint_count(Index d) { return d < 1 ? 0 : (d - 1) * (d + 2) / 2; }

std::string to_string(Channel c) {
  return c == Channel::gram ? "gram" : "unit";
}

Channel channel_from_string(const std::string& s) {
  if (s == "gram") return Channel::gram;
  if (s == "unit") return Channel::unit;
  throw InputError("unknown channel '" + s + "' (expected gram or unit)");
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
  if (!(mu_tolerance > 0.0) || !(unitarity_tolerance > 0.0) ||
      !(lambda_tolerance > 0.0)) {
    throw InputError("solver tolerances must be positive");
  }
  if (num_runs < 1) throw InputError("num_runs must be >= 1");
  if (eigenstate_rank < 0) throw InputError("eigenstate_rank must be >= 0");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged:
      return "converged";
    case StopReason::max_iterations:
      return "max_iterations";
    case StopReason::cycling:
      return "cycling";
    case StopReason::failed:
      return "failed";
  }
  return "unknown";
}

}  // namespace pulearn
