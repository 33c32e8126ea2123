#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulearn/linalg.hpp"

namespace pulearn {

/// Row-major position of u(j, k) in the flattened (Dn) vector.
Index flatten_index(Index j, Index k, Index n);

/// Row-major vectorization of a D x n matrix ("row by row").
Vector flatten(const Matrix& u);
Matrix unflatten(const Vector& v, Index rows, Index cols);

/// Weighted observation pairs (alpha in R^n) -> (beta in R^D). Record l is
/// row l of `x` and `f`.
struct ObservationSample {
  Vector weights;
  Matrix x;  // M x n
  Matrix f;  // M x D
  bool orthogonalized = false;

  Index size() const { return weights.size(); }
  Index n() const { return x.cols(); }
  Index d() const { return f.cols(); }

  /// Throws InputError unless D <= n, weights > 0, all entries finite and
  /// the row counts agree.
  void validate() const;

  /// Keeps the first `n` x-columns and the first `d` f-columns.
  ObservationSample truncated(Index n, Index d) const;
};

/// The (Dn) x (Dn) kernel of the fidelity quadratic form, indexed by
/// flatten_index(j, k, n).
struct FidelityTensor {
  Index d = 0;
  Index n = 0;
  SymMatrix s;

  /// Throws InputError if the order is not d * n.
  void validate() const;
};

/// D x n matrix. Feasible when its rows are orthonormal.
struct PartialIsometry {
  Matrix u;

  Index d() const { return u.rows(); }
  Index n() const { return u.cols(); }

  /// max |u u^T - I|.
  double feasibility_residual() const;
};

using LagrangeMultipliers = SymMatrix;

/// Homogeneous constraint rows C (N_d x Dn) on the flattened u.
struct ConstraintSet {
  Matrix c;

  Index count() const { return c.rows(); }
};

/// (D-1)(D+2)/2, the number of first-order unitarity constraints.
Index constraint_count(Index d);

enum class Channel { gram, unit };
enum class QChoice { identity, lambda };

std::string to_string(Channel c);
Channel channel_from_string(const std::string& s);

struct SolverConfig {
  int max_iterations = 100;
  double mu_tolerance = 1e-12;
  double unitarity_tolerance = 1e-12;
  double lambda_tolerance = 1e-10;
  int eigenstate_rank = 0;
  int num_runs = 4;
  Channel channel = Channel::gram;
  QChoice q_choice = QChoice::identity;
  bool scan_candidates = false;

  void validate() const;
};

/// One row of the per-iteration diagnostics.
struct IterationRecord {
  int iteration = 0;
  double mu = 0.0;
  double fidelity = 0.0;
  double penalty = 0.0;  // sum of 1 / lambda_G before adjustment
  Index eigenproblem_dim = 0;
};

enum class StopReason { converged, max_iterations, cycling, failed };
std::string to_string(StopReason r);

struct RunReport {
  int rank = 0;
  StopReason stop = StopReason::max_iterations;
  std::string message;
  PartialIsometry solution;
  double fidelity = 0.0;
  LagrangeMultipliers lambda;
  std::vector<IterationRecord> history;

  bool converged() const { return stop == StopReason::converged; }
};

struct SolverReport {
  PartialIsometry solution;
  double fidelity = 0.0;
  bool converged = false;
  std::vector<IterationRecord> iterations;  // history of the selected run
  LagrangeMultipliers lambda_final;
  std::uint64_t seed = 0;
  int selected_run = -1;
  std::vector<RunReport> runs;
  std::vector<std::string> warnings;
};

}  // namespace pulearn
