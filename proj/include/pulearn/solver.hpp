#pragma once

#include <limits>
#include <span>
#include <utility>

#include "pulearn/model.hpp"

namespace pulearn {

/// Iteration triple (u, lambda, C) plus the diagnostics of the step that
/// produced it.
struct IterationState {
  int index = -1;  // -1 before the first iteration
  PartialIsometry u;
  LagrangeMultipliers lambda;
  ConstraintSet constraints;
  double mu = 0.0;
  double fidelity = 0.0;
  double penalty = 0.0;
  Index eigenproblem_dim = 0;

  /// lambda = 0 and no constraints, for a problem of shape D x n.
  static IterationState initial(Index d, Index n);
};

/// G^u = u u^T.
SymMatrix gram_of_rows(const Matrix& u);

/// G^{u,-1/2} u, the closest matrix with orthonormal rows.
PartialIsometry adjust_to_isometry(const Matrix& u);

/// Symmetric lambda minimizing sum |b - lambda u|^2, b = S u. u must be
/// feasible.
LagrangeMultipliers lagrange_multipliers(const PartialIsometry& u,
                                         const FidelityTensor& s);

/// Same least-squares problem restricted to projections onto `probes`
/// (each a D x n matrix). Needs at least D(D+1)/2 probes.
LagrangeMultipliers lagrange_multipliers_subspace(
    const PartialIsometry& u, const FidelityTensor& s,
    std::span<const Matrix> probes);

/// Rows that keep u u^T = I to first order: D(D-1)/2 off-diagonal rows,
/// then D-1 rows equalizing consecutive diagonal elements.
ConstraintSet build_linear_constraints(const PartialIsometry& u);

/// (M^T (S - lambda (x) I) M, M^T (Q (x) I) M).
std::pair<SymMatrix, SymMatrix> reduce_problem(const FidelityTensor& s,
                                               const LagrangeMultipliers& lambda,
                                               const SymMatrix& q,
                                               const EliminationBasis& m);

/// max |b_sq - sum_j' (lambda + mu Q)_{sj'} u_{j'q}|.
double residual(const Matrix& u, const LagrangeMultipliers& lambda, double mu,
                const SymMatrix& q, const FidelityTensor& s);

/// Tr (u u^T)^{-1}; equals D exactly when u is feasible.
double unitarity_penalty(const Matrix& u);

/// One step of the constrained eigenproblem iteration. `linear_constraints`
/// false drops C (the unconstrained baseline).
IterationState iterate(const IterationState& state, const FidelityTensor& s,
                       const SolverConfig& config,
                       bool linear_constraints = true);

/// Controls a single run of the iteration loop.
struct RunOptions {
  int rank = 0;
  /// Iterations after this many use no linear constraints.
  int constrained_iterations = std::numeric_limits<int>::max();
  bool stop_at_convergence = true;
};

RunReport run(const FidelityTensor& s, const SolverConfig& config,
              const RunOptions& options);

/// Runs ranks 0 .. num_runs-1 and keeps the best converged run by F.
SolverReport solve(const FidelityTensor& s, const SolverConfig& config);

/// The same loop without linear constraints; kept as a baseline.
SolverReport solve_vanilla(const FidelityTensor& s, const SolverConfig& config);

}  // namespace pulearn
