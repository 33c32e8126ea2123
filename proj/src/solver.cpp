#include "pulearn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pulearn/errors.hpp"
#include "pulearn/tensor.hpp"

namespace pulearn {

namespace {

// (lambda (x) I_n) * m for row-major flattened operands.
Matrix kron_identity_times(const Matrix& lambda, Index n, const Matrix& m) {
  const Index d = lambda.rows();
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index j = 0; j < d; ++j) {
    for (Index j2 = 0; j2 < d; ++j2) {
      const double l = lambda(j, j2);
      if (l != 0.0) out.middleRows(j * n, n) += l * m.middleRows(j2 * n, n);
    }
  }
  return out;
}

bool is_spd(const SymMatrix& a) {
  if (a.order() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double hi = ev(ev.size() - 1);
  return hi > 0.0 && ev(0) > kDegeneracyTolerance * hi;
}

double max_abs(const Matrix& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

bool close(double a, double b) {
  return std::abs(a - b) <=
         1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Reconstructs u from a reduced vector, sign-fixed by its largest-magnitude
// component and scaled to sum u^2 = D.
Matrix state_from_reduced(Vector v, const EliminationBasis& m, Index d,
                          Index n) {
  Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v(at) < 0.0) v = -v;
  Vector flat = m.basis * v;
  const double norm2 = flat.squaredNorm();
  if (!(norm2 > 0.0)) {
    throw DegenerateError("eigenstate reconstructs to a zero u", 0.0);
  }
  flat *= std::sqrt(static_cast<double>(d) / norm2);
  return unflatten(flat, d, n);
}

Matrix candidate_state(const EigenDecomposition& eig, Index s,
                       const EliminationBasis& m, Index d, Index n) {
  return state_from_reduced(eig.vectors.col(s), m, d, n);
}

// For a degenerate eigenvalue any vector of its eigenspace is a valid
// eigenstate. Pick the metric projection of `reference` onto that space so
// the choice is deterministic and stays near a feasible u.
Matrix degenerate_state(const EigenDecomposition& eig, Index s,
                        const EliminationBasis& m, const SymMatrix& metric,
                        const Matrix& reference, Index d, Index n) {
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;
  Index lo = s, hi = s;
  while (lo > 0 && std::abs(eig.values(lo - 1) - eig.values(s)) <= tol) --lo;
  while (hi + 1 < eig.values.size() &&
         std::abs(eig.values(hi + 1) - eig.values(s)) <= tol) {
    ++hi;
  }
  if (lo == hi) return candidate_state(eig, s, m, d, n);

  // Reduced coordinates of the reference, then B-orthogonal projection onto
  // the cluster (the eigenvectors are B-orthonormal).
  const Vector target =
      m.basis.colPivHouseholderQr().solve(flatten(reference));
  const Matrix block = eig.vectors.middleCols(lo, hi - lo + 1);
  const Vector coeffs = block.transpose() * (metric.matrix() * target);
  if (coeffs.norm() <= 1e-8 * target.norm()) {
    return candidate_state(eig, s, m, d, n);
  }
  return state_from_reduced(block * coeffs, m, d, n);
}

}  // namespace

IterationState IterationState::initial(Index d, Index n) {
  IterationState st;
  st.u.u = Matrix::Zero(d, n);
  st.lambda = SymMatrix::zero(d);
  st.constraints.c = Matrix(0, d * n);
  return st;
}

SymMatrix gram_of_rows(const Matrix& u) {
  return SymMatrix(u * u.transpose());
}

PartialIsometry adjust_to_isometry(const Matrix& u) {
  if (u.rows() == 0 || u.rows() > u.cols()) {
    throw InputError("adjust_to_isometry: need 1 <= D <= n");
  }
  try {
    return {inv_sqrt_psd(gram_of_rows(u)).matrix() * u};
  } catch (const DegenerateError& e) {
    throw DegenerateError(
        std::string("adjust_to_isometry: rank collapse of u (") + e.what() +
            ")",
        e.eigenvalue());
  }
}

LagrangeMultipliers lagrange_multipliers(const PartialIsometry& u,
                                         const FidelityTensor& s) {
  s.validate();
  if (u.d() != s.d || u.n() != s.n) {
    throw InputError("lagrange_multipliers: shape mismatch");
  }
  const Matrix b = unflatten(s.s.matrix() * flatten(u.u), s.d, s.n);
  return SymMatrix(u.u * b.transpose());
}

LagrangeMultipliers lagrange_multipliers_subspace(
    const PartialIsometry& u, const FidelityTensor& s,
    std::span<const Matrix> probes) {
  s.validate();
  const Index d = s.d;
  const Index n = s.n;
  const Index unknowns = d * (d + 1) / 2;
  if (static_cast<Index>(probes.size()) < unknowns) {
    throw InputError("lagrange_multipliers_subspace: need at least D(D+1)/2 "
                     "probe states");
  }
  const Matrix b = unflatten(s.s.matrix() * flatten(u.u), d, n);

  // lambda = sum_r lambda_r E_r over the symmetric basis E_r; each probe v
  // contributes the equation <v, b> = sum_r lambda_r <v, E_r u>.
  Matrix a(static_cast<Index>(probes.size()), unknowns);
  Vector rhs(a.rows());
  for (Index p = 0; p < a.rows(); ++p) {
    const Matrix& v = probes[static_cast<std::size_t>(p)];
    if (v.rows() != d || v.cols() != n) {
      throw InputError("lagrange_multipliers_subspace: probe shape mismatch");
    }
    rhs(p) = (v.array() * b.array()).sum();
    Index r = 0;
    for (Index i = 0; i < d; ++i) {
      for (Index j = i; j < d; ++j, ++r) {
        a(p, r) = i == j ? v.row(i).dot(u.u.row(i))
                         : v.row(i).dot(u.u.row(j)) + v.row(j).dot(u.u.row(i));
      }
    }
  }
  const SymMatrix normal(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(normal.matrix(),
                                           Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  if (!(ev(ev.size() - 1) > 0.0) ||
      !(ev(0) > kDegeneracyTolerance * ev(ev.size() - 1))) {
    throw DegenerateError(
        "lagrange_multipliers_subspace: degenerate normal equations", ev(0));
  }
  const Vector x = normal.matrix().ldlt().solve(a.transpose() * rhs);
  Matrix lambda(d, d);
  Index r = 0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j, ++r) {
      lambda(i, j) = x(r);
      lambda(j, i) = x(r);
    }
  }
  return SymMatrix(lambda);
}

ConstraintSet build_linear_constraints(const PartialIsometry& u) {
  const Index d = u.d();
  const Index n = u.n();
  ConstraintSet out;
  out.c = Matrix::Zero(constraint_count(d), d * n);
  Index row = 0;
  // Off-diagonal: G^{u|du}_ij + G^{u|du}_ji = 0 for j < i.
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < i; ++j, ++row) {
      out.c.row(row).segment(j * n, n) += u.u.row(i);
      out.c.row(row).segment(i * n, n) += u.u.row(j);
    }
  }
  // Diagonal: G^{u|du}_ii - G^{u|du}_{i-1,i-1} = 0.
  for (Index i = 1; i < d; ++i, ++row) {
    out.c.row(row).segment(i * n, n) += u.u.row(i);
    out.c.row(row).segment((i - 1) * n, n) -= u.u.row(i - 1);
  }
  return out;
}

std::pair<SymMatrix, SymMatrix> reduce_problem(const FidelityTensor& s,
                                               const LagrangeMultipliers& lambda,
                                               const SymMatrix& q,
                                               const EliminationBasis& m) {
  s.validate();
  const Index dn = s.d * s.n;
  if (lambda.order() != s.d || q.order() != s.d || m.rows() != dn) {
    throw InputError("reduce_problem: dimension mismatch");
  }
  const bool identity_basis = m.cols() == dn && m.basis.isIdentity(0.0);
  Matrix numerator;
  Matrix metric;
  if (identity_basis) {
    numerator = s.s.matrix() -
                kron_identity_times(lambda.matrix(), s.n,
                                    Matrix::Identity(dn, dn));
    metric = kron_identity_times(q.matrix(), s.n, Matrix::Identity(dn, dn));
  } else {
    const Matrix& basis = m.basis;
    Matrix sm = s.s.matrix() * basis;
    sm -= kron_identity_times(lambda.matrix(), s.n, basis);
    numerator = basis.transpose() * sm;
    metric = basis.transpose() *
             kron_identity_times(q.matrix(), s.n, basis);
  }
  SymMatrix reduced_metric(metric);
  if (reduced_metric.order() > 0) {
    Eigen::LLT<Matrix> llt(reduced_metric.matrix());
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(reduced_metric.matrix(),
                                               Eigen::EigenvaluesOnly);
      throw DegenerateError("reduce_problem: reduced metric is not positive "
                            "definite",
                            es.eigenvalues()(0));
    }
  }
  return {SymMatrix(numerator), std::move(reduced_metric)};
}

double residual(const Matrix& u, const LagrangeMultipliers& lambda, double mu,
                const SymMatrix& q, const FidelityTensor& s) {
  s.validate();
  if (u.rows() != s.d || u.cols() != s.n || lambda.order() != s.d ||
      q.order() != s.d) {
    throw InputError("residual: dimension mismatch");
  }
  const Matrix b = unflatten(s.s.matrix() * flatten(u), s.d, s.n);
  const Matrix shifted = lambda.matrix() + mu * q.matrix();
  return max_abs(b - shifted * u);
}

double unitarity_penalty(const Matrix& u) {
  return inv_psd(gram_of_rows(u)).matrix().trace();
}

IterationState iterate(const IterationState& state, const FidelityTensor& s,
                       const SolverConfig& config, bool linear_constraints) {
  s.validate();
  const Index d = s.d;
  const Index n = s.n;
  if (state.lambda.order() != d) {
    throw InputError("iterate: state does not match the tensor");
  }

  EliminationBasis m;
  if (linear_constraints && state.constraints.count() > 0) {
    m = eliminate_constraints(state.constraints.c, d * n);
  } else {
    m.basis = Matrix::Identity(d * n, d * n);
  }

  // Q = lambda is only usable once lambda is positive definite.
  const bool q_lambda =
      config.q_choice == QChoice::lambda && is_spd(state.lambda);
  const SymMatrix q = q_lambda ? state.lambda : SymMatrix::identity(d);
  const auto [numerator, metric] = reduce_problem(s, state.lambda, q, m);
  const EigenDecomposition eig = gen_eig(numerator, metric);

  const Index rank = config.eigenstate_rank;
  if (rank >= eig.values.size()) {
    throw InputError("iterate: eigenstate rank exceeds the eigenproblem "
                     "dimension");
  }

  Index selected = rank;
  Matrix reference = state.u.u;
  if (state.index < 0) {
    reference = Matrix::Identity(d, n);
  }
  Matrix u_raw =
      degenerate_state(eig, selected, m, metric, reference, d, n);
  if (config.scan_candidates) {
    // All positive mu plus the 10 highest non-positive, ranked by the
    // fidelity of the adjusted state.
    double best = -std::numeric_limits<double>::infinity();
    int negatives = 0;
    for (Index c = 0; c < eig.values.size(); ++c) {
      if (eig.values(c) <= 0.0 && negatives++ >= 10) break;
      Matrix cand = candidate_state(eig, c, m, d, n);
      double f = 0.0;
      try {
        f = fidelity(adjust_to_isometry(cand).u, s);
      } catch (const DegenerateError&) {
        continue;
      }
      if (f > best) {
        best = f;
        selected = c;
        u_raw = std::move(cand);
      }
    }
  }

  IterationState next;
  next.index = state.index + 1;
  next.mu = eig.values(selected);
  next.eigenproblem_dim = eig.values.size();
  next.penalty = unitarity_penalty(u_raw);
  next.u = adjust_to_isometry(u_raw);
  next.lambda = lagrange_multipliers(next.u, s);
  next.constraints = linear_constraints ? build_linear_constraints(next.u)
                                        : ConstraintSet{Matrix(0, d * n)};
  next.fidelity = fidelity(next.u.u, s);
  return next;
}

RunReport run(const FidelityTensor& s, const SolverConfig& config,
              const RunOptions& options) {
  config.validate();
  s.validate();
  SolverConfig cfg = config;
  cfg.eigenstate_rank = options.rank;

  RunReport report;
  report.rank = options.rank;
  const double d = static_cast<double>(s.d);
  IterationState state = IterationState::initial(s.d, s.n);
  bool converged = false;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const bool constrained = it < options.constrained_iterations;
    IterationState next;
    try {
      next = iterate(state, s, cfg, constrained);
    } catch (const DegenerateError& e) {
      std::ostringstream os;
      os << "iteration " << it << ": " << e.what();
      report.stop = StopReason::failed;
      report.message = os.str();
      break;
    }
    report.history.push_back({it, next.mu, next.fidelity, next.penalty,
                              next.eigenproblem_dim});

    const double lambda_change =
        max_abs(next.lambda.matrix() - state.lambda.matrix());
    const double lambda_scale = std::max(1.0, max_abs(next.lambda.matrix()));
    converged =
        it > 0 &&
        std::abs(next.mu) <= cfg.mu_tolerance *
                                 std::max(1.0, std::abs(next.fidelity)) &&
        std::abs(next.penalty - d) <= cfg.unitarity_tolerance &&
        lambda_change <= cfg.lambda_tolerance * lambda_scale;
    state = std::move(next);

    if (converged && options.stop_at_convergence) break;

    // Period-2 cycle over a window of 4 iterations.
    const auto& h = report.history;
    const std::size_t k = h.size();
    if (!converged && k >= 4) {
      auto same = [&](std::size_t a, std::size_t b) {
        return close(h[a].fidelity, h[b].fidelity) &&
               close(h[a].penalty, h[b].penalty);
      };
      if (same(k - 1, k - 3) && same(k - 2, k - 4) && !same(k - 1, k - 2)) {
        report.stop = StopReason::cycling;
        report.message = "period-2 cycle in (F, penalty)";
        break;
      }
    }
  }

  if (report.stop != StopReason::failed && report.stop != StopReason::cycling) {
    report.stop = converged ? StopReason::converged : StopReason::max_iterations;
  }
  if (state.index >= 0) {
    report.solution = state.u;
    report.fidelity = state.fidelity;
    report.lambda = state.lambda;
  }
  return report;
}

namespace {

SolverReport solve_runs(const FidelityTensor& s, const SolverConfig& config,
                        int constrained_iterations) {
  config.validate();
  s.validate();
  SolverReport out;
  const Index reduced_dim = s.d * s.n - constraint_count(s.d);
  for (int r = 0; r < config.num_runs; ++r) {
    if (r >= reduced_dim) {
      out.warnings.push_back("rank " + std::to_string(r) +
                             " exceeds the eigenproblem dimension; skipped");
      break;
    }
    if (r >= 4) {
      out.warnings.push_back("rank " + std::to_string(r) +
                             " selection may not converge");
    }
    RunOptions opts;
    opts.rank = r;
    opts.constrained_iterations = constrained_iterations;
    out.runs.push_back(run(s, config, opts));
  }

  int best = -1;
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const RunReport& r = out.runs[i];
    if (r.converged() &&
        (best < 0 || r.fidelity > out.runs[static_cast<std::size_t>(best)].fidelity)) {
      best = static_cast<int>(i);
    }
  }
  out.converged = best >= 0;
  if (best < 0) {
    // Least unconverged: smallest relative |mu| at the last iteration.
    double score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
      const RunReport& r = out.runs[i];
      if (r.history.empty() || r.solution.u.size() == 0) continue;
      const IterationRecord& last = r.history.back();
      const double rel = std::abs(last.mu) / std::max(1.0, std::abs(last.fidelity));
      if (rel < score) {
        score = rel;
        best = static_cast<int>(i);
      }
    }
  }
  out.selected_run = best;
  if (best >= 0) {
    const RunReport& r = out.runs[static_cast<std::size_t>(best)];
    out.solution = r.solution;
    out.fidelity = r.fidelity;
    out.iterations = r.history;
    out.lambda_final = r.lambda;
  }
  return out;
}

}  // namespace

SolverReport solve(const FidelityTensor& s, const SolverConfig& config) {
  return solve_runs(s, config, std::numeric_limits<int>::max());
}

SolverReport solve_vanilla(const FidelityTensor& s, const SolverConfig& config) {
  return solve_runs(s, config, 0);
}

}  // namespace pulearn
