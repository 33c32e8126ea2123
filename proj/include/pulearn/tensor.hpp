#pragma once

#include <utility>

#include "pulearn/model.hpp"

namespace pulearn {

/// Sample Gram matrices of both spaces and the transforms that orthonormalize
/// them: rx * gx * rx^T = I, rf * gf * rf^T = I.
struct GramPair {
  SymMatrix gx;
  SymMatrix gf;
  Matrix rx;
  Matrix rf;
};

enum class Orthogonalization { inverse_sqrt, gram_schmidt };

/// G = sum_l w_l v_l v_l^T over the rows of `vectors`.
SymMatrix gram_from_sample(const Matrix& vectors, const Vector& weights);

/// Transforms alpha <- rx alpha and beta <- rf beta so both sample Gram
/// matrices become the identity. Throws DegenerateError for
/// information-incomplete data.
std::pair<ObservationSample, GramPair> regularize(
    const ObservationSample& sample,
    Orthogonalization method = Orthogonalization::inverse_sqrt);

/// Gram matrices of the raw sample with identity transforms (unit channel).
GramPair identity_grams(const ObservationSample& sample);

/// S = sum_l w_l (beta_l (x) alpha_l)(beta_l (x) alpha_l)^T.
FidelityTensor build_tensor_pairs(const ObservationSample& sample);

/// Consecutive states (rows of `states`) as (X_l -> X_{l+1}) pairs, D = n.
/// `weights` has one entry per pair.
FidelityTensor build_tensor_timeseries(const Matrix& states,
                                       const Vector& weights);

/// K(y) = 1 / (y^T G^{-1} y).
double christoffel(const Vector& point, const SymMatrix& gram_inverse);

struct LocalizedState {
  Vector coefficients;
};

/// sqrt(K(y)) G^{-1} y, unit norm under the metric G.
LocalizedState localized_state(const Vector& point,
                               const SymMatrix& gram_inverse);

/// Tensor of localized-state pairs for classical x -> f data. The sample
/// must already be expressed in orthonormalized bases, so each record maps
/// x / |x| -> f / |f|.
FidelityTensor build_tensor_localized(const ObservationSample& sample);

/// S[(jk);(j'k')] = O_{jj'} rho0_{kk'}, the kernel of Tr O u rho0 u^T.
FidelityTensor build_tensor_vqa(const SymMatrix& o, const SymMatrix& rho0);

/// F = vec(u)^T S vec(u).
double fidelity(const Matrix& u, const FidelityTensor& s);

/// Probability of outcome f given input x through the channel u.
double evaluate_probability(const Matrix& u, const GramPair& grams,
                            const Vector& x, const Vector& f);

struct MaxProbabilityOutcome {
  Vector f;
  double probability = 0.0;
};

/// Outcome vector maximizing the probability at x, and that probability.
MaxProbabilityOutcome max_probability_outcome(const Matrix& u,
                                              const GramPair& grams,
                                              const Vector& x);

}  // namespace pulearn
