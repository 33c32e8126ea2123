#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulearn/model.hpp"
#include "pulearn/rng.hpp"
#include "pulearn/tensor.hpp"

namespace pulearn {

// ---- generators -----------------------------------------------------------

/// Rz(phi) * Rx(theta) * Rz(psi).
Matrix euler_rotation(double phi, double theta, double psi);

/// Q from the QR factorization of a seeded Gaussian matrix, with the
/// diagonal of R made positive.
Matrix random_orthogonal(Index dim, std::uint64_t seed);

/// Gaussian vector normalized to unit length.
Vector random_unit_vector(Index dim, Rng& rng);

/// Records (alpha, beta) = (+-X_l, +-X_{l+1}) with X_{l+1} = U X_l and unit
/// weights; the signs are independent and seeded when `phase_flips`.
ObservationSample generate_trajectory(const Matrix& u0, const Vector& x0,
                                      int steps, std::uint64_t seed,
                                      bool phase_flips);

/// T_0(y) .. T_{count-1}(y).
Vector chebyshev_values(double y, Index count);
/// P_0(y) .. P_{count-1}(y).
Vector legendre_values(double y, Index count);

/// x = +-Chebyshev values, f = +-Legendre values at `points` equidistant
/// nodes of [-1, 1] (endpoints included).
ObservationSample generate_poly_sample(Index n, Index d, int points,
                                       std::uint64_t seed);

/// `points` seeded uniform x in [-1, 1] with f = x^2 (one column each side).
ObservationSample generate_scalar_sample(int points, std::uint64_t seed);

/// Noisy curve h = sin(3y + phase) + 0.3 e with y uniform on [-1, 1] and e
/// standard normal. x = +-T_k(y), f = +-T_j of h mapped onto [-1, 1].
ObservationSample generate_noisy_curve_sample(Index n, Index d, int points,
                                              std::uint64_t seed);

/// Orthonormalize both sides and build the localized-state tensor.
FidelityTensor localized_tensor(const ObservationSample& sample);

// ---- drivers --------------------------------------------------------------

struct Recovery {
  Matrix u;  // in the caller's (raw) basis
  SolverReport report;
  GramPair grams;
};

/// Gram channel: regularize, solve, map back as R_f^{-1} u R_x.
/// Unit channel: solve on the raw data.
Recovery recover_dynamics(const ObservationSample& sample, Channel channel,
                          const SolverConfig& config);

/// Fidelity of a raw-basis u under the given channel (the Gram channel
/// scores R_f u R_x^{-1} against the orthonormalized sample).
double channel_fidelity(const ObservationSample& sample, Channel channel,
                        const Matrix& u);

/// max |a - sigma b| minimized over sigma in {+1, -1}.
double max_diff_up_to_sign(const Matrix& a, const Matrix& b);

/// Gram-channel recovery on the first n x-columns and d f-columns; entries
/// below 1e-12 in magnitude are set to 0.
Recovery recover_poly_mapping(const ObservationSample& sample, Index d,
                              Index n, const SolverConfig& config);

struct SweepRow {
  Index d = 0;
  double f_orig = 0.0;
  double f_max = 0.0;
  double ratio = 0.0;  // F_orig / M
  double gain = 0.0;   // (F_max - F_orig) / F_orig
  bool converged = false;
  std::string note;
};

/// For D = 1..n: truncate a seeded orthogonal U_n to D rows, map M seeded
/// unit vectors through it (no renormalization) and compare the generating
/// fidelity with the solver's maximum.
std::vector<SweepRow> fidelity_sweep(Index n, int m, std::uint64_t seed,
                                     const SolverConfig& config);

/// Affine map bringing [lo, hi] widened by a 1% margin onto [-1, 1].
struct AffineMap {
  double scale = 1.0;
  double shift = 0.0;
  double lo = -1.0;
  double hi = 1.0;

  static AffineMap fit(const Vector& values);
  double operator()(double v) const { return scale * v + shift; }
};

struct InterpolationPoint {
  double f_rn = 0.0;
  double f_ls = 0.0;
  double f_max_p = 0.0;  // grid argmax of the outcome probability
  double p_at_f = 0.0;   // probability of f_max_p
  double p_max = 0.0;    // unconstrained maximum over outcome vectors
};

/// Scalar f(x) learned as a channel between Chebyshev-encoded localized
/// states.
class InterpolationModel {
 public:
  InterpolationModel(const Vector& xs, const Vector& fs, const Vector& weights,
                     Index n, Index d, const SolverConfig& config,
                     std::uint64_t seed, int outcome_grid = 2001);

  double radon_nikodym(double y) const;
  double least_squares(double y) const;
  /// (argmax f over the outcome grid, its probability).
  std::pair<double, double> max_probability(double y) const;
  double max_probability_value(double y) const;
  InterpolationPoint evaluate(double y) const;

  const SolverReport& report() const { return report_; }
  const Matrix& channel() const { return u_; }
  /// Spacing of the outcome grid used by max_probability.
  double outcome_spacing() const { return grid_(1) - grid_(0); }

 private:
  Vector x_state(double y) const;  // orthonormalized x-basis vector at y

  Index n_;
  Index d_;
  AffineMap xmap_;
  AffineMap fmap_;
  Matrix rx_;
  Matrix rf_;
  Vector weights_;
  Vector values_;
  Matrix x_reg_;  // unsigned orthonormalized x vectors, one row per record
  Matrix u_;
  SolverReport report_;
  Vector grid_;
  Matrix grid_states_;  // unit f-space vectors at the outcome grid, by column
};

InterpolationModel interpolate_scalar(const Vector& xs, const Vector& fs,
                                      Index n, Index d,
                                      const SolverConfig& config,
                                      std::uint64_t seed);

}  // namespace pulearn
