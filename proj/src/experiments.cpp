#include "pulearn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "pulearn/errors.hpp"
#include "pulearn/solver.hpp"

namespace pulearn {

Matrix euler_rotation(double phi, double theta, double psi) {
  auto rz = [](double a) {
    Matrix r(3, 3);
    r << std::cos(a), -std::sin(a), 0.0,
         std::sin(a), std::cos(a), 0.0,
         0.0, 0.0, 1.0;
    return r;
  };
  Matrix rx(3, 3);
  rx << 1.0, 0.0, 0.0,
        0.0, std::cos(theta), -std::sin(theta),
        0.0, std::sin(theta), std::cos(theta);
  return rz(phi) * rx * rz(psi);
}

Matrix random_orthogonal(Index dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("random_orthogonal: dim must be positive");
  Rng rng(seed);
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

Vector random_unit_vector(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
  return v / v.norm();
}

ObservationSample generate_trajectory(const Matrix& u0, const Vector& x0,
                                      int steps, std::uint64_t seed,
                                      bool phase_flips) {
  if (u0.rows() != u0.cols() || u0.cols() != x0.size()) {
    throw InputError("generate_trajectory: need square U matching x0");
  }
  if (steps < 1) throw InputError("generate_trajectory: steps must be >= 1");
  if (std::abs(x0.norm() - 1.0) > 1e-9) {
    throw InputError("generate_trajectory: x0 must be a unit vector");
  }
  const Index n = x0.size();
  Rng rng(seed);
  ObservationSample out;
  out.weights = Vector::Ones(steps);
  out.x.resize(steps, n);
  out.f.resize(steps, n);
  Vector state = x0;
  for (int l = 0; l < steps; ++l) {
    const Vector next = u0 * state;
    const double xi = phase_flips ? rng.sign() : 1.0;
    const double zeta = phase_flips ? rng.sign() : 1.0;
    out.x.row(l) = xi * state.transpose();
    out.f.row(l) = zeta * next.transpose();
    state = next;
  }
  return out;
}

Vector chebyshev_values(double y, Index count) {
  Vector t(count);
  for (Index k = 0; k < count; ++k) {
    if (k == 0) t(k) = 1.0;
    else if (k == 1) t(k) = y;
    else t(k) = 2.0 * y * t(k - 1) - t(k - 2);
  }
  return t;
}

Vector legendre_values(double y, Index count) {
  Vector p(count);
  for (Index k = 0; k < count; ++k) {
    if (k == 0) {
      p(k) = 1.0;
    } else if (k == 1) {
      p(k) = y;
    } else {
      const double kk = static_cast<double>(k);
      p(k) = ((2.0 * kk - 1.0) * y * p(k - 1) - (kk - 1.0) * p(k - 2)) / kk;
    }
  }
  return p;
}

namespace {

double node(int i, int points) {
  return points == 1 ? 0.0 : -1.0 + 2.0 * i / (points - 1);
}

}  // namespace

ObservationSample generate_poly_sample(Index n, Index d, int points,
                                       std::uint64_t seed) {
  if (n < 1 || d < 1 || points < 1) {
    throw InputError("generate_poly_sample: n, d and points must be positive");
  }
  Rng rng(seed);
  ObservationSample out;
  out.weights = Vector::Ones(points);
  out.x.resize(points, n);
  out.f.resize(points, d);
  for (int i = 0; i < points; ++i) {
    const double y = node(i, points);
    const double xi = rng.sign();
    const double zeta = rng.sign();
    out.x.row(i) = xi * chebyshev_values(y, n).transpose();
    out.f.row(i) = zeta * legendre_values(y, d).transpose();
  }
  return out;
}

ObservationSample generate_scalar_sample(int points, std::uint64_t seed) {
  if (points < 1) throw InputError("generate_scalar_sample: need points");
  Rng rng(seed);
  ObservationSample out;
  out.weights = Vector::Ones(points);
  out.x.resize(points, 1);
  out.f.resize(points, 1);
  for (int i = 0; i < points; ++i) {
    const double y = -1.0 + 2.0 * rng.uniform();
    out.x(i, 0) = y;
    out.f(i, 0) = y * y;
  }
  return out;
}

ObservationSample generate_noisy_curve_sample(Index n, Index d, int points,
                                              std::uint64_t seed) {
  if (n < 1 || d < 1 || points < 2) {
    throw InputError("generate_noisy_curve_sample: bad dimensions");
  }
  Rng rng(seed);
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  Vector y(points);
  Vector h(points);
  for (int l = 0; l < points; ++l) {
    y(l) = -1.0 + 2.0 * rng.uniform();
    h(l) = std::sin(3.0 * y(l) + phase) + 0.3 * rng.normal();
  }
  const AffineMap fmap = AffineMap::fit(h);
  ObservationSample out;
  out.weights = Vector::Ones(points);
  out.x.resize(points, n);
  out.f.resize(points, d);
  for (int l = 0; l < points; ++l) {
    const double xi = rng.sign();
    const double zeta = rng.sign();
    out.x.row(l) = xi * chebyshev_values(y(l), n).transpose();
    out.f.row(l) = zeta * chebyshev_values(fmap(h(l)), d).transpose();
  }
  return out;
}

FidelityTensor localized_tensor(const ObservationSample& sample) {
  return build_tensor_localized(
      regularize(sample, Orthogonalization::inverse_sqrt).first);
}

Recovery recover_dynamics(const ObservationSample& sample, Channel channel,
                          const SolverConfig& config) {
  sample.validate();
  Recovery out;
  if (channel == Channel::unit) {
    out.grams = identity_grams(sample);
    out.report = solve(build_tensor_pairs(sample), config);
    out.u = out.report.solution.u;
    return out;
  }
  auto [reg, grams] = regularize(sample, Orthogonalization::inverse_sqrt);
  out.grams = std::move(grams);
  out.report = solve(build_tensor_pairs(reg), config);
  if (out.report.solution.u.size() > 0) {
    // R_f is invertible (checked by regularize).
    out.u = out.grams.rf.partialPivLu().solve(out.report.solution.u) *
            out.grams.rx;
  }
  return out;
}

double channel_fidelity(const ObservationSample& sample, Channel channel,
                        const Matrix& u) {
  if (channel == Channel::unit) return fidelity(u, build_tensor_pairs(sample));
  const auto [reg, grams] = regularize(sample, Orthogonalization::inverse_sqrt);
  const Matrix ut = grams.rf * u * grams.rx.inverse();
  return fidelity(ut, build_tensor_pairs(reg));
}

double max_diff_up_to_sign(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError("max_diff_up_to_sign: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

Recovery recover_poly_mapping(const ObservationSample& sample, Index d,
                              Index n, const SolverConfig& config) {
  Recovery out = recover_dynamics(sample.truncated(n, d), Channel::gram, config);
  out.u = out.u.unaryExpr([](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; });
  return out;
}

std::vector<SweepRow> fidelity_sweep(Index n, int m, std::uint64_t seed,
                                     const SolverConfig& config) {
  if (n < 1 || m < 1) throw InputError("fidelity_sweep: n and m must be positive");
  const Matrix un = random_orthogonal(n, seed);
  Rng rng(seed + 1);
  Matrix psi(m, n);
  for (int l = 0; l < m; ++l) psi.row(l) = random_unit_vector(n, rng).transpose();

  std::vector<SweepRow> rows;
  for (Index d = 1; d <= n; ++d) {
    const Matrix u = un.topRows(d);
    ObservationSample sample;
    sample.weights = Vector::Ones(m);
    sample.x = psi;
    sample.f = psi * u.transpose();
    const FidelityTensor s = build_tensor_pairs(sample);

    SweepRow row;
    row.d = d;
    row.f_orig = fidelity(u, s);
    row.ratio = row.f_orig / m;
    const SolverReport rep = solve(s, config);
    row.converged = rep.converged;
    row.f_max = rep.fidelity;
    row.gain = (row.f_max - row.f_orig) / row.f_orig;
    if (!rep.converged) row.note = "not converged";
    rows.push_back(std::move(row));
  }
  return rows;
}

AffineMap AffineMap::fit(const Vector& values) {
  if (values.size() == 0) throw InputError("AffineMap::fit: no values");
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  if (!(hi > lo)) throw InputError("AffineMap::fit: values have zero range");
  const double margin = 0.01 * (hi - lo);
  lo -= margin;
  hi += margin;
  AffineMap m;
  m.lo = lo;
  m.hi = hi;
  m.scale = 2.0 / (hi - lo);
  m.shift = -(hi + lo) / (hi - lo);
  return m;
}

InterpolationModel::InterpolationModel(const Vector& xs, const Vector& fs,
                                       const Vector& weights, Index n, Index d,
                                       const SolverConfig& config,
                                       std::uint64_t seed, int outcome_grid)
    : n_(n), d_(d) {
  if (xs.size() != fs.size() || xs.size() != weights.size()) {
    throw InputError("InterpolationModel: x, f and weight counts differ");
  }
  if (outcome_grid < 2) throw InputError("InterpolationModel: grid too small");
  xmap_ = AffineMap::fit(xs);
  fmap_ = AffineMap::fit(fs);
  weights_ = weights;
  values_ = fs;

  const Index m = xs.size();
  Rng rng(seed);
  ObservationSample signed_sample;
  signed_sample.weights = weights;
  signed_sample.x.resize(m, n);
  signed_sample.f.resize(m, d);
  Matrix x_raw(m, n);
  for (Index l = 0; l < m; ++l) {
    x_raw.row(l) = chebyshev_values(xmap_(xs(l)), n).transpose();
    const double xi = rng.sign();
    const double zeta = rng.sign();
    signed_sample.x.row(l) = xi * x_raw.row(l);
    signed_sample.f.row(l) =
        zeta * chebyshev_values(fmap_(fs(l)), d).transpose();
  }

  auto [reg, grams] = regularize(signed_sample, Orthogonalization::inverse_sqrt);
  rx_ = grams.rx;
  rf_ = grams.rf;
  x_reg_ = x_raw * rx_.transpose();
  report_ = solve(build_tensor_localized(reg), config);
  u_ = report_.solution.u;
  if (u_.size() == 0) {
    throw Error("InterpolationModel: solver produced no solution");
  }

  grid_.resize(outcome_grid);
  grid_states_.resize(d, outcome_grid);
  for (int i = 0; i < outcome_grid; ++i) {
    const double g =
        fmap_.lo + (fmap_.hi - fmap_.lo) * i / (outcome_grid - 1);
    grid_(i) = g;
    const Vector v = rf_ * chebyshev_values(fmap_(g), d);
    grid_states_.col(i) = v / v.norm();
  }
}

Vector InterpolationModel::x_state(double y) const {
  return rx_ * chebyshev_values(xmap_(y), n_);
}

double InterpolationModel::radon_nikodym(double y) const {
  const Vector proj = x_reg_ * x_state(y);
  const Vector w2 = weights_.cwiseProduct(proj.cwiseAbs2());
  // The denominator equals 1 / K(y) in the orthonormal basis.
  return w2.dot(values_) / w2.sum();
}

double InterpolationModel::least_squares(double y) const {
  const Vector moment = x_reg_.transpose() * weights_.cwiseProduct(values_);
  return x_state(y).dot(moment);
}

std::pair<double, double> InterpolationModel::max_probability(double y) const {
  const Vector xs = x_state(y);
  const Vector a = u_ * xs / xs.norm();
  const Vector amp = grid_states_.transpose() * a;
  Index best = 0;
  amp.cwiseAbs2().maxCoeff(&best);
  return {grid_(best), amp(best) * amp(best)};
}

double InterpolationModel::max_probability_value(double y) const {
  const Vector xs = x_state(y);
  return (u_ * xs).squaredNorm() / xs.squaredNorm();
}

InterpolationPoint InterpolationModel::evaluate(double y) const {
  InterpolationPoint p;
  p.f_rn = radon_nikodym(y);
  p.f_ls = least_squares(y);
  std::tie(p.f_max_p, p.p_at_f) = max_probability(y);
  p.p_max = max_probability_value(y);
  return p;
}

InterpolationModel interpolate_scalar(const Vector& xs, const Vector& fs,
                                      Index n, Index d,
                                      const SolverConfig& config,
                                      std::uint64_t seed) {
  return InterpolationModel(xs, fs, Vector::Ones(xs.size()), n, d, config,
                            seed);
}

}  // namespace pulearn
