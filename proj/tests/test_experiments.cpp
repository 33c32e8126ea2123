#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "pulearn/experiments.hpp"
#include "pulearn/errors.hpp"
#include "test_support.hpp"

using namespace pulearn;
using testing::max_abs;

namespace {

// Legendre-in-Chebyshev coefficients from an exactly determined
// interpolation at Chebyshev nodes.
Matrix legendre_in_chebyshev(Index count) {
  Matrix t(count, count);
  Matrix p(count, count);
  for (Index i = 0; i < count; ++i) {
    const double y = std::cos(std::numbers::pi * (i + 0.5) / count);
    for (Index k = 0; k < count; ++k) t(i, k) = std::cos(k * std::acos(y));
    // closed forms
    const double ps[] = {1.0, y, (3 * y * y - 1) / 2,
                         (5 * y * y * y - 3 * y) / 2,
                         (35 * std::pow(y, 4) - 30 * y * y + 3) / 8};
    for (Index j = 0; j < count; ++j) p(i, j) = ps[j];
  }
  return t.fullPivLu().solve(p).transpose();
}

}  // namespace

TEST_CASE("Euler rotation") {
  CHECK(max_abs(euler_rotation(0, 0, 0) - Matrix::Identity(3, 3)) == 0.0);
  const Matrix g = euler_rotation(0.1, 0.4, 0.7);
  CHECK(max_abs(g * g.transpose() - Matrix::Identity(3, 3)) < 1e-15);
  CHECK(g.determinant() == doctest::Approx(1.0));
  const Matrix rz = euler_rotation(0.3, 0, 0);
  CHECK(rz(0, 0) == doctest::Approx(std::cos(0.3)));
  CHECK(rz(1, 0) == doctest::Approx(std::sin(0.3)));
  CHECK(rz(2, 2) == 1.0);
}

TEST_CASE("random orthogonal matrices are deterministic") {
  const Matrix a = random_orthogonal(7, 3);
  CHECK(max_abs(a * a.transpose() - Matrix::Identity(7, 7)) < 1e-14);
  CHECK(random_orthogonal(7, 3) == a);
  CHECK(random_orthogonal(7, 4) != a);
}

TEST_CASE("trajectory records") {
  const ObservationSample s =
      generate_trajectory(Matrix::Identity(3, 3), Vector::Unit(3, 0), 3, 1, true);
  CHECK(s.size() == 3);
  for (Index l = 0; l < 3; ++l) {
    CHECK(std::abs(s.x(l, 0)) == 1.0);
    CHECK(std::abs(s.f(l, 0)) == 1.0);
    CHECK(s.x.row(l).tail(2).isZero(0.0));
  }
  const Matrix g = euler_rotation(0.1, 0.4, 0.7);
  const Vector x0 = Eigen::Vector3d(0.6, 0.8, 0.0);
  const ObservationSample t = generate_trajectory(g, x0, 5, 1, false);
  for (Index l = 0; l < 5; ++l)
    CHECK(max_abs(t.f.row(l).transpose() - g * t.x.row(l).transpose()) < 1e-15);
  for (Index l = 0; l + 1 < 5; ++l) CHECK(t.x.row(l + 1) == t.f.row(l));
  CHECK_THROWS_AS(generate_trajectory(g, Eigen::Vector3d(1, 1, 0), 5, 1, false),
                  InputError);
}

TEST_CASE("orthogonal polynomial values") {
  for (double y : {-0.9, -0.3, 0.0, 0.5, 1.0}) {
    const Vector t = chebyshev_values(y, 6);
    for (Index k = 0; k < 6; ++k)
      CHECK(t(k) == doctest::Approx(std::cos(k * std::acos(y))).epsilon(1e-13));
    const Vector p = legendre_values(y, 4);
    CHECK(p(2) == doctest::Approx((3 * y * y - 1) / 2));
    CHECK(p(3) == doctest::Approx((5 * y * y * y - 3 * y) / 2));
  }
}

TEST_CASE("Chebyshev to Legendre mapping is recovered") {
  const Matrix oracle = legendre_in_chebyshev(5);
  const ObservationSample s = generate_poly_sample(11, 6, 500, 1);
  CHECK(s.size() == 500);
  SolverConfig cfg;
  const Recovery r5 = recover_poly_mapping(s, 5, 5, cfg);
  REQUIRE(r5.report.converged);
  CHECK(max_diff_up_to_sign(r5.u, oracle) < 1e-10);
  for (Index j = 0; j < 5; ++j)
    for (Index k = 0; k < 5; ++k)
      if (std::abs(oracle(j, k)) < 1e-12) CHECK(r5.u(j, k) == 0.0);

  const Recovery r4 = recover_poly_mapping(s, 4, 4, cfg);
  REQUIRE(r4.report.converged);
  CHECK(max_diff_up_to_sign(r4.u, oracle.topLeftCorner(4, 4)) < 1e-10);
}

TEST_CASE("sign-invariant difference") {
  const Matrix a = testing::gaussian(3, 4, 1);
  CHECK(max_diff_up_to_sign(a, -a) == 0.0);
  CHECK(max_diff_up_to_sign(a, a) == 0.0);
  CHECK(max_diff_up_to_sign(a, a + Matrix::Constant(3, 4, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("recovered map in the raw basis scores the solver fidelity") {
  const Matrix u0 = random_orthogonal(5, 2);
  Rng rng(3);
  const Vector x0 = random_unit_vector(5, rng);
  const ObservationSample s = generate_trajectory(u0, x0, 200, 2, true);
  SolverConfig cfg;
  cfg.num_runs = 1;
  for (Channel ch : {Channel::gram, Channel::unit}) {
    const Recovery r = recover_dynamics(s, ch, cfg);
    REQUIRE(r.report.converged);
    CHECK(max_diff_up_to_sign(r.u, u0) < 1e-12);
    CHECK(channel_fidelity(s, ch, r.u) ==
          doctest::Approx(r.report.fidelity).epsilon(1e-12));
  }
}

TEST_CASE("sweep rows") {
  SolverConfig cfg;
  const std::vector<SweepRow> rows = fidelity_sweep(3, 200, 1, cfg);
  REQUIRE(rows.size() == 3);
  for (const SweepRow& r : rows) {
    CHECK(r.converged);
    CHECK(r.f_max >= r.f_orig * (1 - 1e-12));
  }
  CHECK(rows.back().ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(rows.back().gain) <= 1e-8);
}

TEST_CASE("affine map") {
  const AffineMap m = AffineMap::fit(Eigen::Vector3d(2, 4, 3));
  CHECK(m(2.0) > -1.0);
  CHECK(m(4.0) < 1.0);
  CHECK(m(3.0) == doctest::Approx(0.0));
  CHECK(m(m.lo) == doctest::Approx(-1.0));
  CHECK(m(m.hi) == doctest::Approx(1.0));
}

TEST_CASE("interpolation evaluators") {
  const ObservationSample s = generate_scalar_sample(500, 5);
  const InterpolationModel model(s.x.col(0), s.f.col(0), s.weights, 6, 6,
                                 SolverConfig{}, 1);
  REQUIRE(model.report().converged);
  const double fmin = s.f.minCoeff(), fmax = s.f.maxCoeff();
  for (int i = 0; i <= 40; ++i) {
    const double y = -0.99 + 1.98 * i / 40;
    const InterpolationPoint p = model.evaluate(y);
    CHECK(p.f_rn >= fmin - 1e-12);
    CHECK(p.f_rn <= fmax + 1e-12);
    // x^2 lies in the span of T_0..T_5, so least squares is exact
    CHECK(p.f_ls == doctest::Approx(y * y).epsilon(1e-8));
    CHECK(p.p_max <= 1.0 + 1e-12);
    CHECK(p.p_at_f <= p.p_max + 1e-12);
  }
}
