#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pulearn/errors.hpp"
#include "pulearn/linalg.hpp"
#include "test_support.hpp"

using namespace pulearn;
using testing::max_abs;

TEST_CASE("symmetric eigendecomposition of a 2x2") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const EigenDecomposition e = sym_eig(SymMatrix(a));
  CHECK(e.values(0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-15));
  const double h = std::sqrt(0.5);
  CHECK(e.vectors(0, 0) == doctest::Approx(h));
  CHECK(e.vectors(1, 0) == doctest::Approx(h));
  // first nonzero component positive
  CHECK(e.vectors(0, 1) == doctest::Approx(h));
  CHECK(e.vectors(1, 1) == doctest::Approx(-h));
}

TEST_CASE("eigenvalues are roots of the characteristic polynomial") {
  const SymMatrix a(testing::gaussian(5, 5, 3));
  const SymMatrix b = testing::random_spd(5, 4);
  const EigenDecomposition e = gen_eig(a, b);
  const double scale = std::abs(testing::cofactor_det(b.matrix()));
  for (Index i = 0; i < 5; ++i) {
    const Matrix pencil = a.matrix() - e.values(i) * b.matrix();
    CHECK(std::abs(testing::cofactor_det(pencil)) / scale < 1e-9);
    if (i > 0) CHECK(e.values(i - 1) >= e.values(i));
  }
  // B-orthonormal, and A v = mu B v
  const Matrix& v = e.vectors;
  CHECK(max_abs(v.transpose() * b.matrix() * v - Matrix::Identity(5, 5)) < 1e-12);
  CHECK(max_abs(a.matrix() * v - b.matrix() * v * e.values.asDiagonal()) < 1e-11);
}

TEST_CASE("generalized problem with diagonal matrices") {
  const EigenDecomposition e =
      gen_eig(SymMatrix::diagonal(Vector(Eigen::Vector2d(2, 6))),
              SymMatrix::diagonal(Vector(Eigen::Vector2d(1, 2))));
  CHECK(e.values(0) == doctest::Approx(3.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
}

TEST_CASE("generalized problem rejects an indefinite metric") {
  Matrix b(2, 2);
  b << 1, 0, 0, -1;
  CHECK_THROWS_AS(gen_eig(SymMatrix::identity(2), SymMatrix(b)), DegenerateError);
  CHECK_THROWS_AS(gen_eig(SymMatrix::identity(2), SymMatrix::zero(2)), DegenerateError);
}

TEST_CASE("inverse square root") {
  const SymMatrix g = SymMatrix::diagonal(Vector(Eigen::Vector2d(4, 9)));
  const Matrix r = inv_sqrt_psd(g).matrix();
  CHECK(r(0, 0) == doctest::Approx(0.5));
  CHECK(r(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(r(0, 1) == 0.0);

  const SymMatrix h = testing::random_spd(6, 11);
  const Matrix rh = inv_sqrt_psd(h).matrix();
  CHECK(max_abs(rh * h.matrix() * rh - Matrix::Identity(6, 6)) < 1e-12);
  CHECK(max_abs(inv_psd(h).matrix() * h.matrix() - Matrix::Identity(6, 6)) < 1e-12);

  Matrix singular(2, 2);
  singular << 1, 1, 1, 1;
  CHECK_THROWS_AS(inv_sqrt_psd(SymMatrix(singular)), DegenerateError);
}

TEST_CASE("constraint elimination") {
  Matrix c(1, 3);
  c << 1, 1, 0;
  const EliminationBasis m = eliminate_constraints(c, 3);
  CHECK(m.rank_removed == 1);
  CHECK(m.cols() == 2);
  CHECK(max_abs(c * m.basis) < 1e-15);
  // columns span a 2-dimensional space
  CHECK(Eigen::FullPivLU<Matrix>(m.basis).rank() == 2);

  const EliminationBasis none = eliminate_constraints(Matrix(0, 4), 4);
  CHECK(none.cols() == 4);
  CHECK(none.rank_removed == 0);

  Matrix dup(2, 3);
  dup << 1, 2, 3, 2, 4, 6;
  CHECK(eliminate_constraints(dup, 3).rank_removed == 1);

  const Matrix wide = testing::gaussian(4, 9, 2);
  const EliminationBasis w = eliminate_constraints(wide, 9);
  CHECK(w.cols() == 5);
  CHECK(max_abs(wide * w.basis) < 1e-12);
}

TEST_CASE("symmetrization is exact") {
  const Matrix a = testing::gaussian(4, 4, 9);
  const SymMatrix s(a);
  CHECK(s.matrix() == s.matrix().transpose());
  CHECK_FALSE(all_finite(Matrix::Constant(1, 1, std::nan(""))));
}
