#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "drawrec/errors.hpp"
#include "drawrec/matrix_exp.hpp"
#include "drawrec/model.hpp"
#include "drawrec/rng.hpp"

using drawrec::Matrix;
using drawrec::matrix_exponential;

namespace {

// Straight truncated power series. Adequate as an oracle for small norms;
// callers scale down and square back up when the norm is large.
Matrix series_exp(const Matrix& m, int terms = 60) {
  Matrix sum = Matrix::Identity(m.rows(), m.cols());
  Matrix power = Matrix::Identity(m.rows(), m.cols());
  for (int n = 1; n <= terms; ++n) {
    power = (power * m / static_cast<double>(n)).eval();
    sum += power;
  }
  return sum;
}

Matrix series_exp_scaled(const Matrix& m, int squarings) {
  Matrix result = series_exp(m / std::pow(2.0, squarings));
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

Matrix random_matrix(drawrec::RandomStream& rng, int n, double lo, double hi) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  return m;
}

}  // namespace

TEST_CASE("exponential of the zero matrix is the identity") {
  const Matrix z = Matrix::Zero(3, 3);
  CHECK((matrix_exponential(z) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diagonal matrices exponentiate entrywise") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = -1.0;
  d(1, 1) = 0.5;
  d(2, 2) = 3.0;
  const Matrix e = matrix_exponential(d);
  CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(e(2, 2) == doctest::Approx(std::exp(3.0)).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) < 1e-15);
  CHECK(std::abs(e(2, 0)) < 1e-15);
}

TEST_CASE("1x1 matrices reduce to scalar exp") {
  const Matrix m = Matrix::Constant(1, 1, -2.5);
  CHECK(matrix_exponential(m)(0, 0) == doctest::Approx(std::exp(-2.5)).epsilon(1e-15));
}

TEST_CASE("nilpotent block") {
  Matrix n = Matrix::Zero(2, 2);
  n(0, 1) = 1.0;
  const Matrix e = matrix_exponential(n);
  CHECK(e(0, 0) == doctest::Approx(1.0));
  CHECK(e(0, 1) == doctest::Approx(1.0));
  CHECK(e(1, 0) == doctest::Approx(0.0));
  CHECK(e(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("random 2x2 matrices match the truncated series") {
  drawrec::RandomStream rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = random_matrix(rng, 2, -2.0, 2.0);
    const Matrix expected = series_exp(m);
    CHECK((matrix_exponential(m) - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("larger norms exercise the squaring path") {
  drawrec::RandomStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = random_matrix(rng, 4, -1.0, 1.0);
    m *= 8.0 / std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
    const Matrix expected = series_exp_scaled(m, 6);
    const double scale = expected.cwiseAbs().maxCoeff();
    CHECK((matrix_exponential(m) - expected).cwiseAbs().maxCoeff() / scale < 1e-12);
  }
}

TEST_CASE("exp(M) exp(-M) recovers the identity") {
  drawrec::RandomStream rng(10);
  const Matrix m = random_matrix(rng, 3, -1.5, 1.5);
  const Matrix prod = matrix_exponential(m) * matrix_exponential((-m).eval());
  CHECK((prod - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("semigroup property in the time argument") {
  drawrec::RandomStream rng(11);
  const Matrix m = random_matrix(rng, 3, -1.0, 1.0);
  const Matrix whole = matrix_exponential((m * 1.7).eval());
  const Matrix split =
      matrix_exponential((m * 0.9).eval()) * matrix_exponential((m * 0.8).eval());
  CHECK((whole - split).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-finite input is rejected") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS((void)matrix_exponential(m), drawrec::Error);
}

TEST_CASE("zero-size matrix passes through") {
  const Matrix empty(0, 0);
  CHECK(matrix_exponential(empty).size() == 0);
}
