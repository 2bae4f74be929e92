#include "drawrec/matrix_exp.hpp"

#include <cmath>

#include "drawrec/errors.hpp"

namespace drawrec {

namespace {

// Evaluates the (m,m) diagonal Pade approximant split into U (odd) and
// V (even) parts, so that exp(A) ~ (V - U)^{-1} (V + U).
void pade_3(const Matrix& a, const Matrix& a2, Matrix& u, Matrix& v) {
  const Matrix I = Matrix::Identity(a.rows(), a.cols());
  u = a * (a2 + 60.0 * I);
  v = 12.0 * a2 + 120.0 * I;
}

void pade_5(const Matrix& a, const Matrix& a2, const Matrix& a4, Matrix& u, Matrix& v) {
  const Matrix I = Matrix::Identity(a.rows(), a.cols());
  u = a * (a4 + 420.0 * a2 + 15120.0 * I);
  v = 30.0 * a4 + 3360.0 * a2 + 30240.0 * I;
}

void pade_7(const Matrix& a, const Matrix& a2, const Matrix& a4, const Matrix& a6, Matrix& u,
            Matrix& v) {
  const Matrix I = Matrix::Identity(a.rows(), a.cols());
  u = a * (a6 + 1512.0 * a4 + 277200.0 * a2 + 8648640.0 * I);
  v = 56.0 * a6 + 25200.0 * a4 + 1995840.0 * a2 + 17297280.0 * I;
}

void pade_9(const Matrix& a, const Matrix& a2, const Matrix& a4, const Matrix& a6, Matrix& u,
            Matrix& v) {
  const Matrix I = Matrix::Identity(a.rows(), a.cols());
  const Matrix a8 = a4 * a4;
  u = a * (a8 + 3960.0 * a6 + 2162160.0 * a4 + 302702400.0 * a2 + 8821612800.0 * I);
  v = 90.0 * a8 + 110880.0 * a6 + 30270240.0 * a4 + 2075673600.0 * a2 + 17643225600.0 * I;
}

void pade_13(const Matrix& a, const Matrix& a2, const Matrix& a4, const Matrix& a6, Matrix& u,
             Matrix& v) {
  const Matrix I = Matrix::Identity(a.rows(), a.cols());
  u = a * (a6 * (a6 + 16380.0 * a4 + 40840800.0 * a2) +
           (33522128640.0 * a6 + 10559470521600.0 * a4 + 1187353796428800.0 * a2 +
            32382376266240000.0 * I));
  v = a6 * (182.0 * a6 + 960960.0 * a4 + 1323241920.0 * a2) +
      (670442572800.0 * a6 + 129060195264000.0 * a4 + 7771770303897600.0 * a2 +
       64764752532480000.0 * I);
}

}  // namespace

Matrix matrix_exponential(const Matrix& m) {
  if (!m.allFinite()) throw Error(Errc::NonFinite, "matrix exponential of non-finite input");
  const Eigen::Index n = m.rows();
  if (n == 0) return Matrix(0, 0);
  if (n == 1) {
    Matrix r(1, 1);
    r(0, 0) = std::exp(m(0, 0));
    return r;
  }

  // 1-norm thresholds from the order-13 scaling and squaring analysis.
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  Matrix u, v;
  int squarings = 0;

  if (norm <= 1.495585217958292e-2) {
    const Matrix a2 = m * m;
    pade_3(m, a2, u, v);
  } else if (norm <= 2.539398330063230e-1) {
    const Matrix a2 = m * m;
    const Matrix a4 = a2 * a2;
    pade_5(m, a2, a4, u, v);
  } else if (norm <= 9.504178996162932e-1) {
    const Matrix a2 = m * m;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    pade_7(m, a2, a4, a6, u, v);
  } else if (norm <= 2.097847961257068e0) {
    const Matrix a2 = m * m;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    pade_9(m, a2, a4, a6, u, v);
  } else {
    const double theta13 = 5.371920351148152e0;
    if (norm > theta13) {
      squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    }
    const Matrix scaled = m / std::ldexp(1.0, squarings);
    const Matrix a2 = scaled * scaled;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    pade_13(scaled, a2, a4, a6, u, v);
  }

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace drawrec
