#include "drawrec/analytics.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "drawrec/matrix_exp.hpp"

namespace drawrec {

namespace {

void check_initial_record(double r) {
  if (!(r >= 0.0 && r < 1.0))
    throw Error(Errc::BadInitial, "initial record level must lie in [0,1)");
}

void check_grid(const Vector& grid) {
  if (grid.size() < 1) throw Error(Errc::OutOfRange, "time grid is empty");
  if (grid[0] != 0.0) throw Error(Errc::OutOfRange, "time grid must start at 0");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw Error(Errc::OutOfRange, "time grid must be strictly increasing");
  }
}

double infinity_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// Mean curve by RK4 on dm/dt = Lambda Q mu + B m.
Matrix mean_by_rk4(const ModelSpec& spec, const DerivedMatrices& d, double r, const Vector& grid,
                   double step) {
  const Vector forcing = d.Lambda * spec.Q * d.mu;
  const Vector y0 = Vector::Constant(d.B.rows(), r);
  const double h = rk4_substep_for(step, infinity_norm(d.B));
  const Matrix& B = d.B;
  auto field = [&](double, const Vector& y) -> Vector { return forcing + B * y; };
  const auto states = rk4_integrate(field, y0, grid, h);
  Matrix out(d.B.rows(), grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out.col(i) = states[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

double rk4_substep_for(double requested_step, double field_norm) {
  // Fourth-order local error behaves like (norm * h)^5; keeping norm * h at
  // or below 0.025 puts accumulated error near 1e-9 over unit-norm systems.
  if (!(requested_step > 0.0)) throw Error(Errc::OutOfRange, "RK4 step must be > 0");
  if (field_norm <= 0.0) return requested_step;
  const double cap = 0.025 / field_norm;
  return requested_step < cap ? requested_step : cap;
}

MomentCurve mean_curve(const ModelSpec& spec, double r, const Vector& grid, double step) {
  check_initial_record(r);
  check_grid(grid);
  const DerivedMatrices d = derive_matrices(spec);
  const Eigen::Index k = d.B.rows();

  MomentCurve curve;
  curve.grid = grid;
  curve.initial_r = r;
  curve.per_state = mean_by_rk4(spec, d, r, grid, step);

  // Closed form: m(t) = e^{Bt} r 1 + (e^{Bt} - I) B^{-1} Lambda Q mu,
  // available when B is invertible within the conditioning threshold.
  Eigen::JacobiSVD<Matrix> svd(d.B);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  curve.b_rcond = smax > 0.0 ? smin / smax : 0.0;

  if (curve.b_rcond >= kSingularBThreshold) {
    const Vector forcing = d.Lambda * spec.Q * d.mu;
    const Vector binv_forcing = d.B.partialPivLu().solve(forcing);
    const Vector r1 = Vector::Constant(k, r);
    Matrix closed(k, grid.size());
    const Matrix I = Matrix::Identity(k, k);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const Matrix e = matrix_exponential((d.B * grid[i]).eval());
      closed.col(i) = e * r1 + (e - I) * binv_forcing;
    }
    curve.cross_check_error = (closed - curve.per_state).cwiseAbs().maxCoeff();
    curve.per_state = closed;
    curve.closed_form_used = true;
  }

  curve.mixed = curve.per_state.transpose() * spec.pi;
  return curve;
}

MomentCurve second_moment_curve(const ModelSpec& spec, double r, const Vector& grid, double step) {
  check_initial_record(r);
  check_grid(grid);
  const DerivedMatrices d = derive_matrices(spec);
  const Eigen::Index k = d.B.rows();

  // Joint linear system on z = (m, m2):
  //   dm/dt  = Lambda Q mu  + B m
  //   dm2/dt = Lambda Q mu2 + K m + H m2
  const Vector f1 = d.Lambda * spec.Q * d.mu;
  const Vector f2 = d.Lambda * spec.Q * d.mu2;
  Matrix J = Matrix::Zero(2 * k, 2 * k);
  J.topLeftCorner(k, k) = d.B;
  J.bottomLeftCorner(k, k) = d.K;
  J.bottomRightCorner(k, k) = d.H;
  Vector forcing(2 * k);
  forcing << f1, f2;

  Vector z0(2 * k);
  z0.head(k) = Vector::Constant(k, r);
  z0.tail(k) = Vector::Constant(k, r * r);

  const double h = rk4_substep_for(step, infinity_norm(J));
  auto field = [&](double, const Vector& z) -> Vector { return forcing + J * z; };
  const auto states = rk4_integrate(field, z0, grid, h);

  MomentCurve curve;
  curve.grid = grid;
  curve.initial_r = r;
  curve.per_state.resize(k, grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    curve.per_state.col(i) = states[static_cast<std::size_t>(i)].tail(k);
  curve.mixed = curve.per_state.transpose() * spec.pi;
  return curve;
}

VarianceCurve variance_curve(const ModelSpec& spec, double r, const Vector& grid, double step) {
  check_initial_record(r);
  check_grid(grid);
  const DerivedMatrices d = derive_matrices(spec);
  const Eigen::Index k = d.B.rows();

  const Vector f1 = d.Lambda * spec.Q * d.mu;
  const Vector f2 = d.Lambda * spec.Q * d.mu2;
  Matrix J = Matrix::Zero(2 * k, 2 * k);
  J.topLeftCorner(k, k) = d.B;
  J.bottomLeftCorner(k, k) = d.K;
  J.bottomRightCorner(k, k) = d.H;
  Vector forcing(2 * k);
  forcing << f1, f2;

  Vector z0(2 * k);
  z0.head(k) = Vector::Constant(k, r);
  z0.tail(k) = Vector::Constant(k, r * r);

  const double h = rk4_substep_for(step, infinity_norm(J));
  auto field = [&](double, const Vector& z) -> Vector { return forcing + J * z; };
  const auto states = rk4_integrate(field, z0, grid, h);

  VarianceCurve curve;
  curve.grid = grid;
  curve.values.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Vector& z = states[static_cast<std::size_t>(i)];
    const double mean_mixed = spec.pi.dot(z.head(k));
    const double m2_mixed = spec.pi.dot(z.tail(k));
    const double raw = m2_mixed - mean_mixed * mean_mixed;
    curve.values[i] = raw < 0.0 ? 0.0 : raw;
  }

  if (spec.k == 1) {
    Vector bound(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      bound[i] = one_state_variance_bound(spec.lambda[0], d.mu[0], r, grid[i]);
    curve.bound = std::move(bound);
  }
  return curve;
}

double one_state_mean(double lambda, double mu, double r, double t) {
  if (!(lambda > 0.0)) throw Error(Errc::NonPositiveRate, "rate must be > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw Error(Errc::BadInitial, "mean jump must lie in (0,1)");
  if (!(r >= 0.0 && r < 1.0)) throw Error(Errc::BadInitial, "record level must lie in [0,1)");
  if (!(t >= 0.0)) throw Error(Errc::BadInitial, "time must be >= 0");
  return 1.0 - (1.0 - r) * std::exp(-lambda * mu * t);
}

double one_state_second_moment(double lambda, double mu, double mu2, double r, double t) {
  if (!(lambda > 0.0)) throw Error(Errc::NonPositiveRate, "rate must be > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw Error(Errc::BadInitial, "mean jump must lie in (0,1)");
  if (!(mu2 > 0.0 && mu2 < 1.0)) throw Error(Errc::BadInitial, "second moment must lie in (0,1)");
  if (!(r >= 0.0 && r < 1.0)) throw Error(Errc::BadInitial, "record level must lie in [0,1)");
  if (!(t >= 0.0)) throw Error(Errc::BadInitial, "time must be >= 0");
  const double g = 1.0 - r;
  return 1.0 - 2.0 * g * std::exp(-lambda * mu * t) +
         g * g * std::exp(-lambda * (2.0 * mu - mu2) * t);
}

double one_state_variance(double lambda, double mu, double mu2, double r, double t) {
  const double m = one_state_mean(lambda, mu, r, t);
  const double m2 = one_state_second_moment(lambda, mu, mu2, r, t);
  const double v = m2 - m * m;
  return v < 0.0 ? 0.0 : v;
}

double one_state_variance_bound(double lambda, double mu, double r, double t) {
  return 2.0 * (1.0 - r) * std::exp(-lambda * mu * t);
}

}  // namespace drawrec
