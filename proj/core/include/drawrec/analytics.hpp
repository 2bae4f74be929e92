#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "drawrec/errors.hpp"
#include "drawrec/model.hpp"

namespace drawrec {

// Default outer step for the fixed-step RK4 integrator. Curve evaluation
// refines it internally (see rk4_substep_for) so that linear-system error
// stays well under the 1e-8 cross-check budget regardless of field norm.
inline constexpr double kDefaultRk4Step = 0.01;

// Reciprocal condition number below which the mean-dynamics matrix B is
// treated as singular and the closed-form evaluation is skipped.
inline constexpr double kSingularBThreshold = 1e-12;

// Conditional moments of the record process on a time grid. per_state row j
// holds m(t, r, state j); mixed is the pi-weighted combination.
struct MomentCurve {
  Vector grid;
  Matrix per_state;  // k x n
  Vector mixed;      // n
  double initial_r = 0.0;
  // True when the matrix-exponential evaluation was available (B well
  // conditioned) and used for the stored values; false means RK4 only.
  bool closed_form_used = false;
  // Sup-norm disagreement between the closed form and RK4, when both ran.
  double cross_check_error = 0.0;
  double b_rcond = 0.0;
};

struct VarianceCurve {
  Vector grid;
  Vector values;
  // One-state exponential envelope 2(1-r)e^{-lambda mu t}; only set for k=1.
  std::optional<Vector> bound;
};

// Classic 4-stage Runge-Kutta over a strictly increasing grid. Each grid
// interval is covered by equal substeps no longer than max_step, so grid
// points are hit exactly and no interpolation happens. Returns the state at
// every grid point, including the initial one. Throws Error(NonFinite) if
// the state stops being finite.
template <typename Field>
std::vector<Vector> rk4_integrate(Field&& f, const Vector& y0, const Vector& grid,
                                  double max_step) {
  if (!(max_step > 0.0)) throw Error(Errc::OutOfRange, "RK4 step must be > 0");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw Error(Errc::OutOfRange, "RK4 grid must be strictly increasing");
  }
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  Vector y = y0;
  out.push_back(y);
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const double t0 = grid[i - 1];
    const double span = grid[i] - t0;
    const auto substeps =
        static_cast<long>(std::ceil(span / max_step - 1e-9));
    const long n = substeps < 1 ? 1 : substeps;
    const double h = span / static_cast<double>(n);
    for (long s = 0; s < n; ++s) {
      const double t = t0 + h * static_cast<double>(s);
      const Vector k1 = h * f(t, y);
      const Vector k2 = h * f(t + 0.5 * h, (y + 0.5 * k1).eval());
      const Vector k3 = h * f(t + 0.5 * h, (y + 0.5 * k2).eval());
      const Vector k4 = h * f(t + h, (y + k3).eval());
      y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    if (!y.allFinite()) throw Error(Errc::NonFinite, "RK4 state diverged");
    out.push_back(y);
  }
  return out;
}

// Substep that keeps the local truncation error of RK4 on a linear field
// with the given infinity norm far below 1e-8 over unit time.
double rk4_substep_for(double requested_step, double field_norm);

// Conditional mean curves m(t, r, state). Evaluated in closed form through
// the matrix exponential whenever B is invertible within threshold, and by
// RK4 in all cases; both must agree, and the disagreement is recorded.
MomentCurve mean_curve(const ModelSpec& spec, double r, const Vector& grid,
                       double step = kDefaultRk4Step);

// Conditional second-moment curves, integrated jointly with the mean system.
MomentCurve second_moment_curve(const ModelSpec& spec, double r, const Vector& grid,
                                double step = kDefaultRk4Step);

// Mixed variance Var(R_t) = m2_mixed - mean_mixed^2, clamped at zero.
VarianceCurve variance_curve(const ModelSpec& spec, double r, const Vector& grid,
                             double step = kDefaultRk4Step);

// Single-state reductions. With one state the mean solves
// dm/dt = lambda mu (1 - m), giving an explicit exponential relaxation, and
// the second moment admits a matching two-exponential form.
double one_state_mean(double lambda, double mu, double r, double t);
double one_state_second_moment(double lambda, double mu, double mu2, double r, double t);
double one_state_variance(double lambda, double mu, double mu2, double r, double t);
double one_state_variance_bound(double lambda, double mu, double r, double t);

}  // namespace drawrec
