#include "drawrec/model.hpp"

#include <cmath>
#include <string>

#include "drawrec/errors.hpp"

namespace drawrec {

namespace {

constexpr double kProbabilityTol = 1e-12;

void check_probability_vector(const Vector& v, Errc code, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0 || v[i] > 1.0 + kProbabilityTol)
      throw Error(code, what + " entry " + std::to_string(i) + " outside [0,1]");
  }
  const double sum = v.sum();
  if (std::abs(sum - 1.0) > kProbabilityTol)
    throw Error(code, what + " sums to " + std::to_string(sum) + ", expected 1");
}

}  // namespace

ModelSpec validate(const ModelSpec& raw) {
  if (raw.k < 1)
    throw Error(Errc::DimensionMismatch, "state count must be >= 1, got " + std::to_string(raw.k));
  const auto k = static_cast<Eigen::Index>(raw.k);
  if (raw.pi.size() != k)
    throw Error(Errc::DimensionMismatch, "pi has length " + std::to_string(raw.pi.size()) +
                                             ", expected " + std::to_string(raw.k));
  if (raw.Q.rows() != k || raw.Q.cols() != k)
    throw Error(Errc::DimensionMismatch, "Q is " + std::to_string(raw.Q.rows()) + "x" +
                                             std::to_string(raw.Q.cols()) + ", expected " +
                                             std::to_string(raw.k) + "x" + std::to_string(raw.k));
  if (raw.lambda.size() != k)
    throw Error(Errc::DimensionMismatch, "lambda has length " + std::to_string(raw.lambda.size()) +
                                             ", expected " + std::to_string(raw.k));
  if (static_cast<Eigen::Index>(raw.jump_laws.size()) != k)
    throw Error(Errc::DimensionMismatch,
                "jump_laws has length " + std::to_string(raw.jump_laws.size()) + ", expected " +
                    std::to_string(raw.k));

  // Non-finite entries get their own code before the structural checks run;
  // otherwise a NaN would surface as a misleading row-sum or sign complaint.
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!std::isfinite(raw.pi[i]))
      throw Error(Errc::NonFinite, "pi[" + std::to_string(i) + "] is not finite");
    if (!std::isfinite(raw.lambda[i]))
      throw Error(Errc::NonFinite, "lambda[" + std::to_string(i) + "] is not finite");
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!std::isfinite(raw.Q(i, j)))
        throw Error(Errc::NonFinite, "Q(" + std::to_string(i) + "," + std::to_string(j) +
                                         ") is not finite");
    }
    const BetaLaw& law = raw.jump_laws[static_cast<std::size_t>(i)];
    if (!std::isfinite(law.alpha) || !std::isfinite(law.beta))
      throw Error(Errc::NonFinite, "jump law " + std::to_string(i) + " has a non-finite shape");
  }

  check_probability_vector(raw.pi, Errc::BadProbabilityVector, "pi");
  for (Eigen::Index i = 0; i < k; ++i) {
    const Vector row = raw.Q.row(i);
    check_probability_vector(row, Errc::NonStochasticRow, "Q row " + std::to_string(i));
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!std::isfinite(raw.lambda[i]) || raw.lambda[i] <= 0.0)
      throw Error(Errc::NonPositiveRate,
                  "lambda[" + std::to_string(i) + "] = " + std::to_string(raw.lambda[i]));
  }
  for (std::size_t i = 0; i < raw.jump_laws.size(); ++i) {
    const BetaLaw& law = raw.jump_laws[i];
    if (!std::isfinite(law.alpha) || law.alpha <= 0.0 || !std::isfinite(law.beta) ||
        law.beta <= 0.0)
      throw Error(Errc::BadShape, "jump law " + std::to_string(i) + " has shapes (" +
                                      std::to_string(law.alpha) + ", " + std::to_string(law.beta) +
                                      ")");
  }
  return raw;
}

DerivedMatrices derive_matrices(const ModelSpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.k);
  DerivedMatrices d;
  d.mu.resize(k);
  d.mu2.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    d.mu[i] = spec.jump_laws[static_cast<std::size_t>(i)].mean();
    d.mu2[i] = spec.jump_laws[static_cast<std::size_t>(i)].second_moment();
  }
  d.Lambda = spec.lambda.asDiagonal();
  d.M = d.mu.asDiagonal();
  d.M2 = d.mu2.asDiagonal();

  const Matrix LQ = d.Lambda * spec.Q;
  const Matrix I = Matrix::Identity(k, k);
  d.A = LQ - d.Lambda;
  d.B = LQ * (I - d.M) - d.Lambda;
  d.K = 2.0 * LQ * (d.M - d.M2);
  d.H = LQ * (I - 2.0 * d.M + d.M2) - d.Lambda;
  return d;
}

}  // namespace drawrec
