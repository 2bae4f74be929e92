#pragma once

#include <Eigen/Dense>
#include <vector>

namespace drawrec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Jump-size law on (0,1). First two moments have closed forms used by the
// moment equations, so they are never obtained by quadrature.
struct BetaLaw {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / (alpha + beta); }
  double second_moment() const {
    return alpha * (alpha + 1.0) / ((alpha + beta) * (alpha + beta + 1.0));
  }
};

// Parameters of the record process: an embedded Markov chain on k states with
// transition matrix Q and initial law pi, a per-state jump rate lambda, and a
// per-state Beta law for the normalized jump size.
struct ModelSpec {
  int k = 0;
  Vector pi;
  Matrix Q;
  Vector lambda;
  std::vector<BetaLaw> jump_laws;
};

// Matrices driving the moment differential equations, precomputed once per
// model. With Lambda = diag(lambda), M = diag(mean jump), M2 = diag(second
// moment):
//   A = Lambda Q - Lambda            (generator of the state chain)
//   B = Lambda Q (I - M) - Lambda    (mean dynamics)
//   K = 2 Lambda Q (M - M2)          (mean-to-second-moment coupling)
//   H = Lambda Q (I - 2M + M2) - Lambda  (second-moment dynamics)
struct DerivedMatrices {
  Matrix Lambda;
  Matrix M;
  Matrix M2;
  Matrix A;
  Matrix B;
  Matrix H;
  Matrix K;
  Vector mu;
  Vector mu2;
};

// Checks all domain constraints (probability rows within 1e-12, positive
// rates, positive shapes, consistent dimensions) and returns the validated
// spec. Throws Error on any violation.
ModelSpec validate(const ModelSpec& raw);

DerivedMatrices derive_matrices(const ModelSpec& spec);

}  // namespace drawrec
