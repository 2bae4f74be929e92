#pragma once

#include <cstdint>
#include <vector>

#include "drawrec/model.hpp"
#include "drawrec/records.hpp"
#include "drawrec/rng.hpp"

namespace drawrec {

// Result of the Beta maximum-likelihood fit. newton_converged is false when
// the score iteration did not reach tolerance and the method-of-moments
// estimate was returned instead.
struct BetaFit {
  BetaLaw law;
  bool newton_converged = false;
  int iterations = 0;
};

// Transition matrix estimated from a label sequence, together with the raw
// transition counts it was built from.
struct TransitionEstimate {
  Matrix Q;
  Matrix counts;
};

struct EmOptions {
  double delta = 1e-6;     // stop when the total log-likelihood moves less
  int max_iter = 200;
  double smoothing = 0.5;  // Laplace smoothing for transition counts
  std::uint64_t seed = kDefaultSeed;
  // Optional starting labels (1-based, one per event). When set, clustering
  // initialization is skipped entirely.
  std::vector<int> init_labels;
};

struct FitResult {
  ModelSpec spec;
  std::vector<int> labels;  // per-event state assignments, values in 1..k
  std::vector<double> loglik_trace;
  bool converged = false;
  int iterations = 0;
  int reseeds = 0;            // times a collapsed state was re-seeded
  bool beta_newton_ok = true; // false if any Beta fit fell back to moments
};

// Maximum-likelihood exponential rate n / sum(samples).
double fit_exponential(const std::vector<double>& samples);

// Maximum-likelihood Beta shapes by Newton iteration on the score, started
// from method of moments, with step halving to stay in the positive
// quadrant. Requires at least two distinct samples strictly inside (0,1).
BetaFit fit_beta(const std::vector<double>& samples);

// Log-likelihood of one event under one state's parameters: exponential
// density of the inter-arrival time plus the log Beta density of the jump.
double event_loglik(const JumpEvent& event, double rate, const BetaLaw& law);

// Assigns each event the most likely state (1..k) under the model's per-state
// rate and jump law; ties go to the lowest state index.
std::vector<int> classify(const std::vector<JumpEvent>& events, const ModelSpec& spec);

// Row-stochastic transition matrix from consecutive label pairs with Laplace
// smoothing, so states that never occur still get a valid (uniform) row.
// Labels are 1-based.
TransitionEstimate estimate_Q(const std::vector<int>& labels, int k, double smoothing = 0.5);

// Alternates per-state maximum likelihood fits with likelihood relabeling
// until the total log-likelihood stabilizes, then reports the best iterate.
// Initial labels come from k-means++ on standardized (log s, logit rho),
// falling back to a rank split on s when clustering leaves a state with
// fewer than 5 events. Requires at least 10k events.
FitResult em_fit(const std::vector<JumpEvent>& events, int k, const EmOptions& options = {});

// Renumbers states so rates are descending (state 1 fastest), permuting all
// fields consistently. Useful for comparing fits across runs.
void relabel_descending_rate(FitResult& fit);

}  // namespace drawrec
