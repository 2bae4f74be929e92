#include "drawrec/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "drawrec/errors.hpp"
#include "drawrec/special.hpp"

namespace drawrec {

namespace {

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

void validate_events(const std::vector<JumpEvent>& events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const JumpEvent& ev = events[i];
    if (!std::isfinite(ev.inter_arrival) || !std::isfinite(ev.rho))
      throw Error(Errc::NonFinite, "event " + std::to_string(i) + " has non-finite fields");
    if (ev.inter_arrival <= 0.0)
      throw Error(Errc::OutOfRange,
                  "event " + std::to_string(i) + " has non-positive inter-arrival");
    if (ev.rho <= 0.0 || ev.rho >= 1.0)
      throw Error(Errc::OutOfRange, "event " + std::to_string(i) + " has rho outside (0,1)");
  }
}

BetaLaw beta_by_moments(double mean, double variance) {
  double common = mean * (1.0 - mean) / variance - 1.0;
  if (!(common > 0.0)) common = 1e-6;
  BetaLaw law;
  law.alpha = std::max(mean * common, 1e-8);
  law.beta = std::max((1.0 - mean) * common, 1e-8);
  return law;
}

// k-means++ seeding and Lloyd iterations on standardized (log s, logit rho)
// features; returns 0-based labels.
std::vector<int> kmeans_labels(const std::vector<double>& xs, const std::vector<double>& ys,
                               int k, RandomStream& rng) {
  const std::size_t n = xs.size();
  std::vector<double> f1(n), f2(n);
  for (std::size_t i = 0; i < n; ++i) {
    f1[i] = std::log(xs[i]);
    f2[i] = std::log(ys[i]) - std::log1p(-ys[i]);
  }
  auto standardize = [n](std::vector<double>& f) {
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (const double v : f) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd == 0.0) sd = 1.0;
    for (double& v : f) v = (v - mean) / sd;
  };
  standardize(f1);
  standardize(f2);

  auto dist2 = [&](std::size_t i, double cx, double cy) {
    const double dx = f1[i] - cx;
    const double dy = f2[i] - cy;
    return dx * dx + dy * dy;
  };

  std::vector<double> cx(static_cast<std::size_t>(k)), cy(static_cast<std::size_t>(k));
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
  if (first >= n) first = n - 1;
  cx[0] = f1[first];
  cy[0] = f2[first];
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dist2(i, cx[static_cast<std::size_t>(c - 1)],
                             cy[static_cast<std::size_t>(c - 1)]);
      if (d < best[i]) best[i] = d;
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += best[i];
        if (target < cum) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = (first + static_cast<std::size_t>(c)) % n;
    }
    cx[static_cast<std::size_t>(c)] = f1[pick];
    cy[static_cast<std::size_t>(c)] = f2[pick];
  }

  std::vector<int> labels(n, 0);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double dmin = dist2(i, cx[0], cy[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(i, cx[static_cast<std::size_t>(c)],
                               cy[static_cast<std::size_t>(c)]);
        if (d < dmin) {
          dmin = d;
          arg = c;
        }
      }
      if (labels[i] != arg) {
        labels[i] = arg;
        changed = true;
      }
    }
    std::vector<double> sx(static_cast<std::size_t>(k), 0.0), sy(static_cast<std::size_t>(k), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      sx[c] += f1[i];
      sy[c] += f2[i];
      ++count[c];
    }
    for (int c = 0; c < k; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      if (count[uc] > 0) {
        cx[uc] = sx[uc] / static_cast<double>(count[uc]);
        cy[uc] = sy[uc] / static_cast<double>(count[uc]);
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        std::size_t far = 0;
        double dmax = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto ci = static_cast<std::size_t>(labels[i]);
          const double d = dist2(i, cx[ci], cy[ci]);
          if (d > dmax) {
            dmax = d;
            far = i;
          }
        }
        cx[uc] = f1[far];
        cy[uc] = f2[far];
        changed = true;
      }
    }
    if (!changed) break;
  }
  return labels;
}

// Contiguous rank split on the inter-arrival coordinate; equals a median
// split for k=2 and guarantees near-equal cluster sizes.
std::vector<int> rank_split_labels(const std::vector<double>& xs, int k) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<int> labels(n, 0);
  for (std::size_t rank = 0; rank < n; ++rank) {
    auto bucket = static_cast<int>((rank * static_cast<std::size_t>(k)) / n);
    if (bucket >= k) bucket = k - 1;
    labels[order[rank]] = bucket;
  }
  return labels;
}

std::vector<std::size_t> cluster_sizes(const std::vector<int>& labels, int k) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (const int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

constexpr std::size_t kMinClusterSize = 5;

}  // namespace

double fit_exponential(const std::vector<double>& samples) {
  if (samples.empty()) throw Error(Errc::EmptySample, "exponential fit needs samples");
  double sum = 0.0;
  for (const double s : samples) {
    if (!std::isfinite(s) || s <= 0.0)
      throw Error(Errc::NonPositiveSample, "exponential samples must be positive");
    sum += s;
  }
  return static_cast<double>(samples.size()) / sum;
}

BetaFit fit_beta(const std::vector<double>& samples) {
  if (samples.empty()) throw Error(Errc::EmptySample, "beta fit needs samples");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const double y : samples) {
    if (!std::isfinite(y) || y <= 0.0 || y >= 1.0)
      throw Error(Errc::OutOfRange, "beta samples must lie strictly inside (0,1)");
    mean += y;
  }
  mean /= n;
  double ss = 0.0;
  for (const double y : samples) ss += (y - mean) * (y - mean);
  if (samples.size() < 2 || ss == 0.0)
    throw Error(Errc::DegenerateSample, "beta fit needs spread in the sample");
  const double variance = ss / (n - 1.0);

  const BetaLaw start = beta_by_moments(mean, variance);
  double a = start.alpha;
  double b = start.beta;

  double s1 = 0.0, s2 = 0.0;
  for (const double y : samples) {
    s1 += std::log(y);
    s2 += std::log1p(-y);
  }
  s1 /= n;
  s2 /= n;

  constexpr int kMaxNewton = 100;
  constexpr double kScoreTol = 1e-8;
  for (int it = 0; it < kMaxNewton; ++it) {
    const double g1 = digamma(a + b) - digamma(a) + s1;
    const double g2 = digamma(a + b) - digamma(b) + s2;
    if (std::max(std::abs(g1), std::abs(g2)) < kScoreTol)
      return BetaFit{BetaLaw{a, b}, true, it};
    const double t = trigamma(a + b);
    const double h11 = t - trigamma(a);
    const double h22 = t - trigamma(b);
    const double det = h11 * h22 - t * t;
    if (det == 0.0 || !std::isfinite(det)) break;
    double da = (-g1 * h22 + g2 * t) / det;
    double db = (g1 * t - g2 * h11) / det;
    double scale = 1.0;
    while (scale > 1e-18 && (a + scale * da <= 0.0 || b + scale * db <= 0.0)) scale *= 0.5;
    a += scale * da;
    b += scale * db;
  }
  return BetaFit{start, false, kMaxNewton};
}

double event_loglik(const JumpEvent& event, double rate, const BetaLaw& law) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw Error(Errc::NonPositiveRate, "event likelihood needs a positive rate");
  if (!(law.alpha > 0.0) || !(law.beta > 0.0))
    throw Error(Errc::BadShape, "event likelihood needs positive Beta shapes");
  if (!std::isfinite(event.inter_arrival) || event.inter_arrival <= 0.0)
    throw Error(Errc::OutOfRange, "event inter-arrival must be positive");
  if (!std::isfinite(event.rho) || event.rho <= 0.0 || event.rho >= 1.0)
    throw Error(Errc::OutOfRange, "event rho must lie strictly inside (0,1)");
  return std::log(rate) - rate * event.inter_arrival + (law.alpha - 1.0) * std::log(event.rho) +
         (law.beta - 1.0) * std::log1p(-event.rho) - log_beta_function(law.alpha, law.beta);
}

std::vector<int> classify(const std::vector<JumpEvent>& events, const ModelSpec& spec) {
  const ModelSpec checked = validate(spec);
  std::vector<int> labels;
  labels.reserve(events.size());
  for (const JumpEvent& ev : events) {
    int arg = 0;
    double best = event_loglik(ev, checked.lambda[0], checked.jump_laws[0]);
    for (int c = 1; c < checked.k; ++c) {
      const double ll = event_loglik(ev, checked.lambda[c],
                                     checked.jump_laws[static_cast<std::size_t>(c)]);
      if (ll > best) {
        best = ll;
        arg = c;
      }
    }
    labels.push_back(arg + 1);
  }
  return labels;
}

TransitionEstimate estimate_Q(const std::vector<int>& labels, int k, double smoothing) {
  if (k < 1) throw Error(Errc::DimensionMismatch, "state count must be >= 1");
  if (smoothing < 0.0) throw Error(Errc::OutOfRange, "smoothing must be >= 0");
  for (const int l : labels) {
    if (l < 1 || l > k)
      throw Error(Errc::OutOfRange, "label " + std::to_string(l) + " outside 1.." +
                                        std::to_string(k));
  }
  TransitionEstimate est;
  est.counts = Matrix::Zero(k, k);
  for (std::size_t i = 1; i < labels.size(); ++i)
    est.counts(labels[i - 1] - 1, labels[i] - 1) += 1.0;
  est.Q.resize(k, k);
  for (int i = 0; i < k; ++i) {
    const double row_total = est.counts.row(i).sum() + smoothing * static_cast<double>(k);
    if (row_total > 0.0) {
      for (int j = 0; j < k; ++j) est.Q(i, j) = (est.counts(i, j) + smoothing) / row_total;
    } else {
      // No observations and no smoothing mass: fall back to a uniform row to
      // keep the matrix stochastic.
      for (int j = 0; j < k; ++j) est.Q(i, j) = 1.0 / static_cast<double>(k);
    }
  }
  return est;
}

FitResult em_fit(const std::vector<JumpEvent>& events, int k, const EmOptions& options) {
  if (k < 1) throw Error(Errc::DimensionMismatch, "state count must be >= 1");
  const std::size_t n = events.size();
  if (n < static_cast<std::size_t>(10 * k))
    throw Error(Errc::TooFewEvents, "need at least " + std::to_string(10 * k) +
                                        " events for k=" + std::to_string(k) + ", got " +
                                        std::to_string(n));
  validate_events(events);

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = events[i].inter_arrival;
    ys[i] = events[i].rho;
  }

  FitResult result;
  result.spec.k = k;

  if (k == 1) {
    const double rate = fit_exponential(xs);
    const BetaFit bf = fit_beta(ys);
    result.spec.pi = Vector::Ones(1);
    result.spec.Q = Matrix::Ones(1, 1);
    result.spec.lambda = Vector::Constant(1, rate);
    result.spec.jump_laws = {bf.law};
    result.labels.assign(n, 1);
    double total = 0.0;
    for (const JumpEvent& ev : events) total += event_loglik(ev, rate, bf.law);
    result.loglik_trace = {total};
    result.converged = true;
    result.iterations = 1;
    result.beta_newton_ok = bf.newton_converged;
    return result;
  }

  // Initial labels (0-based inside the loop).
  std::vector<int> labels;
  if (!options.init_labels.empty()) {
    if (options.init_labels.size() != n)
      throw Error(Errc::DimensionMismatch, "init_labels length does not match event count");
    labels.reserve(n);
    for (const int l : options.init_labels) {
      if (l < 1 || l > k) throw Error(Errc::OutOfRange, "init label outside 1..k");
      labels.push_back(l - 1);
    }
  } else {
    RandomStream rng(options.seed);
    labels = kmeans_labels(xs, ys, k, rng);
  }
  {
    const auto sizes = cluster_sizes(labels, k);
    if (*std::min_element(sizes.begin(), sizes.end()) < kMinClusterSize)
      labels = rank_split_labels(xs, k);
  }

  std::vector<double> rates(static_cast<std::size_t>(k), 1.0);
  std::vector<BetaLaw> laws(static_cast<std::size_t>(k));
  std::vector<bool> fitted(static_cast<std::size_t>(k), false);
  Matrix ll(static_cast<Eigen::Index>(n), k);
  bool have_ll = false;

  double best_loglik = -std::numeric_limits<double>::infinity();
  std::vector<int> best_labels;
  std::vector<double> best_rates;
  std::vector<BetaLaw> best_laws;

  double prev_loglik = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    iterations = iter;

    // Re-seed states that fell under the minimum occupancy with the events
    // the current parameters explain worst.
    auto sizes = cluster_sizes(labels, k);
    if (have_ll) {
      for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] >= kMinClusterSize) continue;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return ll.row(static_cast<Eigen::Index>(a)).maxCoeff() <
                 ll.row(static_cast<Eigen::Index>(b)).maxCoeff();
        });
        bool moved_any = false;
        for (const std::size_t i : order) {
          if (sizes[static_cast<std::size_t>(c)] >= kMinClusterSize) break;
          if (labels[i] == c) continue;
          const auto from = static_cast<std::size_t>(labels[i]);
          if (sizes[from] <= kMinClusterSize) continue;
          labels[i] = c;
          --sizes[from];
          ++sizes[static_cast<std::size_t>(c)];
          moved_any = true;
        }
        if (moved_any) ++result.reseeds;
      }
    }

    // Per-state maximum likelihood fits on the labeled groups.
    for (int c = 0; c < k; ++c) {
      std::vector<double> gx, gy;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == c) {
          gx.push_back(xs[i]);
          gy.push_back(ys[i]);
        }
      }
      const auto uc = static_cast<std::size_t>(c);
      if (gx.empty()) continue;  // keeps previous parameters
      rates[uc] = fit_exponential(gx);
      try {
        const BetaFit bf = fit_beta(gy);
        laws[uc] = bf.law;
        if (!bf.newton_converged) result.beta_newton_ok = false;
      } catch (const Error&) {
        if (!fitted[uc]) {
          const BetaFit global = fit_beta(ys);
          laws[uc] = global.law;
          result.beta_newton_ok = result.beta_newton_ok && global.newton_converged;
        }
        // Otherwise keep the previous law for this state.
      }
      fitted[uc] = true;
    }

    // Likelihood matrix and relabeling by pointwise argmax.
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c)
        ll(static_cast<Eigen::Index>(i), c) =
            event_loglik(events[i], rates[static_cast<std::size_t>(c)],
                         laws[static_cast<std::size_t>(c)]);
    }
    have_ll = true;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double best = ll(static_cast<Eigen::Index>(i), 0);
      for (int c = 1; c < k; ++c) {
        const double v = ll(static_cast<Eigen::Index>(i), c);
        if (v > best) {
          best = v;
          arg = c;
        }
      }
      labels[i] = arg;
      total += best;
    }
    result.loglik_trace.push_back(total);

    if (total > best_loglik) {
      best_loglik = total;
      best_labels = labels;
      best_rates = rates;
      best_laws = laws;
    }
    if (iter >= 2 && std::abs(total - prev_loglik) < options.delta) {
      result.converged = true;
      break;
    }
    prev_loglik = total;
  }

  result.iterations = iterations;

  // Report the best iterate seen.
  result.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.labels[i] = best_labels[i] + 1;
  result.spec.lambda.resize(k);
  result.spec.jump_laws.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    result.spec.lambda[c] = best_rates[static_cast<std::size_t>(c)];
    result.spec.jump_laws[static_cast<std::size_t>(c)] = best_laws[static_cast<std::size_t>(c)];
  }
  result.spec.Q = estimate_Q(result.labels, k, options.smoothing).Q;
  result.spec.pi.resize(k);
  result.spec.pi.setZero();
  for (const int l : result.labels) result.spec.pi[l - 1] += 1.0;
  result.spec.pi /= static_cast<double>(n);
  return result;
}

void relabel_descending_rate(FitResult& fit) {
  const int k = fit.spec.k;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return fit.spec.lambda[a] > fit.spec.lambda[b]; });

  std::vector<int> inverse(static_cast<std::size_t>(k));
  for (int pos = 0; pos < k; ++pos) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = pos;

  ModelSpec permuted = fit.spec;
  for (int i = 0; i < k; ++i) {
    const int src = perm[static_cast<std::size_t>(i)];
    permuted.lambda[i] = fit.spec.lambda[src];
    permuted.pi[i] = fit.spec.pi[src];
    permuted.jump_laws[static_cast<std::size_t>(i)] = fit.spec.jump_laws[static_cast<std::size_t>(src)];
    for (int j = 0; j < k; ++j)
      permuted.Q(i, j) = fit.spec.Q(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  fit.spec = std::move(permuted);
  for (int& label : fit.labels) label = inverse[static_cast<std::size_t>(label - 1)] + 1;
}

}  // namespace drawrec
