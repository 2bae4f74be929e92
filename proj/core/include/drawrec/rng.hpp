#pragma once

#include <cstdint>

namespace drawrec {

// Default seed used whenever a caller does not supply one. Fixed rather
// than entropy-based so repeated runs are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 12345;

// Counter-seeded xoshiro256** stream with the variate generators the
// simulator and estimator need. Each Monte Carlo path gets its own stream via
// substream(), derived by mixing the base seed with the path index, so
// ensembles are reproducible independently of execution order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Independent stream for a worker identified by index (e.g. a path id).
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform();
  // Uniform on (0,1); never returns an endpoint.
  double uniform_pos();

  // Exponential with the given rate, strictly positive.
  double exponential(double rate);
  // Standard normal via polar rejection.
  double normal();
  // Gamma(shape, 1) by the Marsaglia-Tsang method.
  double gamma(double shape);
  // Beta(alpha, beta) from two gamma draws; redraws results that round to
  // 0.0 or 1.0 so callers can rely on the open interval.
  double beta(double alpha, double beta);

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;

  std::uint64_t seed_origin_;  // retained so substreams derive from the seed
};

}  // namespace drawrec
