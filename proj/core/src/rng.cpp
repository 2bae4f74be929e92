#include "drawrec/rng.hpp"

#include <cmath>

#include "drawrec/errors.hpp"

namespace drawrec {

namespace {

// SplitMix64: expands a 64-bit seed into well-mixed state words.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_origin_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  // Mix the index into the seed through an odd multiplier so consecutive
  // indices land in unrelated SplitMix64 trajectories.
  std::uint64_t derived = seed_origin_ ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  return RandomStream(derived);
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double RandomStream::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(Errc::NonPositiveRate, "exponential rate must be > 0");
  double draw;
  do {
    draw = -std::log(uniform_pos()) / rate;
  } while (draw == 0.0);
  return draw;
}

double RandomStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_normal_ = true;
  return u * factor;
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw Error(Errc::BadShape, "gamma shape must be > 0");
  if (shape < 1.0) {
    // Boost a draw with shape+1 down by a uniform power.
    const double boost = std::pow(uniform_pos(), 1.0 / shape);
    return gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(Errc::BadShape, "beta shapes must be > 0");
  for (;;) {
    const double x = gamma(alpha);
    const double y = gamma(beta);
    const double draw = x / (x + y);
    if (draw > 0.0 && draw < 1.0) return draw;
  }
}

}  // namespace drawrec
