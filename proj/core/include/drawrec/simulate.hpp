#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drawrec/model.hpp"
#include "drawrec/records.hpp"
#include "drawrec/rng.hpp"

namespace drawrec {

// Which state's Beta law supplies the jump size. Destination matches the
// process construction (and the moment equations, whose integrals are taken
// against the law of the state being entered); Source reproduces the
// published simulation recipe that draws the jump before transitioning.
enum class JumpConvention { Destination, Source };

// One realized trajectory. The record process is piecewise constant: it
// holds its value between jumps, so evaluation at time t returns the record
// set by the last jump at or before t (or the initial level).
struct SamplePath {
  std::vector<double> jump_times;  // T_1 < T_2 < ... <= horizon
  std::vector<int> states;         // embedded state entered at each jump
  std::vector<double> records;     // record level right after each jump
  double initial_r = 0.0;
  int initial_state = 0;
  double horizon = 0.0;

  double value_at(double t) const;
  std::size_t jump_count() const { return jump_times.size(); }
};

// Monte Carlo summary on an evaluation grid.
struct EnsembleStats {
  Vector grid;
  Vector mean;
  Vector var;
  Vector p05;
  Vector p95;
  int n_paths = 0;
  std::uint64_t seed = 0;
};

// Simulates the record process to the horizon. If nu0 is empty the initial
// state is drawn from pi. Sojourn lengths are exponential at the current
// state's rate; the next state follows that state's row of Q; the record
// jumps by rho (1 - r) with rho drawn per the convention.
SamplePath simulate_path(const ModelSpec& spec, double r0, std::optional<int> nu0, double horizon,
                         RandomStream& rng,
                         JumpConvention convention = JumpConvention::Destination);

// Runs n_paths independent simulations (one RNG substream per path index)
// and reduces them to per-grid mean, variance, and nearest-rank percentile
// bands. Deterministic in (seed, n_paths, grid) regardless of schedule.
EnsembleStats monte_carlo(const ModelSpec& spec, double r0, double horizon, const Vector& grid,
                          int n_paths, std::uint64_t seed,
                          JumpConvention convention = JumpConvention::Destination);

// Recovers the per-jump observations (S_n, rho_n) from a path, labeling each
// event with the embedded state entered at that jump.
std::vector<JumpEvent> path_to_events(const SamplePath& path);

}  // namespace drawrec
