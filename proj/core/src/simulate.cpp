#include "drawrec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drawrec/errors.hpp"

namespace drawrec {

namespace {

int sample_index(const Vector& weights, double u) {
  double cumulative = 0.0;
  const Eigen::Index n = weights.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += weights[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);
}

}  // namespace

double SamplePath::value_at(double t) const {
  // Index of the last jump at or before t.
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return initial_r;
  const auto idx = static_cast<std::size_t>(it - jump_times.begin()) - 1;
  return records[idx];
}

SamplePath simulate_path(const ModelSpec& spec, double r0, std::optional<int> nu0, double horizon,
                         RandomStream& rng, JumpConvention convention) {
  if (!(r0 >= 0.0 && r0 < 1.0))
    throw Error(Errc::BadInitial, "initial record level must lie in [0,1)");
  if (!(horizon > 0.0)) throw Error(Errc::BadInitial, "horizon must be > 0");
  if (nu0 && (*nu0 < 0 || *nu0 >= spec.k))
    throw Error(Errc::BadInitial, "initial state " + std::to_string(*nu0) + " outside 0.." +
                                      std::to_string(spec.k - 1));

  SamplePath path;
  path.initial_r = r0;
  path.horizon = horizon;
  path.initial_state = nu0 ? *nu0 : sample_index(spec.pi, rng.uniform());

  int state = path.initial_state;
  double t = 0.0;
  double r = r0;
  for (;;) {
    const double sojourn = rng.exponential(spec.lambda[state]);
    t += sojourn;
    if (t > horizon) break;
    const int next = sample_index(spec.Q.row(state), rng.uniform());
    const auto jump_state = static_cast<std::size_t>(
        convention == JumpConvention::Destination ? next : state);
    const BetaLaw& law = spec.jump_laws[jump_state];
    const double rho = rng.beta(law.alpha, law.beta);
    r += rho * (1.0 - r);
    path.jump_times.push_back(t);
    path.states.push_back(next);
    path.records.push_back(r);
    state = next;
  }
  return path;
}

EnsembleStats monte_carlo(const ModelSpec& spec, double r0, double horizon, const Vector& grid,
                          int n_paths, std::uint64_t seed, JumpConvention convention) {
  if (n_paths < 2) throw Error(Errc::OutOfRange, "ensemble needs at least 2 paths");
  if (grid.size() < 1) throw Error(Errc::OutOfRange, "evaluation grid is empty");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > horizon)
      throw Error(Errc::OutOfRange, "grid point outside [0, horizon]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(Errc::OutOfRange, "grid must be strictly increasing");
  }

  const auto n_grid = static_cast<std::size_t>(grid.size());
  Matrix values(n_paths, grid.size());

  const RandomStream base(seed);
  for (int p = 0; p < n_paths; ++p) {
    RandomStream stream = base.substream(static_cast<std::uint64_t>(p));
    const SamplePath path = simulate_path(spec, r0, std::nullopt, horizon, stream, convention);
    for (std::size_t g = 0; g < n_grid; ++g)
      values(p, static_cast<Eigen::Index>(g)) = path.value_at(grid[static_cast<Eigen::Index>(g)]);
  }

  EnsembleStats stats;
  stats.grid = grid;
  stats.n_paths = n_paths;
  stats.seed = seed;
  stats.mean.resize(grid.size());
  stats.var.resize(grid.size());
  stats.p05.resize(grid.size());
  stats.p95.resize(grid.size());

  const auto n = static_cast<double>(n_paths);
  // Nearest-rank percentile: smallest order statistic with rank >= p * N.
  const auto rank05 = static_cast<Eigen::Index>(std::ceil(0.05 * n)) - 1;
  const auto rank95 = static_cast<Eigen::Index>(std::ceil(0.95 * n)) - 1;

  std::vector<double> column(static_cast<std::size_t>(n_paths));
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double mean = values.col(g).mean();
    stats.mean[g] = mean;
    stats.var[g] = (values.col(g).array() - mean).square().sum() / (n - 1.0);
    for (int p = 0; p < n_paths; ++p) column[static_cast<std::size_t>(p)] = values(p, g);
    std::nth_element(column.begin(), column.begin() + rank05, column.end());
    stats.p05[g] = column[static_cast<std::size_t>(rank05)];
    std::nth_element(column.begin(), column.begin() + rank95, column.end());
    stats.p95[g] = column[static_cast<std::size_t>(rank95)];
  }
  return stats;
}

std::vector<JumpEvent> path_to_events(const SamplePath& path) {
  std::vector<JumpEvent> events;
  events.reserve(path.jump_times.size());
  double prev_record = path.initial_r;
  double prev_time = 0.0;
  for (std::size_t n = 0; n < path.jump_times.size(); ++n) {
    const double headroom = 1.0 - prev_record;
    if (headroom < 1e-12)
      throw Error(Errc::DegenerateRecord, "record level within 1e-12 of 1 at jump " +
                                              std::to_string(n));
    JumpEvent ev;
    ev.time = path.jump_times[n];
    ev.inter_arrival = path.jump_times[n] - prev_time;
    ev.prev_record = prev_record;
    ev.new_record = path.records[n];
    ev.rho = (path.records[n] - prev_record) / headroom;
    ev.label = path.states[n] + 1;
    events.push_back(ev);
    prev_record = path.records[n];
    prev_time = path.jump_times[n];
  }
  return events;
}

}  // namespace drawrec
