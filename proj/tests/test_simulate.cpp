#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "drawrec/errors.hpp"
#include "drawrec/model.hpp"
#include "drawrec/records.hpp"
#include "drawrec/rng.hpp"
#include "drawrec/simulate.hpp"

using drawrec::BetaLaw;
using drawrec::Errc;
using drawrec::Error;
using drawrec::JumpConvention;
using drawrec::JumpEvent;
using drawrec::Matrix;
using drawrec::ModelSpec;
using drawrec::RandomStream;
using drawrec::SamplePath;
using drawrec::Vector;

namespace {

ModelSpec two_state_spec() {
  ModelSpec spec;
  spec.k = 2;
  spec.pi = Vector(2);
  spec.pi << 0.5, 0.5;
  spec.Q = Matrix(2, 2);
  spec.Q << 0.6, 0.4, 0.5, 0.5;
  spec.lambda = Vector(2);
  spec.lambda << 2.0, 1.0;
  spec.jump_laws = {BetaLaw{2.0, 20.0}, BetaLaw{2.0, 30.0}};
  return spec;
}

ModelSpec one_state_spec(double lambda) {
  ModelSpec spec;
  spec.k = 1;
  spec.pi = Vector::Constant(1, 1.0);
  spec.Q = Matrix::Constant(1, 1, 1.0);
  spec.lambda = Vector::Constant(1, lambda);
  spec.jump_laws = {BetaLaw{2.0, 20.0}};
  return spec;
}

Vector uniform_grid(double horizon, double step) {
  const auto n = static_cast<Eigen::Index>(std::floor(horizon / step + 1e-9)) + 1;
  Vector grid(n);
  for (Eigen::Index i = 0; i < n; ++i) grid[i] = step * static_cast<double>(i);
  return grid;
}

}  // namespace

TEST_CASE("a vanishing jump rate gives a constant path") {
  // With rate 1e-12 the first sojourn exceeds any horizon of interest, so
  // the path carries its initial level across the whole window.
  ModelSpec spec = one_state_spec(1e-12);
  RandomStream rng(5);
  const SamplePath path = drawrec::simulate_path(spec, 0.37, std::nullopt, 100.0, rng);
  CHECK(path.jump_count() == 0);
  CHECK(path.value_at(0.0) == doctest::Approx(0.37));
  CHECK(path.value_at(100.0) == doctest::Approx(0.37));
}

TEST_CASE("initial record level is validated") {
  ModelSpec spec = two_state_spec();
  RandomStream rng(1);
  CHECK_THROWS_AS((void)drawrec::simulate_path(spec, 1.0, std::nullopt, 10.0, rng), Error);
  CHECK_THROWS_AS((void)drawrec::simulate_path(spec, -0.2, std::nullopt, 10.0, rng), Error);
  CHECK_THROWS_AS((void)drawrec::simulate_path(spec, 0.0, std::nullopt, 0.0, rng), Error);
  CHECK_THROWS_AS((void)drawrec::simulate_path(spec, 0.0, 5, 10.0, rng), Error);
  CHECK_THROWS_AS((void)drawrec::simulate_path(spec, 0.0, -1, 10.0, rng), Error);
}

TEST_CASE("records are strictly increasing and stay below 1") {
  const ModelSpec spec = two_state_spec();
  for (int p = 0; p < 100; ++p) {
    RandomStream rng(1000 + static_cast<std::uint64_t>(p));
    const SamplePath path = drawrec::simulate_path(spec, 0.1, std::nullopt, 30.0, rng);
    double prev = 0.1;
    double prev_time = 0.0;
    for (std::size_t n = 0; n < path.jump_count(); ++n) {
      CHECK(path.records[n] > prev);
      CHECK(path.records[n] < 1.0);
      CHECK(path.jump_times[n] > prev_time);
      CHECK(path.jump_times[n] <= 30.0);
      CHECK(path.states[n] >= 0);
      CHECK(path.states[n] < 2);
      prev = path.records[n];
      prev_time = path.jump_times[n];
    }
  }
}

TEST_CASE("piecewise-constant evaluation between jumps") {
  SamplePath path;
  path.initial_r = 0.05;
  path.horizon = 10.0;
  path.jump_times = {2.0, 5.0};
  path.states = {0, 1};
  path.records = {0.2, 0.6};
  CHECK(path.value_at(0.0) == doctest::Approx(0.05));
  CHECK(path.value_at(1.999) == doctest::Approx(0.05));
  CHECK(path.value_at(2.0) == doctest::Approx(0.2));
  CHECK(path.value_at(4.9) == doctest::Approx(0.2));
  CHECK(path.value_at(5.0) == doctest::Approx(0.6));
  CHECK(path.value_at(10.0) == doctest::Approx(0.6));
}

TEST_CASE("identical seeds give identical paths") {
  const ModelSpec spec = two_state_spec();
  RandomStream a(77);
  RandomStream b(77);
  const SamplePath pa = drawrec::simulate_path(spec, 0.0, std::nullopt, 50.0, a);
  const SamplePath pb = drawrec::simulate_path(spec, 0.0, std::nullopt, 50.0, b);
  REQUIRE(pa.jump_count() == pb.jump_count());
  for (std::size_t n = 0; n < pa.jump_count(); ++n) {
    CHECK(pa.jump_times[n] == pb.jump_times[n]);
    CHECK(pa.states[n] == pb.states[n]);
    CHECK(pa.records[n] == pb.records[n]);
  }
}

TEST_CASE("coupled draws relate paths with different starting levels") {
  // With the same draw stream, R_t started at r equals r + (1-r) times the
  // path started at zero, jump for jump.
  const ModelSpec spec = two_state_spec();
  for (const double r0 : {0.1, 0.5, 0.9}) {
    CAPTURE(r0);
    RandomStream base_rng(404);
    RandomStream offset_rng(404);
    const SamplePath base = drawrec::simulate_path(spec, 0.0, std::nullopt, 40.0, base_rng);
    const SamplePath shifted = drawrec::simulate_path(spec, r0, std::nullopt, 40.0, offset_rng);
    REQUIRE(base.jump_count() == shifted.jump_count());
    for (std::size_t n = 0; n < base.jump_count(); ++n) {
      CHECK(base.jump_times[n] == shifted.jump_times[n]);
      CHECK(base.states[n] == shifted.states[n]);
      CHECK(std::abs(shifted.records[n] - (r0 + (1.0 - r0) * base.records[n])) < 1e-12);
    }
  }
}

TEST_CASE("jump counts follow the one-state event rate") {
  // k=1: jumps arrive as a Poisson process with rate lambda, so the count
  // over [0,T] averages lambda T. 10^4 paths put the standard error of the
  // mean at sqrt(lambda T / N) = 0.1.
  const ModelSpec spec = one_state_spec(2.0);
  const double horizon = 50.0;
  const int n_paths = 10000;
  const RandomStream base(2468);
  double total = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(p));
    total += static_cast<double>(
        drawrec::simulate_path(spec, 0.0, std::nullopt, horizon, rng).jump_count());
  }
  const double mean_count = total / n_paths;
  CHECK(std::abs(mean_count - 100.0) < 0.3);
}

TEST_CASE("embedded chain transition frequencies match Q") {
  const ModelSpec spec = two_state_spec();
  const RandomStream base(1357);
  Matrix counts = Matrix::Zero(2, 2);
  std::size_t total = 0;
  for (int p = 0; p < 1500; ++p) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(p));
    const SamplePath path = drawrec::simulate_path(spec, 0.0, std::nullopt, 50.0, rng);
    for (std::size_t n = 1; n < path.jump_count(); ++n)
      counts(path.states[n - 1], path.states[n]) += 1.0;
    total += path.jump_count();
  }
  REQUIRE(total > 100000);
  for (int i = 0; i < 2; ++i) {
    const double row = counts.row(i).sum();
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(counts(i, j) / row - spec.Q(i, j)) < 0.01);
    }
  }
}

TEST_CASE("fixed initial state is honored") {
  const ModelSpec spec = two_state_spec();
  RandomStream rng(31);
  const SamplePath path = drawrec::simulate_path(spec, 0.0, 1, 20.0, rng);
  CHECK(path.initial_state == 1);
}

TEST_CASE("the source convention draws jumps from the pre-transition state") {
  // Freeze one state's law to a point-like Beta and make transitions leave
  // it immediately: under the source convention the first jump from state 0
  // must follow state 0's law even though the chain moves to state 1.
  ModelSpec spec;
  spec.k = 2;
  spec.pi = Vector(2);
  spec.pi << 1.0, 0.0;  // always start in state 0
  spec.Q = Matrix(2, 2);
  spec.Q << 0.0, 1.0, 0.0, 1.0;  // state 0 always hands off to state 1
  spec.lambda = Vector(2);
  spec.lambda << 1.0, 1.0;
  // state 0 jumps concentrate near 0.9, state 1 jumps near 0.1
  spec.jump_laws = {BetaLaw{900.0, 100.0}, BetaLaw{100.0, 900.0}};

  RandomStream rng_src(99);
  const SamplePath src =
      drawrec::simulate_path(spec, 0.0, std::nullopt, 100.0, rng_src, JumpConvention::Source);
  REQUIRE(src.jump_count() >= 1);
  CHECK(src.records[0] > 0.8);   // first jump drawn from state 0's law
  CHECK(src.states[0] == 1);     // but the chain still moved to state 1

  RandomStream rng_dst(99);
  const SamplePath dst = drawrec::simulate_path(spec, 0.0, std::nullopt, 100.0, rng_dst,
                                                JumpConvention::Destination);
  REQUIRE(dst.jump_count() >= 1);
  CHECK(dst.records[0] < 0.2);   // destination law is state 1's
}

TEST_CASE("ensemble statistics are deterministic and internally ordered") {
  const ModelSpec spec = two_state_spec();
  const Vector grid = uniform_grid(20.0, 1.0);
  const auto a = drawrec::monte_carlo(spec, 0.0, 20.0, grid, 500, 99);
  const auto b = drawrec::monte_carlo(spec, 0.0, 20.0, grid, 500, 99);
  REQUIRE(a.grid.size() == b.grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(a.mean[i] == b.mean[i]);
    CHECK(a.var[i] == b.var[i]);
    CHECK(a.p05[i] <= a.mean[i] + 1e-12);
    CHECK(a.p95[i] >= a.mean[i] - 1e-12);
    CHECK(a.var[i] >= 0.0);
  }
  CHECK(a.n_paths == 500);
}

TEST_CASE("ensemble validation") {
  const ModelSpec spec = two_state_spec();
  const Vector grid = uniform_grid(10.0, 1.0);
  CHECK_THROWS_AS((void)drawrec::monte_carlo(spec, 0.0, 10.0, grid, 1, 7), Error);
  Vector outside(2);
  outside << 0.0, 11.0;
  CHECK_THROWS_AS((void)drawrec::monte_carlo(spec, 0.0, 10.0, outside, 10, 7), Error);
}

TEST_CASE("long-horizon ensemble variance collapses") {
  const ModelSpec spec = two_state_spec();
  const Vector grid = uniform_grid(50.0, 25.0);
  const auto stats = drawrec::monte_carlo(spec, 0.0, 50.0, grid, 4000, 11);
  CHECK(stats.var[grid.size() - 1] < 0.005);
}

TEST_CASE("recovered events invert the jump construction") {
  const ModelSpec spec = two_state_spec();
  const RandomStream base(8642);
  for (int p = 0; p < 1000; ++p) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(p));
    const SamplePath path = drawrec::simulate_path(spec, 0.2, std::nullopt, 20.0, rng);
    const std::vector<JumpEvent> events = drawrec::path_to_events(path);
    REQUIRE(events.size() == path.jump_count());
    double prev_r = 0.2;
    double prev_t = 0.0;
    for (std::size_t n = 0; n < events.size(); ++n) {
      const JumpEvent& ev = events[n];
      CHECK(ev.time == path.jump_times[n]);
      CHECK(std::abs(ev.inter_arrival - (path.jump_times[n] - prev_t)) < 1e-12);
      CHECK(ev.label == path.states[n] + 1);
      CHECK(ev.rho > 0.0);
      CHECK(ev.rho < 1.0);
      // reconstruction: prev + rho (1 - prev) must reproduce the record
      CHECK(std::abs(prev_r + ev.rho * (1.0 - prev_r) - path.records[n]) < 1e-12);
      prev_r = path.records[n];
      prev_t = path.jump_times[n];
    }
  }
}

TEST_CASE("hand-sized event recovery") {
  SamplePath path;
  path.initial_r = 0.0;
  path.horizon = 5.0;
  path.jump_times = {1.0, 2.0};
  path.states = {0, 1};
  path.records = {0.1, 0.19};
  const auto events = drawrec::path_to_events(path);
  REQUIRE(events.size() == 2);
  CHECK(events[0].rho == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(events[1].rho == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(events[0].inter_arrival == doctest::Approx(1.0));
  CHECK(events[1].inter_arrival == doctest::Approx(1.0));
  CHECK(events[0].label == 1);
  CHECK(events[1].label == 2);
}

TEST_CASE("empty path maps to an empty event list") {
  SamplePath path;
  path.initial_r = 0.4;
  path.horizon = 3.0;
  CHECK(drawrec::path_to_events(path).empty());
}

TEST_CASE("event recovery refuses records too close to 1") {
  SamplePath path;
  path.initial_r = 0.0;
  path.horizon = 10.0;
  path.jump_times = {1.0, 2.0};
  path.states = {0, 0};
  path.records = {1.0 - 1e-13, 1.0 - 1e-14};
  try {
    (void)drawrec::path_to_events(path);
    FAIL("expected a degenerate-record error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateRecord);
  }
}
