#include "fixture.hpp"

#include <sstream>

#include "drawrec/io.hpp"
#include "drawrec/rng.hpp"

namespace fixture {

using drawrec::JumpEvent;
using drawrec::ModelSpec;
using drawrec::PriceSeries;
using drawrec::RandomStream;

ModelSpec sp500_like_spec() {
  ModelSpec spec;
  spec.k = 2;
  spec.pi = drawrec::Vector(2);
  spec.pi << 0.5, 0.5;
  spec.Q = drawrec::Matrix(2, 2);
  spec.Q << 0.883, 0.117, 0.750, 0.250;
  spec.lambda = drawrec::Vector(2);
  spec.lambda << 0.47, 5.4e-4;
  spec.jump_laws = {drawrec::BetaLaw{1.83, 145.90}, drawrec::BetaLaw{0.77, 47.86}};
  return drawrec::validate(spec);
}

std::vector<JumpEvent> synthetic_events(int n, std::uint64_t seed) {
  const ModelSpec spec = sp500_like_spec();
  RandomStream rng(seed);

  const auto sample = [&rng](const drawrec::Vector& weights) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
      acc += weights[j];
      if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size() - 1);
  };

  std::vector<JumpEvent> events;
  events.reserve(static_cast<std::size_t>(n));
  int state = sample(spec.pi);
  double t = 0.0;
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = rng.exponential(spec.lambda[state]);
    const drawrec::BetaLaw& law = spec.jump_laws[static_cast<std::size_t>(state)];
    const double rho = rng.beta(law.alpha, law.beta);
    t += s;
    const double r_new = r + rho * (1.0 - r);
    JumpEvent ev;
    ev.time = t;
    ev.inter_arrival = s;
    ev.prev_record = r;
    ev.new_record = r_new;
    ev.rho = rho;
    ev.label = state + 1;
    events.push_back(ev);
    r = r_new;
    state = sample(spec.Q.row(state));
  }
  return events;
}

PriceSeries embed_events(const std::vector<JumpEvent>& events) {
  // All prices stay at or below the initial peak of 100, so the running
  // maximum is constant and drawdown equals 1 - price/100. Between events the
  // price recovers to half the standing record, confirming it; at each event
  // time the price drops so the drawdown attains the new record exactly.
  constexpr double peak = 100.0;
  PriceSeries series;
  series.times.push_back(0.0);
  series.prices.push_back(peak);
  double prev_time = 0.0;
  for (const JumpEvent& ev : events) {
    series.times.push_back(0.5 * (prev_time + ev.time));
    series.prices.push_back(peak * (1.0 - 0.5 * ev.prev_record));
    series.times.push_back(ev.time);
    series.prices.push_back(peak * (1.0 - ev.new_record));
    prev_time = ev.time;
  }
  if (!events.empty()) {
    series.times.push_back(prev_time + 1.0);
    series.prices.push_back(peak * (1.0 - 0.5 * events.back().new_record));
  }
  return series;
}

std::string synthetic_prices_csv() {
  const PriceSeries series = embed_events(synthetic_events(kFixtureEventCount, kFixtureSeed));
  std::ostringstream out;
  out << "date,close\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out << drawrec::format_double(series.times[i]) << ','
        << drawrec::format_double(series.prices[i]) << '\n';
  }
  return out.str();
}

}  // namespace fixture
