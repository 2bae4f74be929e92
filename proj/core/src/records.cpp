#include "drawrec/records.hpp"

#include <cmath>
#include <string>

#include "drawrec/errors.hpp"

namespace drawrec {

namespace {

void validate_series(const PriceSeries& series) {
  if (series.times.empty() || series.prices.empty())
    throw Error(Errc::EmptySeries, "price series has no rows");
  if (series.times.size() != series.prices.size())
    throw Error(Errc::DimensionMismatch, "times and prices differ in length");
  if (series.times.front() < 0.0)
    throw Error(Errc::OutOfRange, "series must not start at negative time");
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (!std::isfinite(series.times[i]) || !std::isfinite(series.prices[i]))
      throw Error(Errc::NonFinite, "non-finite entry at row " + std::to_string(i));
    if (series.prices[i] <= 0.0)
      throw Error(Errc::DegenerateRecord,
                  "price must be strictly positive, got " + std::to_string(series.prices[i]) +
                      " at row " + std::to_string(i));
    if (i > 0 && !(series.times[i] > series.times[i - 1]))
      throw Error(Errc::OutOfRange, "times must be strictly increasing at row " + std::to_string(i));
  }
}

}  // namespace

std::vector<double> drawdown_series(const PriceSeries& series) {
  validate_series(series);
  std::vector<double> out;
  out.reserve(series.prices.size());
  double running_max = series.prices.front();
  for (const double price : series.prices) {
    if (price > running_max) running_max = price;
    out.push_back((running_max - price) / running_max);
  }
  return out;
}

std::vector<JumpEvent> extract_records(const PriceSeries& series) {
  const std::vector<double> drawdowns = drawdown_series(series);

  std::vector<JumpEvent> events;
  double prev_record = 0.0;
  double last_event_time = 0.0;  // records are timed from t = 0
  bool excursion_open = false;
  double peak = 0.0;
  double peak_time = 0.0;

  auto emit = [&](bool provisional) {
    JumpEvent ev;
    ev.time = peak_time;
    ev.inter_arrival = peak_time - last_event_time;
    ev.prev_record = prev_record;
    ev.new_record = peak;
    ev.rho = (peak - prev_record) / (1.0 - prev_record);
    ev.provisional = provisional;
    events.push_back(ev);
    prev_record = peak;
    last_event_time = peak_time;
    excursion_open = false;
  };

  for (std::size_t i = 0; i < drawdowns.size(); ++i) {
    const double d = drawdowns[i];
    if (excursion_open) {
      if (d > peak) {
        peak = d;
        peak_time = series.times[i];
      } else if (d < peak) {
        // Recovery began, so the excursion's deepest point is final.
        emit(false);
      }
    }
    if (!excursion_open && d > prev_record) {
      excursion_open = true;
      peak = d;
      peak_time = series.times[i];
    }
  }
  if (excursion_open) emit(true);
  return events;
}

std::pair<std::vector<double>, std::vector<double>> events_to_observations(
    const std::vector<JumpEvent>& events) {
  if (events.empty()) throw Error(Errc::EmptyEvents, "no events to convert");
  std::vector<double> x, y;
  x.reserve(events.size());
  y.reserve(events.size());
  for (const JumpEvent& ev : events) {
    x.push_back(ev.inter_arrival);
    y.push_back(ev.rho);
  }
  return {std::move(x), std::move(y)};
}

}  // namespace drawrec
