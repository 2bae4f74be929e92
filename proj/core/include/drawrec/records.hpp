#pragma once

#include <utility>
#include <vector>

namespace drawrec {

// Observed price history. Times are in days (fractions allowed) and must be
// strictly increasing; prices must be strictly positive.
struct PriceSeries {
  std::vector<double> times;
  std::vector<double> prices;
};

// One drawdown-record event: at `time` the running drawdown exceeded every
// level seen before, deepening the record from prev_record to new_record.
// rho is the jump size normalized by the remaining headroom, so the record
// sequence reconstructs as r_i = r_{i-1} + rho_i (1 - r_{i-1}).
struct JumpEvent {
  double time = 0.0;
  double inter_arrival = 0.0;
  double prev_record = 0.0;
  double new_record = 0.0;
  double rho = 0.0;
  int label = -1;            // optional state tag, -1 when unassigned
  bool provisional = false;  // excursion still open at the end of the series
};

// Relative drawdown D_t = (M_t - P_t) / M_t with M_t the running maximum.
// Single pass; every value lies in [0,1).
std::vector<double> drawdown_series(const PriceSeries& series);

// Extracts record events: whenever the drawdown exceeds the previous record,
// an excursion opens; it deepens until the drawdown first drops below the
// excursion's running maximum, at which point one event is emitted for the
// deepest point, timestamped at its first attainment. An excursion still
// open when the series ends yields a final event marked provisional.
// A series whose drawdown never exceeds zero yields an empty list.
std::vector<JumpEvent> extract_records(const PriceSeries& series);

// Splits events into the estimator's observation vectors: inter-arrival
// times x and normalized jump sizes y.
std::pair<std::vector<double>, std::vector<double>> events_to_observations(
    const std::vector<JumpEvent>& events);

}  // namespace drawrec
