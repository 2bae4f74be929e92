#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drawrec/model.hpp"
#include "drawrec/records.hpp"

namespace fixture {

// Two-state model whose rates differ by three orders of magnitude: a fast
// regime of small drawdown records and a slow regime of rare large ones.
// Used to generate the bundled synthetic price series.
drawrec::ModelSpec sp500_like_spec();

// Labeled record events drawn from sp500_like_spec(): the state chain follows
// Q from pi, and each event's inter-arrival and jump size are both drawn from
// the laws of that event's state. Labels are 1-based.
std::vector<drawrec::JumpEvent> synthetic_events(int n, std::uint64_t seed);

// Embeds events into a price series whose drawdown-record extraction yields
// them back: a recovery row between consecutive events confirms the previous
// record, and each event's row attains its record level exactly at its time.
drawrec::PriceSeries embed_events(const std::vector<drawrec::JumpEvent>& events);

// The bundled fixture as CSV text (header date,close, numeric times,
// 17-significant-digit values). Writing this string to a file reproduces
// data/synthetic_prices.csv byte for byte.
std::string synthetic_prices_csv();

inline constexpr int kFixtureEventCount = 400;
inline constexpr std::uint64_t kFixtureSeed = 777;

}  // namespace fixture
