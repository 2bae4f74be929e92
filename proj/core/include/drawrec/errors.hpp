#pragma once

#include <stdexcept>
#include <string>

namespace drawrec {

// Failure conditions surfaced by the library. The CLI maps these to process
// exit codes; library users can switch on code() instead of parsing messages.
enum class Errc {
  NonStochasticRow,     // a transition-matrix row is not a probability vector
  BadProbabilityVector, // initial law fails sum/range checks
  NonPositiveRate,      // jump rate <= 0
  BadShape,             // Beta shape parameter <= 0
  DimensionMismatch,    // field sizes inconsistent with the state count
  NonFinite,            // NaN or Inf encountered in numeric input or state
  BadInitial,           // initial record level or state out of domain
  DegenerateRecord,     // record level within 1e-12 of 1, jumps undefined
  EmptySeries,          // price series has no rows
  EmptyEvents,          // event list is empty where at least one is required
  EmptySample,          // parameter fit called on an empty sample
  NonPositiveSample,    // exponential fit sample contains a value <= 0
  OutOfRange,           // sample value outside the distribution support
  DegenerateSample,     // sample has zero variance where spread is required
  TooFewEvents,         // event count below the estimator floor
  ParseError,           // malformed CSV/JSON input
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace drawrec
