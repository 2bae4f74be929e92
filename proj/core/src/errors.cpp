#include "drawrec/errors.hpp"

namespace drawrec {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::NonStochasticRow: return "NonStochasticRow";
    case Errc::BadProbabilityVector: return "BadProbabilityVector";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::BadShape: return "BadShape";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::BadInitial: return "BadInitial";
    case Errc::DegenerateRecord: return "DegenerateRecord";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::EmptyEvents: return "EmptyEvents";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NonPositiveSample: return "NonPositiveSample";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::TooFewEvents: return "TooFewEvents";
    case Errc::ParseError: return "ParseError";
  }
  return "UnknownError";
}

}  // namespace drawrec
