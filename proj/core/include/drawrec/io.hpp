#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drawrec/analytics.hpp"
#include "drawrec/estimate.hpp"
#include "drawrec/model.hpp"
#include "drawrec/records.hpp"
#include "drawrec/simulate.hpp"

namespace drawrec {

// Decimal text with 17 significant digits, enough for doubles to survive a
// write/read round trip bit-exactly.
std::string format_double(double value);

// Model files are JSON: {"k","pi","Q","lambda","jump_laws":[{"alpha","beta"}]}.
// Loading runs validate() on the result; unknown keys are rejected.
ModelSpec load_model(const std::filesystem::path& file);
void save_model(const std::filesystem::path& file, const ModelSpec& spec);

// Price CSV with header `date,close`. The date column holds either ISO-8601
// dates (converted to day counts) or plain numeric times; either way times
// are shifted so the series starts at 0. Parse failures report the
// offending line number.
PriceSeries load_prices_csv(const std::filesystem::path& file);

// Event CSV: `t,inter_arrival,prev_record,new_record,rho,provisional`.
void save_events_csv(const std::filesystem::path& file, const std::vector<JumpEvent>& events);
std::vector<JumpEvent> load_events_csv(const std::filesystem::path& file);

// Curve CSV: `t,mixed,state_1,...,state_k`.
void save_moment_curve_csv(const std::filesystem::path& file, const MomentCurve& curve);
// Variance CSV: `t,var` plus a `bound` column when the envelope is present.
void save_variance_curve_csv(const std::filesystem::path& file, const VarianceCurve& curve);
// Ensemble CSV: `t,mean,var,p05,p95`.
void save_ensemble_csv(const std::filesystem::path& file, const EnsembleStats& stats);
// Raw path CSV: `path_id,T_n,state,record`, one initial row plus one row per
// jump; path ids and states are 1-based in the file.
void save_paths_csv(const std::filesystem::path& file, const std::vector<SamplePath>& paths);

// Fit files are JSON: {"pi","Q","lambda","jump_laws","labels","loglik_trace",
// "converged","iterations"}; labels are 1-based.
void save_fit_json(const std::filesystem::path& file, const FitResult& fit);

}  // namespace drawrec
