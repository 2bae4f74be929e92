// drawrec: command-line front end for the drawdown record toolkit.
//
// Subcommands cover the full workflow: extract record events from a price
// series, fit the jump model to events, simulate ensembles from a model, and
// evaluate analytic moment curves. `pipeline` chains the first three.
//
// Exit codes: 0 success, 2 input/parse error, 3 domain error,
// 4 estimator did not converge (output still written), 5 numerical
// cross-check failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drawrec/analytics.hpp"
#include "drawrec/errors.hpp"
#include "drawrec/estimate.hpp"
#include "drawrec/io.hpp"
#include "drawrec/model.hpp"
#include "drawrec/records.hpp"
#include "drawrec/rng.hpp"
#include "drawrec/simulate.hpp"

namespace fs = std::filesystem;

using drawrec::Errc;
using drawrec::Error;

namespace {

// Config files are flat JSON objects whose keys are long option names:
//   {"seed": 7, "r0": 0.25, "paths-count": 10000}
// Command-line flags take precedence over config values. CLI11 only consults
// config files attached to the root command, so each subcommand takes a
// --config path and we inject the values ourselves after parsing: an option
// the user already gave on the command line is left untouched, anything else
// is fed through the option's own converter and validators.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, path + ": cannot open config file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, path + ": config is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, path + ": config must be a JSON object");
  for (const auto& entry : doc.items()) {
    CLI::Option* opt =
        entry.key() == "config" ? nullptr : sub->get_option_no_throw("--" + entry.key());
    if (opt == nullptr)
      throw Error(Errc::ParseError, path + ": unknown config key \"" + entry.key() + "\" for " +
                                        sub->get_name());
    if (opt->count() > 0) continue;
    const auto& value = entry.value();
    std::string text;
    if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number()) {
      text = value.dump();
    } else {
      throw Error(Errc::ParseError,
                  path + ": config key \"" + entry.key() + "\" must hold a scalar");
    }
    opt->add_result(text);
    opt->run_callback();
  }
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ParseError:
      return 2;
    case Errc::NonFinite:
      return 5;
    default:
      return 3;
  }
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

drawrec::Vector make_grid(double horizon, double step) {
  if (!(horizon > 0.0)) throw Error(Errc::OutOfRange, "horizon must be > 0");
  if (!(step > 0.0) || step > horizon)
    throw Error(Errc::OutOfRange, "grid step must lie in (0, horizon]");
  const auto n = static_cast<Eigen::Index>(std::floor(horizon / step + 1e-9)) + 1;
  drawrec::Vector grid(n);
  for (Eigen::Index i = 0; i < n; ++i) grid[i] = step * static_cast<double>(i);
  return grid;
}

drawrec::JumpConvention convention_from(const std::string& name) {
  return name == "source" ? drawrec::JumpConvention::Source
                          : drawrec::JumpConvention::Destination;
}

void print_fit(const drawrec::FitResult& fit, const std::string& time_unit) {
  const drawrec::ModelSpec& spec = fit.spec;
  std::cout << "states: " << spec.k << "\n";
  for (int j = 0; j < spec.k; ++j) {
    const drawrec::BetaLaw& law = spec.jump_laws[static_cast<std::size_t>(j)];
    std::cout << "  state " << (j + 1) << ": lambda = " << fmt6(spec.lambda[j]) << " per "
              << time_unit << ", jumps ~ Beta(" << fmt6(law.alpha) << ", " << fmt6(law.beta)
              << "), mean jump = " << fmt6(law.mean()) << "\n";
  }
  std::cout << "Q =\n";
  for (Eigen::Index r = 0; r < spec.Q.rows(); ++r) {
    std::cout << " ";
    for (Eigen::Index c = 0; c < spec.Q.cols(); ++c) std::cout << " " << fmt6(spec.Q(r, c));
    std::cout << "\n";
  }
  std::cout << "pi =";
  for (Eigen::Index j = 0; j < spec.pi.size(); ++j) std::cout << " " << fmt6(spec.pi[j]);
  std::cout << "\n";
  std::cout << "log-likelihood: " << fmt6(fit.loglik_trace.back())
            << "  iterations: " << fit.iterations
            << "  converged: " << (fit.converged ? "yes" : "no") << "\n";
  if (!fit.beta_newton_ok)
    std::cerr << "warning: at least one Beta fit fell back to the moment estimate\n";
}

struct RecordsArgs {
  std::string input;
  std::string output;
  std::string time_unit = "days";
};

int run_records(const RecordsArgs& args) {
  const drawrec::PriceSeries series = drawrec::load_prices_csv(args.input);
  const std::vector<drawrec::JumpEvent> events = drawrec::extract_records(series);
  drawrec::save_events_csv(args.output, events);
  if (events.empty())
    std::cerr << "warning: no drawdown records; prices never fell below the running maximum\n";
  const double final_record = events.empty() ? 0.0 : events.back().new_record;
  std::cout << "rows: " << series.times.size() << "  events: " << events.size()
            << "  final record: " << fmt6(final_record) << "  (inter-arrival unit: "
            << args.time_unit << ")\n";
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct FitArgs {
  std::string input;
  std::string output;
  int k = 2;
  double delta = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = drawrec::kDefaultSeed;
  std::string time_unit = "days";
};

int run_fit(const FitArgs& args) {
  const std::vector<drawrec::JumpEvent> events = drawrec::load_events_csv(args.input);
  drawrec::EmOptions options;
  options.delta = args.delta;
  options.max_iter = args.max_iter;
  options.seed = args.seed;
  drawrec::FitResult fit = drawrec::em_fit(events, args.k, options);
  drawrec::relabel_descending_rate(fit);
  drawrec::save_fit_json(args.output, fit);
  print_fit(fit, args.time_unit);
  std::cout << "wrote " << args.output << "\n";
  if (!fit.converged) {
    std::cerr << "error: estimator did not converge within " << args.max_iter
              << " iterations (result written anyway)\n";
    return 4;
  }
  return 0;
}

struct SimulateArgs {
  std::string model;
  std::string output;
  std::string paths_output;  // empty: no raw-path dump
  double r0 = 0.0;
  double horizon = 50.0;
  double grid_step = 0.5;
  int n_paths = 10000;
  std::uint64_t seed = drawrec::kDefaultSeed;
  std::string convention = "destination";
};

int run_simulate(const SimulateArgs& args) {
  const drawrec::ModelSpec spec = drawrec::load_model(args.model);
  const drawrec::Vector grid = make_grid(args.horizon, args.grid_step);
  const drawrec::JumpConvention convention = convention_from(args.convention);
  const drawrec::EnsembleStats stats =
      drawrec::monte_carlo(spec, args.r0, args.horizon, grid, args.n_paths, args.seed, convention);
  drawrec::save_ensemble_csv(args.output, stats);

  if (!args.paths_output.empty()) {
    // Re-derive the same per-path substreams the ensemble used, so the dump
    // shows the ensemble's own first paths.
    const int dump_count = std::min(args.n_paths, 10);
    const drawrec::RandomStream base(args.seed);
    std::vector<drawrec::SamplePath> sample;
    sample.reserve(static_cast<std::size_t>(dump_count));
    for (int p = 0; p < dump_count; ++p) {
      drawrec::RandomStream stream = base.substream(static_cast<std::uint64_t>(p));
      sample.push_back(
          drawrec::simulate_path(spec, args.r0, std::nullopt, args.horizon, stream, convention));
    }
    drawrec::save_paths_csv(args.paths_output, sample);
    std::cout << "wrote " << dump_count << " raw paths to " << args.paths_output << "\n";
  }

  const Eigen::Index last = grid.size() - 1;
  std::cout << "paths: " << args.n_paths << "  seed: " << args.seed << "\n";
  std::cout << "mean(" << fmt6(grid[last]) << ") = " << fmt6(stats.mean[last]) << "  p05 = "
            << fmt6(stats.p05[last]) << "  p95 = " << fmt6(stats.p95[last]) << "\n";
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct MomentsArgs {
  std::string model;
  std::string output;
  std::string per_state_output;  // empty: skip
  std::string variance_output;   // empty: skip
  double r0 = 0.0;
  double horizon = 50.0;
  double grid_step = 0.5;
  double rk4_step = drawrec::kDefaultRk4Step;
};

int run_moments(const MomentsArgs& args) {
  const drawrec::ModelSpec spec = drawrec::load_model(args.model);
  const drawrec::Vector grid = make_grid(args.horizon, args.grid_step);
  const drawrec::MomentCurve mean = drawrec::mean_curve(spec, args.r0, grid, args.rk4_step);
  const drawrec::VarianceCurve var = drawrec::variance_curve(spec, args.r0, grid, args.rk4_step);

  std::ofstream out(args.output, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + args.output);
  out << "t,mean,var\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << drawrec::format_double(grid[i]) << ',' << drawrec::format_double(mean.mixed[i]) << ','
        << drawrec::format_double(var.values[i]) << '\n';
  }
  out.close();
  if (args.per_state_output.empty() == false)
    drawrec::save_moment_curve_csv(args.per_state_output, mean);
  if (args.variance_output.empty() == false)
    drawrec::save_variance_curve_csv(args.variance_output, var);

  Eigen::Index peak = 0;
  var.values.maxCoeff(&peak);
  const Eigen::Index last = grid.size() - 1;
  std::cout << "mean(" << fmt6(grid[last]) << ") = " << fmt6(mean.mixed[last])
            << "  max variance " << fmt6(var.values[peak]) << " at t = " << fmt6(grid[peak])
            << "\n";
  if (mean.closed_form_used) {
    std::cout << "cross-check (matrix exponential vs RK4): sup error "
              << fmt6(mean.cross_check_error) << "\n";
  } else {
    std::cout << "B is near singular (rcond " << fmt6(mean.b_rcond)
              << "); RK4 integration only, cross-check skipped\n";
  }
  std::cout << "wrote " << args.output << "\n";
  if (mean.closed_form_used && mean.cross_check_error > 1e-6) {
    std::cerr << "error: closed form and RK4 disagree beyond 1e-6\n";
    return 5;
  }
  return 0;
}

struct PipelineArgs {
  std::string input;
  std::string out_dir = ".";
  int k = 2;
  double r0 = 0.0;
  double horizon = 50.0;
  double grid_step = 0.5;
  int n_paths = 10000;
  double delta = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = drawrec::kDefaultSeed;
  std::string time_unit = "days";
  std::string convention = "destination";
};

int run_pipeline(const PipelineArgs& args) {
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  const drawrec::PriceSeries series = drawrec::load_prices_csv(args.input);
  const std::vector<drawrec::JumpEvent> events = drawrec::extract_records(series);
  const fs::path events_file = dir / "events.csv";
  drawrec::save_events_csv(events_file, events);
  std::cout << "[records] " << events.size() << " events -> " << events_file.string() << "\n";

  drawrec::EmOptions options;
  options.delta = args.delta;
  options.max_iter = args.max_iter;
  options.seed = args.seed;
  drawrec::FitResult fit = drawrec::em_fit(events, args.k, options);
  drawrec::relabel_descending_rate(fit);
  const fs::path fit_file = dir / "fit.json";
  drawrec::save_fit_json(fit_file, fit);
  std::cout << "[fit] -> " << fit_file.string() << "\n";
  print_fit(fit, args.time_unit);

  const drawrec::Vector grid = make_grid(args.horizon, args.grid_step);
  const drawrec::EnsembleStats stats =
      drawrec::monte_carlo(fit.spec, args.r0, args.horizon, grid, args.n_paths, args.seed,
                           convention_from(args.convention));
  const fs::path ensemble_file = dir / "ensemble.csv";
  drawrec::save_ensemble_csv(ensemble_file, stats);
  std::cout << "[simulate] " << args.n_paths << " paths over [0, " << fmt6(args.horizon)
            << "] -> " << ensemble_file.string() << "\n";

  if (!fit.converged) {
    std::cerr << "error: estimator did not converge (outputs written anyway)\n";
    return 4;
  }
  return 0;
}

void attach_config(CLI::App* sub, std::string& path_var) {
  sub->add_option("--config", path_var,
                  "JSON object of defaults for this command's long options; "
                  "command-line flags win");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "drawdown record toolkit: extract drawdown records from price series, "
      "fit the jump model, simulate ensembles, evaluate analytic moments"};
  app.require_subcommand(1);
  std::string records_config, fit_config, sim_config, mom_config, pipe_config;

  RecordsArgs records_args;
  CLI::App* records_cmd =
      app.add_subcommand("records", "Extract drawdown record events from a price CSV");
  records_cmd->add_option("-i,--input", records_args.input, "price CSV with header date,close")
      ->required();
  records_cmd->add_option("-o,--output", records_args.output, "events CSV to write")->required();
  records_cmd->add_option("--time-unit", records_args.time_unit,
                          "label for inter-arrival units (annotation only, never rescales)")
      ->capture_default_str();
  attach_config(records_cmd, records_config);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the k-state jump model to record events");
  fit_cmd->add_option("-i,--input", fit_args.input, "events CSV")->required();
  fit_cmd->add_option("-o,--output", fit_args.output, "fit JSON to write")->required();
  fit_cmd->add_option("-k,--states", fit_args.k, "number of latent states")
      ->capture_default_str();
  fit_cmd->add_option("--delta", fit_args.delta, "log-likelihood convergence tolerance")
      ->capture_default_str();
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "iteration cap")->capture_default_str();
  fit_cmd->add_option("--seed", fit_args.seed, "RNG seed for initialization")
      ->capture_default_str();
  fit_cmd->add_option("--time-unit", fit_args.time_unit,
                      "label for rate units (annotation only)")
      ->capture_default_str();
  attach_config(fit_cmd, fit_config);

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo ensemble from a model JSON");
  sim_cmd->add_option("-m,--model", sim_args.model, "model JSON")->required();
  sim_cmd->add_option("-o,--output", sim_args.output, "ensemble CSV to write")->required();
  sim_cmd->add_option("--r0", sim_args.r0, "initial record level in [0,1)")
      ->capture_default_str();
  sim_cmd->add_option("-T,--horizon", sim_args.horizon, "simulation horizon")
      ->capture_default_str();
  sim_cmd->add_option("--grid-step", sim_args.grid_step, "evaluation grid step")
      ->capture_default_str();
  sim_cmd->add_option("-N,--paths-count", sim_args.n_paths, "number of sample paths")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--paths", sim_args.paths_output, "also dump up to 10 raw paths here");
  sim_cmd
      ->add_option("--jump-convention", sim_args.convention,
                   "which state's Beta law supplies jump sizes")
      ->check(CLI::IsMember({"destination", "source"}))
      ->capture_default_str();
  attach_config(sim_cmd, sim_config);

  MomentsArgs mom_args;
  CLI::App* mom_cmd =
      app.add_subcommand("moments", "Analytic mean/variance curves from a model JSON");
  mom_cmd->add_option("-m,--model", mom_args.model, "model JSON")->required();
  mom_cmd->add_option("-o,--output", mom_args.output, "t,mean,var CSV to write")->required();
  mom_cmd->add_option("--r0", mom_args.r0, "initial record level in [0,1)")
      ->capture_default_str();
  mom_cmd->add_option("-T,--horizon", mom_args.horizon, "curve horizon")->capture_default_str();
  mom_cmd->add_option("--grid-step", mom_args.grid_step, "output grid step")
      ->capture_default_str();
  mom_cmd->add_option("--rk4-step", mom_args.rk4_step, "integrator step bound")
      ->capture_default_str();
  mom_cmd->add_option("--per-state", mom_args.per_state_output,
                      "also write per-state mean curves here");
  mom_cmd->add_option("--variance-out", mom_args.variance_output,
                      "also write the variance curve (with one-state bound) here");
  attach_config(mom_cmd, mom_config);

  PipelineArgs pipe_args;
  CLI::App* pipe_cmd = app.add_subcommand(
      "pipeline", "records -> fit -> simulate; writes events.csv, fit.json, ensemble.csv");
  pipe_cmd->add_option("-i,--input", pipe_args.input, "price CSV with header date,close")
      ->required();
  pipe_cmd->add_option("-d,--out-dir", pipe_args.out_dir, "output directory")
      ->capture_default_str();
  pipe_cmd->add_option("-k,--states", pipe_args.k, "number of latent states")
      ->capture_default_str();
  pipe_cmd->add_option("--r0", pipe_args.r0, "initial record level for the simulation stage")
      ->capture_default_str();
  pipe_cmd->add_option("-T,--horizon", pipe_args.horizon, "simulation horizon")
      ->capture_default_str();
  pipe_cmd->add_option("--grid-step", pipe_args.grid_step, "evaluation grid step")
      ->capture_default_str();
  pipe_cmd->add_option("-N,--paths-count", pipe_args.n_paths, "number of sample paths")
      ->capture_default_str();
  pipe_cmd->add_option("--delta", pipe_args.delta, "fit convergence tolerance")
      ->capture_default_str();
  pipe_cmd->add_option("--max-iter", pipe_args.max_iter, "fit iteration cap")
      ->capture_default_str();
  pipe_cmd->add_option("--seed", pipe_args.seed, "RNG seed for fit and simulation")
      ->capture_default_str();
  pipe_cmd->add_option("--time-unit", pipe_args.time_unit,
                       "label for inter-arrival units (annotation only)")
      ->capture_default_str();
  pipe_cmd
      ->add_option("--jump-convention", pipe_args.convention,
                   "which state's Beta law supplies jump sizes")
      ->check(CLI::IsMember({"destination", "source"}))
      ->capture_default_str();
  attach_config(pipe_cmd, pipe_config);

  try {
    app.parse(argc, argv);
    if (records_cmd->parsed()) {
      apply_config(records_cmd, records_config);
      return run_records(records_args);
    }
    if (fit_cmd->parsed()) {
      apply_config(fit_cmd, fit_config);
      return run_fit(fit_args);
    }
    if (sim_cmd->parsed()) {
      apply_config(sim_cmd, sim_config);
      return run_simulate(sim_args);
    }
    if (mom_cmd->parsed()) {
      apply_config(mom_cmd, mom_config);
      return run_moments(mom_args);
    }
    if (pipe_cmd->parsed()) {
      apply_config(pipe_cmd, pipe_config);
      return run_pipeline(pipe_args);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
