#include "drawrec/io.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drawrec/errors.hpp"

namespace drawrec {

namespace {

using nlohmann::json;

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(Errc::ParseError, "failed writing " + file.string());
}

json parse_json(const std::filesystem::path& file) {
  try {
    return json::parse(read_text(file));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, file.string() + ": " + e.what());
  }
}

void reject_unknown_keys(const json& object, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& item : object.items()) {
    bool ok = false;
    for (const char* key : known) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw Error(Errc::ParseError, where + ": unknown key \"" + item.key() + "\"");
  }
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(Errc::ParseError, where + " must be a number");
  return j.get<double>();
}

// Returns true and fills `value` when the whole field parses as a number.
bool parse_full_double(const std::string& field, double& value) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  value = std::strtod(begin, &end);
  return end != begin && *end == '\0' && errno != ERANGE;
}

// ISO-8601 calendar date to a day count.
bool parse_iso_date(const std::string& field, double& day_serial) {
  int y = 0;
  unsigned m = 0, d = 0;
  int consumed = 0;
  if (std::sscanf(field.c_str(), "%d-%u-%u%n", &y, &m, &d, &consumed) != 3 ||
      consumed != static_cast<int>(field.size()))
    return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return false;
  const std::chrono::sys_days days{ymd};
  day_serial = static_cast<double>(days.time_since_epoch().count());
  return true;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(current);
  return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& file, std::size_t line_number,
                             const std::string& what) {
  throw Error(Errc::ParseError,
              file.string() + ": line " + std::to_string(line_number) + ": " + what);
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

ModelSpec load_model(const std::filesystem::path& file) {
  const json j = parse_json(file);
  if (!j.is_object()) throw Error(Errc::ParseError, file.string() + ": expected a JSON object");
  reject_unknown_keys(j, {"k", "pi", "Q", "lambda", "jump_laws"}, file.string());
  for (const char* key : {"k", "pi", "Q", "lambda", "jump_laws"}) {
    if (!j.contains(key))
      throw Error(Errc::ParseError, file.string() + ": missing key \"" + std::string(key) + "\"");
  }
  ModelSpec spec;
  if (!j["k"].is_number_integer())
    throw Error(Errc::ParseError, file.string() + ": \"k\" must be an integer");
  spec.k = j["k"].get<int>();

  const auto read_vector = [&](const json& arr, const char* name) {
    if (!arr.is_array())
      throw Error(Errc::ParseError, file.string() + ": \"" + name + "\" must be an array");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& item : arr)
      v[i++] = require_number(item, file.string() + ": \"" + name + "\" entry");
    return v;
  };
  spec.pi = read_vector(j["pi"], "pi");
  spec.lambda = read_vector(j["lambda"], "lambda");

  if (!j["Q"].is_array())
    throw Error(Errc::ParseError, file.string() + ": \"Q\" must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j["Q"].size());
  spec.Q.resize(rows, rows);
  Eigen::Index r = 0;
  for (const auto& row : j["Q"]) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
      throw Error(Errc::ParseError, file.string() + ": \"Q\" must be square");
    Eigen::Index c = 0;
    for (const auto& item : row)
      spec.Q(r, c++) = require_number(item, file.string() + ": \"Q\" entry");
    ++r;
  }

  if (!j["jump_laws"].is_array())
    throw Error(Errc::ParseError, file.string() + ": \"jump_laws\" must be an array");
  for (const auto& law : j["jump_laws"]) {
    if (!law.is_object())
      throw Error(Errc::ParseError, file.string() + ": jump law must be an object");
    reject_unknown_keys(law, {"alpha", "beta"}, file.string() + ": jump law");
    if (!law.contains("alpha") || !law.contains("beta"))
      throw Error(Errc::ParseError, file.string() + ": jump law needs \"alpha\" and \"beta\"");
    spec.jump_laws.push_back(BetaLaw{require_number(law["alpha"], file.string() + ": alpha"),
                                     require_number(law["beta"], file.string() + ": beta")});
  }
  return validate(spec);
}

void save_model(const std::filesystem::path& file, const ModelSpec& spec) {
  json j;
  j["k"] = spec.k;
  j["pi"] = std::vector<double>(spec.pi.data(), spec.pi.data() + spec.pi.size());
  j["lambda"] = std::vector<double>(spec.lambda.data(), spec.lambda.data() + spec.lambda.size());
  json rows = json::array();
  for (Eigen::Index r = 0; r < spec.Q.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < spec.Q.cols(); ++c) row.push_back(spec.Q(r, c));
    rows.push_back(row);
  }
  j["Q"] = rows;
  json laws = json::array();
  for (const BetaLaw& law : spec.jump_laws)
    laws.push_back(json{{"alpha", law.alpha}, {"beta", law.beta}});
  j["jump_laws"] = laws;
  write_text(file, j.dump(2) + "\n");
}

PriceSeries load_prices_csv(const std::filesystem::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  std::size_t line_number = 0;

  if (!std::getline(in, line))
    throw Error(Errc::ParseError, file.string() + ": empty file, expected header \"date,close\"");
  ++line_number;
  const auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "date" || header[1] != "close")
    parse_fail(file, line_number, "expected header \"date,close\"");

  PriceSeries series;
  enum class TimeKind { Unknown, Numeric, IsoDate } kind = TimeKind::Unknown;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) parse_fail(file, line_number, "expected 2 comma-separated fields");

    double t = 0.0;
    double numeric = 0.0;
    const bool is_numeric = parse_full_double(fields[0], numeric);
    if (kind == TimeKind::Unknown) kind = is_numeric ? TimeKind::Numeric : TimeKind::IsoDate;
    if (kind == TimeKind::Numeric) {
      if (!is_numeric || !std::isfinite(numeric))
        parse_fail(file, line_number, "invalid numeric time \"" + fields[0] + "\"");
      t = numeric;
    } else {
      if (!parse_iso_date(fields[0], t))
        parse_fail(file, line_number, "invalid ISO-8601 date \"" + fields[0] + "\"");
    }

    double close = 0.0;
    if (!parse_full_double(fields[1], close) || !std::isfinite(close))
      parse_fail(file, line_number, "invalid close value \"" + fields[1] + "\"");

    if (!series.times.empty() && t <= series.times.back())
      parse_fail(file, line_number, "time does not increase");
    series.times.push_back(t);
    series.prices.push_back(close);
  }
  if (series.times.empty()) throw Error(Errc::EmptySeries, file.string() + ": no data rows");

  const double origin = series.times.front();
  for (double& t : series.times) t -= origin;
  return series;
}

void save_events_csv(const std::filesystem::path& file, const std::vector<JumpEvent>& events) {
  std::ostringstream out;
  out << "t,inter_arrival,prev_record,new_record,rho,provisional\n";
  for (const JumpEvent& ev : events) {
    out << format_double(ev.time) << ',' << format_double(ev.inter_arrival) << ','
        << format_double(ev.prev_record) << ',' << format_double(ev.new_record) << ','
        << format_double(ev.rho) << ',' << (ev.provisional ? '1' : '0') << '\n';
  }
  write_text(file, out.str());
}

std::vector<JumpEvent> load_events_csv(const std::filesystem::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  std::size_t line_number = 0;

  if (!std::getline(in, line)) throw Error(Errc::EmptyEvents, file.string() + ": empty file");
  ++line_number;
  if (split_csv_line(line) !=
      std::vector<std::string>{"t", "inter_arrival", "prev_record", "new_record", "rho",
                               "provisional"})
    parse_fail(file, line_number, "unexpected header");

  std::vector<JumpEvent> events;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) parse_fail(file, line_number, "expected 6 comma-separated fields");
    JumpEvent ev;
    double values[5];
    for (int i = 0; i < 5; ++i) {
      if (!parse_full_double(fields[static_cast<std::size_t>(i)], values[i]) ||
          !std::isfinite(values[i]))
        parse_fail(file, line_number, "invalid number \"" + fields[static_cast<std::size_t>(i)] + "\"");
    }
    ev.time = values[0];
    ev.inter_arrival = values[1];
    ev.prev_record = values[2];
    ev.new_record = values[3];
    ev.rho = values[4];
    if (fields[5] == "0")
      ev.provisional = false;
    else if (fields[5] == "1")
      ev.provisional = true;
    else
      parse_fail(file, line_number, "provisional flag must be 0 or 1");
    events.push_back(ev);
  }
  return events;
}

void save_moment_curve_csv(const std::filesystem::path& file, const MomentCurve& curve) {
  std::ostringstream out;
  out << "t,mixed";
  for (Eigen::Index s = 0; s < curve.per_state.rows(); ++s) out << ",state_" << (s + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < curve.grid.size(); ++i) {
    out << format_double(curve.grid[i]) << ',' << format_double(curve.mixed[i]);
    for (Eigen::Index s = 0; s < curve.per_state.rows(); ++s)
      out << ',' << format_double(curve.per_state(s, i));
    out << '\n';
  }
  write_text(file, out.str());
}

void save_variance_curve_csv(const std::filesystem::path& file, const VarianceCurve& curve) {
  std::ostringstream out;
  out << (curve.bound ? "t,var,bound\n" : "t,var\n");
  for (Eigen::Index i = 0; i < curve.grid.size(); ++i) {
    out << format_double(curve.grid[i]) << ',' << format_double(curve.values[i]);
    if (curve.bound) out << ',' << format_double((*curve.bound)[i]);
    out << '\n';
  }
  write_text(file, out.str());
}

void save_ensemble_csv(const std::filesystem::path& file, const EnsembleStats& stats) {
  std::ostringstream out;
  out << "t,mean,var,p05,p95\n";
  for (Eigen::Index i = 0; i < stats.grid.size(); ++i) {
    out << format_double(stats.grid[i]) << ',' << format_double(stats.mean[i]) << ','
        << format_double(stats.var[i]) << ',' << format_double(stats.p05[i]) << ','
        << format_double(stats.p95[i]) << '\n';
  }
  write_text(file, out.str());
}

void save_paths_csv(const std::filesystem::path& file, const std::vector<SamplePath>& paths) {
  std::ostringstream out;
  out << "path_id,T_n,state,record\n";
  int path_id = 1;
  for (const SamplePath& path : paths) {
    out << path_id << ",0," << (path.initial_state + 1) << ','
        << format_double(path.initial_r) << '\n';
    for (std::size_t n = 0; n < path.jump_times.size(); ++n) {
      out << path_id << ',' << format_double(path.jump_times[n]) << ',' << (path.states[n] + 1)
          << ',' << format_double(path.records[n]) << '\n';
    }
    ++path_id;
  }
  write_text(file, out.str());
}

void save_fit_json(const std::filesystem::path& file, const FitResult& fit) {
  json j;
  j["pi"] =
      std::vector<double>(fit.spec.pi.data(), fit.spec.pi.data() + fit.spec.pi.size());
  json rows = json::array();
  for (Eigen::Index r = 0; r < fit.spec.Q.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < fit.spec.Q.cols(); ++c) row.push_back(fit.spec.Q(r, c));
    rows.push_back(row);
  }
  j["Q"] = rows;
  j["lambda"] = std::vector<double>(fit.spec.lambda.data(),
                                    fit.spec.lambda.data() + fit.spec.lambda.size());
  json laws = json::array();
  for (const BetaLaw& law : fit.spec.jump_laws)
    laws.push_back(json{{"alpha", law.alpha}, {"beta", law.beta}});
  j["jump_laws"] = laws;
  j["labels"] = fit.labels;
  j["loglik_trace"] = fit.loglik_trace;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  write_text(file, j.dump(2) + "\n");
}

}  // namespace drawrec
