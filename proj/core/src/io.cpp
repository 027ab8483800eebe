#include "chirpsep/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chirpsep/errors.hpp"

namespace chirpsep {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary IQ layout assumes a little-endian host");

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

ChirpPulseTrain train_from_json(const json& j) {
  ChirpPulseTrain tr;
  tr.amplitude = j.value("amplitude", 1.0);
  tr.theta = j.at("theta").get<double>();
  tr.bandwidth_param = j.at("bandwidth").get<double>();
  tr.duration = j.at("duration").get<double>();
  tr.start_time = j.at("start_time").get<double>();
  tr.pri = j.value("pri", 0.0);
  tr.burst_count = j.value("burst_count", 1);
  return tr;
}

AnalysisDefaults defaults_from_json(const json& j) {
  AnalysisDefaults d;
  if (j.contains("eta")) d.eta = j["eta"].get<double>();
  if (j.contains("b_rec")) d.b_rec = j["b_rec"].get<double>();
  if (j.contains("delta")) d.delta = j["delta"].get<double>();
  if (j.contains("snippets")) d.snippets = j["snippets"].get<int>();
  if (j.contains("percentile")) d.percentile = j["percentile"].get<double>();
  if (j.contains("d1")) d.d1 = j["d1"].get<int>();
  if (j.contains("d2")) d.d2 = j["d2"].get<int>();
  if (j.contains("m_parts")) d.m_parts = j["m_parts"].get<int>();
  return d;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

double read_f64(std::istream& in) {
  double v = 0.0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

ScenarioFile load_scenario(const std::string& path) {
  const json j = read_json_file(path);
  ScenarioFile file;
  try {
    file.scenario.label = j.value("label", std::string{});
    file.scenario.horizon = j.at("horizon").get<double>();
    file.scenario.sample_rate = j.at("sample_rate").get<double>();
    for (const auto& tj : j.at("trains")) {
      file.scenario.trains.push_back(train_from_json(tj));
    }
    if (j.contains("tuning")) file.defaults = defaults_from_json(j["tuning"]);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  file.scenario.validate();
  return file;
}

void save_scenario(const std::string& path, const Scenario& scenario,
                   const AnalysisDefaults& defaults) {
  json j;
  j["label"] = scenario.label;
  j["horizon"] = scenario.horizon;
  j["sample_rate"] = scenario.sample_rate;
  j["trains"] = json::array();
  for (const auto& tr : scenario.trains) {
    j["trains"].push_back({{"amplitude", tr.amplitude},
                           {"theta", tr.theta},
                           {"bandwidth", tr.bandwidth_param},
                           {"duration", tr.duration},
                           {"start_time", tr.start_time},
                           {"pri", tr.pri},
                           {"burst_count", tr.burst_count}});
  }
  json tuning;
  if (defaults.eta) tuning["eta"] = *defaults.eta;
  if (defaults.b_rec) tuning["b_rec"] = *defaults.b_rec;
  if (defaults.delta) tuning["delta"] = *defaults.delta;
  if (defaults.snippets) tuning["snippets"] = *defaults.snippets;
  if (defaults.percentile) tuning["percentile"] = *defaults.percentile;
  if (defaults.d1) tuning["d1"] = *defaults.d1;
  if (defaults.d2) tuning["d2"] = *defaults.d2;
  if (defaults.m_parts) tuning["m_parts"] = *defaults.m_parts;
  if (!tuning.empty()) j["tuning"] = tuning;

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_iq_csv(std::ostream& out, const IQRecord& record) {
  out << "index,t,re,im\n";
  char line[160];
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    const double t = record.t0 + static_cast<double>(i) / record.sample_rate;
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", i, t, record.samples[i].real(),
                  record.samples[i].imag());
    out << line;
  }
}

IQRecord read_iq_csv(std::istream& in) {
  IQRecord record;
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) throw ConfigError("bad iq csv row: " + line);
    times.push_back(std::stod(fields[1]));
    record.samples.emplace_back(std::stod(fields[2]), std::stod(fields[3]));
  }
  if (record.samples.size() < 2) throw ConfigError("iq csv needs at least two samples");
  record.t0 = times.front();
  record.sample_rate =
      static_cast<double>(times.size() - 1) / (times.back() - times.front());
  return record;
}

void write_iq_binary(std::ostream& out, const IQRecord& record) {
  out.write("CHIRPIQ\0", 8);
  write_f64(out, record.sample_rate);
  write_f64(out, record.t0);
  for (const auto& s : record.samples) {
    write_f64(out, s.real());
    write_f64(out, s.imag());
  }
}

IQRecord read_iq_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "CHIRPIQ\0", 8) != 0) {
    throw ConfigError("not a CHIRPIQ binary file");
  }
  IQRecord record;
  record.sample_rate = read_f64(in);
  record.t0 = read_f64(in);
  for (;;) {
    const double re = read_f64(in);
    if (!in) break;
    const double im = read_f64(in);
    if (!in) throw ConfigError("truncated iq binary file");
    record.samples.emplace_back(re, im);
  }
  if (record.samples.empty()) throw ConfigError("iq binary file has no samples");
  return record;
}

void save_iq(const std::string& path, const IQRecord& record) {
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  std::ofstream out(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  if (csv) {
    write_iq_csv(out, record);
  } else {
    write_iq_binary(out, record);
  }
}

IQRecord load_iq(const std::string& path) {
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  std::ifstream in(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return csv ? read_iq_csv(in) : read_iq_binary(in);
}

void write_diagram_csv(std::ostream& out, const Diagram& diagram) {
  out << "snippet,t,lambda,freq_rad_s,magnitude\n";
  char line[192];
  for (const auto& p : diagram.points) {
    std::snprintf(line, sizeof(line), "%d,%.12e,%.12e,%.12e,%.12e\n", p.snippet_index, p.t,
                  p.lambda_hat, p.freq, p.magnitude);
    out << line;
  }
}

std::vector<DiagramPoint> read_diagram_points_csv(std::istream& in) {
  std::vector<DiagramPoint> points;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw ConfigError("bad diagram csv row: " + line);
    DiagramPoint p;
    p.snippet_index = std::stoi(fields[0]);
    p.t = std::stod(fields[1]);
    p.lambda_hat = std::stod(fields[2]);
    p.freq = std::stod(fields[3]);
    p.magnitude = std::stod(fields[4]);
    points.push_back(p);
  }
  return points;
}

void write_estimates_csv(std::ostream& out, const std::vector<ChirpEstimate>& estimates) {
  out << "id,gamma,duration,omega_rad_s,slope_rad_s2,b_sweep,b_slope,rmse_p,n_points\n";
  char line[256];
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    std::snprintf(line, sizeof(line), "%zu,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%zu\n", i + 1,
                  e.gamma, e.duration, e.omega, e.slope, e.b_param_sweep, e.b_param_slope,
                  e.rmse_p, e.support.size());
    out << line;
  }
}

std::vector<ChirpEstimate> read_estimates_csv(std::istream& in) {
  std::vector<ChirpEstimate> estimates;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 9) throw ConfigError("bad estimates csv row: " + line);
    ChirpEstimate e;
    e.gamma = std::stod(fields[1]);
    e.duration = std::stod(fields[2]);
    e.omega = std::stod(fields[3]);
    e.slope = std::stod(fields[4]);
    e.b_param_sweep = std::stod(fields[5]);
    e.b_param_slope = std::stod(fields[6]);
    e.rmse_p = std::stod(fields[7]);
    estimates.push_back(std::move(e));
  }
  return estimates;
}

ResolvedExperiment load_experiment(const std::string& config_path) {
  const json j = read_json_file(config_path);
  ResolvedExperiment resolved;
  auto& cfg = resolved.config;

  try {
    cfg.scenario_path = j.at("scenario").get<std::string>();
    {
      const std::filesystem::path p(cfg.scenario_path);
      if (p.is_relative()) {
        cfg.scenario_path =
            (std::filesystem::path(config_path).parent_path() / p).string();
      }
    }
    const ScenarioFile sf = load_scenario(cfg.scenario_path);
    resolved.scenario = sf.scenario;
    const auto& d = sf.defaults;

    cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
    cfg.rate_hz = j.at("rate_hz").get<std::vector<double>>();
    cfg.trials = j.value("trials", 16);
    cfg.base_seed = j.value("base_seed", std::uint64_t{0});

    const json plan = j.value("plan", json::object());
    cfg.plan.delta = plan.value("delta", d.delta.value_or(2e-6));
    cfg.plan.snippets = plan.value("snippets", d.snippets.value_or(2500));
    cfg.plan.percentile = plan.value("percentile", d.percentile.value_or(99.0));
    cfg.plan.refine_peaks = plan.value("refine_peaks", true);
    if (plan.contains("filter")) {
      cfg.plan.filter = filter_from_name(plan["filter"].get<std::string>());
    }

    const json pipe = j.value("pipeline", json::object());
    if (pipe.contains("eta")) {
      cfg.pipeline.eta = pipe["eta"].get<double>();
    } else if (d.eta) {
      cfg.pipeline.eta = *d.eta;
    } else {
      throw ConfigError("eta missing: set pipeline.eta or the scenario tuning block");
    }
    if (pipe.contains("b_rec")) {
      cfg.pipeline.b_rec = pipe["b_rec"].get<double>();
    } else if (d.b_rec) {
      cfg.pipeline.b_rec = *d.b_rec;
    } else {
      throw ConfigError("b_rec missing: set pipeline.b_rec or the scenario tuning block");
    }
    cfg.pipeline.d1 = pipe.value("d1", d.d1.value_or(0));
    cfg.pipeline.d2 = pipe.value("d2", d.d2.value_or(cfg.pipeline.d2));
    cfg.pipeline.m_parts = pipe.value("m_parts", d.m_parts.value_or(cfg.pipeline.m_parts));
    cfg.pipeline.rmse_gate_fraction =
        pipe.value("rmse_gate_fraction", cfg.pipeline.rmse_gate_fraction);
    cfg.pipeline.regression_keep_fraction =
        pipe.value("regression_keep_fraction", cfg.pipeline.regression_keep_fraction);
    cfg.pipeline.merge_tolerance = pipe.value("merge_tolerance", cfg.pipeline.merge_tolerance);
    cfg.pipeline.crossover_unscaled_min_neighbors =
        pipe.value("crossover_unscaled_min_neighbors", false);
    cfg.pipeline.merge_by_averaging = pipe.value("merge_by_averaging", false);

    const json rmse = j.value("rmse", json::object());
    if (rmse.contains("variant")) {
      cfg.rmse.variant = rmse_variant_from_name(rmse["variant"].get<std::string>());
    }
    cfg.rmse.unmatched_nearest = rmse.value("unmatched_nearest", false);
    cfg.rmse.pairing_radius = rmse.value("pairing_radius", 0.0);

    cfg.overlap_min = j.value("overlap_min", 0.5);
    cfg.if_tol = j.value("if_tol", 0.05);
  } catch (const json::exception& e) {
    throw ConfigError(config_path + ": " + e.what());
  }

  cfg.validate();
  return resolved;
}

}  // namespace chirpsep
