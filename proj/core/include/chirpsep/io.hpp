#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chirpsep/harness.hpp"

namespace chirpsep {

// Recommended analysis settings a scenario file may carry; explicit CLI or
// sweep-config values win over these.
struct AnalysisDefaults {
  std::optional<double> eta;
  std::optional<double> b_rec;
  std::optional<double> delta;
  std::optional<int> snippets;
  std::optional<double> percentile;
  std::optional<int> d1;
  std::optional<int> d2;
  std::optional<int> m_parts;
};

struct ScenarioFile {
  Scenario scenario;
  AnalysisDefaults defaults;
};

ScenarioFile load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& scenario,
                   const AnalysisDefaults& defaults = {});

// Text form: `index,t,re,im` with full double precision. Reading infers t0
// and the sample rate from the time column.
void write_iq_csv(std::ostream& out, const IQRecord& record);
IQRecord read_iq_csv(std::istream& in);

// Binary form: 8-byte magic "CHIRPIQ\0", sample_rate and t0 as little-endian
// f64, then interleaved re,im f64 samples.
void write_iq_binary(std::ostream& out, const IQRecord& record);
IQRecord read_iq_binary(std::istream& in);

// Extension .csv selects text, anything else binary.
void save_iq(const std::string& path, const IQRecord& record);
IQRecord load_iq(const std::string& path);

// `snippet,t,lambda,freq_rad_s,magnitude`
void write_diagram_csv(std::ostream& out, const Diagram& diagram);
std::vector<DiagramPoint> read_diagram_points_csv(std::istream& in);

// `id,gamma,duration,omega_rad_s,slope_rad_s2,b_sweep,b_slope,rmse_p,n_points`
void write_estimates_csv(std::ostream& out, const std::vector<ChirpEstimate>& estimates);
std::vector<ChirpEstimate> read_estimates_csv(std::istream& in);

struct ResolvedExperiment {
  ExperimentConfig config;
  Scenario scenario;
};

// Loads a sweep configuration and its scenario; scenario-file defaults fill
// any setting the config leaves unset. Relative scenario paths resolve
// against the config file's directory.
ResolvedExperiment load_experiment(const std::string& config_path);

}  // namespace chirpsep
