#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chirpsep/estimate.hpp"
#include "chirpsep/signal.hpp"
#include "chirpsep/snippet.hpp"

namespace chirpsep {

struct BurstRef {
  int train = 0;  // index into scenario.trains
  int burst = 0;
  double start = 0.0;
  double duration = 0.0;
};

struct MatchReport {
  int detected = 0;
  int total = 0;
  std::vector<BurstRef> bursts;
  std::vector<int> assignment;        // burst -> estimate index, -1 unmatched
  std::vector<double> midpoint_errors;  // relative frequency error at the overlap midpoint
};

// Greedy one-to-one matching by descending time overlap. A pair qualifies
// when the overlap covers at least overlap_min of the burst duration and the
// estimate's frequency line deviates from the true line by at most if_tol
// (relative) at the overlap midpoint.
MatchReport match_estimates(const Scenario& scenario, const std::vector<ChirpEstimate>& estimates,
                            const SnippetPlan& plan, double overlap_min = 0.5,
                            double if_tol = 0.05);

// How the recovered frequency at (t_k, component) is read off:
//   fitted_line     - matched estimate's regression line
//   reported_params - matched estimate's line with slope b_param_sweep/duration
//   peaks           - nearest in-band diagram point at the snippet (within
//                     pairing_radius of the true frequency), falling back to
//                     the matched line when the snippet has no such point
enum class RmseVariant { fitted_line, reported_params, peaks };

RmseVariant rmse_variant_from_name(const std::string& name);
std::string rmse_variant_name(RmseVariant variant);

struct RmseOptions {
  RmseVariant variant = RmseVariant::peaks;
  bool unmatched_nearest = false;  // pair unmatched bursts with the nearest line
  double pairing_radius = 0.0;     // peaks variant; 0 means eta is used
};

struct RmseBreakdown {
  double value = 0.0;
  int pairs_used = 0;
  int pairs_excluded = 0;
};

// sqrt((1/D) * sum over snippets and active components of the squared
// relative frequency error). Empty when no burst was matched.
std::optional<RmseBreakdown> experiment_rmse(const Scenario& scenario,
                                             const PipelineResult& result,
                                             const MatchReport& match, const SnippetPlan& plan,
                                             const RmseOptions& options, double eta);

// Rows `t,freq_true,freq_est,abs_residue` per active (snippet, component)
// pair with a matched estimate.
std::string heatmap_csv(const Scenario& scenario, const std::vector<ChirpEstimate>& estimates,
                        const MatchReport& match, const SnippetPlan& plan);

struct PlanSettings {
  double delta = 2e-6;
  int snippets = 2500;
  double percentile = 99.0;
  bool refine_peaks = true;
  FilterKind filter = FilterKind::smooth_bump;
};

struct ExperimentConfig {
  std::string scenario_path;
  std::vector<double> snr_db;
  std::vector<double> rate_hz;
  int trials = 16;
  std::uint64_t base_seed = 0;
  PlanSettings plan;
  PipelineConfig pipeline;
  RmseOptions rmse;
  double overlap_min = 0.5;
  double if_tol = 0.05;

  void validate() const;  // throws ConfigError
};

struct SweepRow {
  double snr_db = 0.0;
  std::string example;
  double rate_hz = 0.0;
  int total = 0;
  double detected_mean = 0.0;
  double rmse_mean = 0.0;  // NaN for a missing cell
  double rmse_std = 0.0;
  int trials_ok = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool partial = false;  // some cell produced no usable trials
};

struct TrialOutcome {
  int detected = 0;
  std::optional<double> rmse;
};

// One (scenario, snr, rate, seed) trial: synthesize, add noise, run the
// pipeline, match and score.
TrialOutcome run_trial(const Scenario& scenario, double snr_db, double rate_hz,
                       std::uint64_t seed, const ExperimentConfig& config);

// Full grid; trials run concurrently, aggregation order is fixed.
SweepReport run_sweep(const ExperimentConfig& config, const Scenario& scenario);

// Columns: snr_db,example,rate_hz,total,detected,rmse,std
std::string sweep_csv(const SweepReport& report);
std::string sweep_table(const SweepReport& report);

int total_bursts(const Scenario& scenario);

}  // namespace chirpsep
