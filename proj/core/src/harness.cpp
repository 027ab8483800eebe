#include "chirpsep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "chirpsep/errors.hpp"
#include "chirpsep/parallel.hpp"
#include "chirpsep/rng.hpp"
#include "chirpsep/stats.hpp"

namespace chirpsep {

namespace {

double truth_frequency(const Scenario& scenario, const BurstRef& burst, double t) {
  const auto& train = scenario.trains[static_cast<std::size_t>(burst.train)];
  const double u = t - burst.start;
  return train.theta + train.if_slope() * u;
}

struct Candidate {
  double overlap;
  int burst;
  int estimate;
  double err;
};

}  // namespace

int total_bursts(const Scenario& scenario) {
  int n = 0;
  for (const auto& tr : scenario.trains) n += tr.burst_count;
  return n;
}

MatchReport match_estimates(const Scenario& scenario, const std::vector<ChirpEstimate>& estimates,
                            const SnippetPlan& plan, double overlap_min, double if_tol) {
  (void)plan;
  MatchReport report;
  for (std::size_t j = 0; j < scenario.trains.size(); ++j) {
    const auto& tr = scenario.trains[j];
    for (int n = 0; n < tr.burst_count; ++n) {
      report.bursts.push_back(
          {static_cast<int>(j), n, tr.burst_start(n), tr.duration});
    }
  }
  report.total = static_cast<int>(report.bursts.size());
  report.assignment.assign(report.bursts.size(), -1);
  report.midpoint_errors.assign(report.bursts.size(),
                                std::numeric_limits<double>::quiet_NaN());

  std::vector<Candidate> candidates;
  for (std::size_t b = 0; b < report.bursts.size(); ++b) {
    const auto& burst = report.bursts[b];
    for (std::size_t e = 0; e < estimates.size(); ++e) {
      const auto& est = estimates[e];
      const double lo = std::max(burst.start, est.gamma);
      const double hi = std::min(burst.start + burst.duration, est.gamma + est.duration);
      const double overlap = hi - lo;
      if (!(overlap >= overlap_min * burst.duration)) continue;
      const double mid = 0.5 * (lo + hi);
      const double truth = truth_frequency(scenario, burst, mid);
      const double err = std::abs(est.line_at(mid) - truth) / std::abs(truth);
      if (err > if_tol) continue;
      candidates.push_back({overlap, static_cast<int>(b), static_cast<int>(e), err});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.burst != b.burst) return a.burst < b.burst;
    return a.estimate < b.estimate;
  });

  std::vector<char> estimate_used(estimates.size(), 0);
  for (const auto& c : candidates) {
    if (report.assignment[static_cast<std::size_t>(c.burst)] >= 0) continue;
    if (estimate_used[static_cast<std::size_t>(c.estimate)]) continue;
    report.assignment[static_cast<std::size_t>(c.burst)] = c.estimate;
    report.midpoint_errors[static_cast<std::size_t>(c.burst)] = c.err;
    estimate_used[static_cast<std::size_t>(c.estimate)] = 1;
    ++report.detected;
  }
  return report;
}

RmseVariant rmse_variant_from_name(const std::string& name) {
  if (name == "line") return RmseVariant::fitted_line;
  if (name == "params") return RmseVariant::reported_params;
  if (name == "peaks") return RmseVariant::peaks;
  throw ConfigError("unknown rmse variant: " + name);
}

std::string rmse_variant_name(RmseVariant variant) {
  switch (variant) {
    case RmseVariant::fitted_line:
      return "line";
    case RmseVariant::reported_params:
      return "params";
    case RmseVariant::peaks:
      return "peaks";
  }
  return "peaks";
}

std::optional<RmseBreakdown> experiment_rmse(const Scenario& scenario,
                                             const PipelineResult& result,
                                             const MatchReport& match, const SnippetPlan& plan,
                                             const RmseOptions& options, double eta) {
  if (match.detected == 0) return std::nullopt;
  const auto& estimates = result.estimates;

  // burst -> estimate lookup keyed by (train, burst index)
  std::vector<std::vector<int>> assigned(scenario.trains.size());
  for (std::size_t j = 0; j < scenario.trains.size(); ++j) {
    assigned[j].assign(static_cast<std::size_t>(scenario.trains[j].burst_count), -1);
  }
  for (std::size_t b = 0; b < match.bursts.size(); ++b) {
    const auto& burst = match.bursts[b];
    assigned[static_cast<std::size_t>(burst.train)][static_cast<std::size_t>(burst.burst)] =
        match.assignment[b];
  }

  // in-band points grouped by snippet index
  std::vector<std::pair<std::size_t, std::size_t>> ranges(
      static_cast<std::size_t>(plan.count), {0, 0});
  {
    const auto& pts = result.in_band.points;
    std::size_t i = 0;
    while (i < pts.size()) {
      std::size_t j = i;
      const int k = pts[i].snippet_index;
      while (j < pts.size() && pts[j].snippet_index == k) ++j;
      ranges[static_cast<std::size_t>(k)] = {i, j};
      i = j;
    }
  }

  const double radius = options.pairing_radius > 0.0 ? options.pairing_radius : eta;

  RmseBreakdown breakdown;
  double acc = 0.0;
  for (int k = 0; k < plan.count; ++k) {
    const double t = plan.centers[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < scenario.trains.size(); ++j) {
      const auto& tr = scenario.trains[j];
      const auto burst = burst_containing(tr, t);
      if (!burst) continue;
      const double truth = tr.theta + tr.if_slope() * (t - tr.burst_start(*burst));
      const int est_idx = assigned[j][static_cast<std::size_t>(*burst)];

      double estimated = std::numeric_limits<double>::quiet_NaN();
      if (options.variant == RmseVariant::peaks) {
        const auto [lo, hi] = ranges[static_cast<std::size_t>(k)];
        double best_gap = radius;
        for (std::size_t i = lo; i < hi; ++i) {
          const double gap = std::abs(result.in_band.points[i].freq - truth);
          if (gap <= best_gap) {
            best_gap = gap;
            estimated = result.in_band.points[i].freq;
          }
        }
      } else if (est_idx >= 0) {
        const auto& est = estimates[static_cast<std::size_t>(est_idx)];
        estimated = options.variant == RmseVariant::fitted_line ? est.line_at(t)
                                                                : est.nominal_line_at(t);
      } else if (options.unmatched_nearest && !estimates.empty()) {
        double best_gap = std::numeric_limits<double>::infinity();
        for (const auto& est : estimates) {
          const double v = options.variant == RmseVariant::fitted_line ? est.line_at(t)
                                                                       : est.nominal_line_at(t);
          const double gap = std::abs(v - truth);
          if (gap < best_gap) {
            best_gap = gap;
            estimated = v;
          }
        }
      }

      if (std::isnan(estimated)) {
        ++breakdown.pairs_excluded;
        continue;
      }
      const double err = (truth - estimated) / truth;
      acc += err * err;
      ++breakdown.pairs_used;
    }
  }
  if (breakdown.pairs_used == 0) return std::nullopt;
  breakdown.value = std::sqrt(acc / static_cast<double>(plan.count));
  return breakdown;
}

std::string heatmap_csv(const Scenario& scenario, const std::vector<ChirpEstimate>& estimates,
                        const MatchReport& match, const SnippetPlan& plan) {
  std::ostringstream out;
  out << "t,freq_true,freq_est,abs_residue\n";

  std::vector<std::vector<int>> assigned(scenario.trains.size());
  for (std::size_t j = 0; j < scenario.trains.size(); ++j) {
    assigned[j].assign(static_cast<std::size_t>(scenario.trains[j].burst_count), -1);
  }
  for (std::size_t b = 0; b < match.bursts.size(); ++b) {
    const auto& burst = match.bursts[b];
    assigned[static_cast<std::size_t>(burst.train)][static_cast<std::size_t>(burst.burst)] =
        match.assignment[b];
  }

  char line[160];
  for (int k = 0; k < plan.count; ++k) {
    const double t = plan.centers[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < scenario.trains.size(); ++j) {
      const auto& tr = scenario.trains[j];
      const auto burst = burst_containing(tr, t);
      if (!burst) continue;
      const int est_idx = assigned[j][static_cast<std::size_t>(*burst)];
      if (est_idx < 0) continue;
      const double truth = tr.theta + tr.if_slope() * (t - tr.burst_start(*burst));
      const double est = estimates[static_cast<std::size_t>(est_idx)].line_at(t);
      std::snprintf(line, sizeof(line), "%.9e,%.9e,%.9e,%.9e\n", t, truth, est,
                    std::abs(est - truth));
      out << line;
    }
  }
  return out.str();
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (snr_db.empty() || rate_hz.empty()) throw ConfigError("snr/rate lists must be non-empty");
  pipeline.validate();
}

TrialOutcome run_trial(const Scenario& scenario, double snr_db, double rate_hz,
                       std::uint64_t seed, const ExperimentConfig& config) {
  Scenario cell = scenario;
  cell.sample_rate = rate_hz;

  const IQRecord clean = synthesize(cell);
  const IQRecord record = add_noise(clean, NoiseSpec{snr_db, seed});

  const SnippetPlan plan =
      SnippetPlan::uniform(record, config.plan.delta, config.plan.snippets, config.plan.percentile);
  DiagramOptions options;
  options.filter = config.plan.filter;
  options.refine_peaks = config.plan.refine_peaks;

  const PipelineResult result = run_pipeline(record, plan, config.pipeline, options);
  const MatchReport match =
      match_estimates(cell, result.estimates, plan, config.overlap_min, config.if_tol);

  TrialOutcome outcome;
  outcome.detected = match.detected;
  if (auto rmse = experiment_rmse(cell, result, match, plan, config.rmse, config.pipeline.eta)) {
    outcome.rmse = rmse->value;
  }
  return outcome;
}

SweepReport run_sweep(const ExperimentConfig& config, const Scenario& scenario) {
  config.validate();
  scenario.validate();

  SweepReport report;
  for (double snr : config.snr_db) {
    for (double rate : config.rate_hz) {
      std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
      parallel_for(0, config.trials, [&](int trial) {
        const std::uint64_t seed =
            derive_seed(config.base_seed,
                        {seed_component(snr), seed_component(rate),
                         static_cast<std::uint64_t>(trial)});
        outcomes[static_cast<std::size_t>(trial)] = run_trial(scenario, snr, rate, seed, config);
      });

      SweepRow row;
      row.snr_db = snr;
      row.example = scenario.label;
      row.rate_hz = rate;
      row.total = total_bursts(scenario);

      double detected_sum = 0.0;
      std::vector<double> rmses;
      for (const auto& o : outcomes) {
        detected_sum += o.detected;
        if (o.rmse) rmses.push_back(*o.rmse);
      }
      row.detected_mean = detected_sum / static_cast<double>(config.trials);
      row.trials_ok = static_cast<int>(rmses.size());
      if (rmses.empty()) {
        row.rmse_mean = std::numeric_limits<double>::quiet_NaN();
        row.rmse_std = std::numeric_limits<double>::quiet_NaN();
        report.partial = true;
      } else {
        row.rmse_mean = mean(rmses);
        row.rmse_std = sample_std(rmses);
        if (row.trials_ok < config.trials) report.partial = true;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "snr_db,example,rate_hz,total,detected,rmse,std\n";
  char line[224];
  for (const auto& row : report.rows) {
    if (std::isnan(row.rmse_mean)) {
      std::snprintf(line, sizeof(line), "%g,%s,%g,%d,%.4f,,\n", row.snr_db, row.example.c_str(),
                    row.rate_hz, row.total, row.detected_mean);
    } else {
      std::snprintf(line, sizeof(line), "%g,%s,%g,%d,%.4f,%.6f,%.6f\n", row.snr_db,
                    row.example.c_str(), row.rate_hz, row.total, row.detected_mean, row.rmse_mean,
                    row.rmse_std);
    }
    out << line;
  }
  return out.str();
}

std::string sweep_table(const SweepReport& report) {
  std::ostringstream out;
  char line[224];
  std::snprintf(line, sizeof(line), "%8s %10s %14s %6s %9s %10s %10s\n", "snr_db", "example",
                "rate_hz", "total", "detected", "rmse", "std");
  out << line;
  for (const auto& row : report.rows) {
    if (std::isnan(row.rmse_mean)) {
      std::snprintf(line, sizeof(line), "%8g %10s %14g %6d %9.4f %10s %10s\n", row.snr_db,
                    row.example.c_str(), row.rate_hz, row.total, row.detected_mean, "-", "-");
    } else {
      std::snprintf(line, sizeof(line), "%8g %10s %14g %6d %9.4f %10.6f %10.6f\n", row.snr_db,
                    row.example.c_str(), row.rate_hz, row.total, row.detected_mean, row.rmse_mean,
                    row.rmse_std);
    }
    out << line;
  }
  return out.str();
}

}  // namespace chirpsep
