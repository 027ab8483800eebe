#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chirpsep/harness.hpp"
#include "fixtures.hpp"

using namespace chirpsep;
using chirpsep::testing::reference_scenario;

namespace {

SnippetPlan plan_of(const Scenario& s, int count) {
  IQRecord stub;
  stub.sample_rate = s.sample_rate;
  stub.t0 = 0.0;
  stub.samples.assign(static_cast<std::size_t>(s.horizon * s.sample_rate) + 1, cplx{1.0, 0.0});
  return SnippetPlan::uniform(stub, 2e-6, count);
}

// Estimates that reproduce every burst's true frequency line exactly.
std::vector<ChirpEstimate> perfect_estimates(const Scenario& s) {
  std::vector<ChirpEstimate> out;
  for (const auto& tr : s.trains) {
    for (int n = 0; n < tr.burst_count; ++n) {
      ChirpEstimate e;
      e.gamma = tr.burst_start(n);
      e.duration = tr.duration;
      e.omega = tr.theta;
      e.slope = tr.if_slope();
      e.b_param_sweep = std::abs(tr.bandwidth_param);
      e.b_param_slope = tr.bandwidth_param;
      DiagramPoint p;
      p.t = e.gamma;
      p.freq = e.omega;
      e.support = {p, p};
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("perfect estimates match every burst") {
  const Scenario s = reference_scenario();
  const SnippetPlan plan = plan_of(s, 500);
  const auto estimates = perfect_estimates(s);
  const MatchReport report = match_estimates(s, estimates, plan);
  CHECK(report.total == 12);
  CHECK(report.detected == 12);
  for (double err : report.midpoint_errors) CHECK(err <= 1e-9);
}

TEST_CASE("no estimates means nothing detected") {
  const Scenario s = reference_scenario();
  const MatchReport report = match_estimates(s, {}, plan_of(s, 100));
  CHECK(report.detected == 0);
  CHECK(report.total == 12);
}

TEST_CASE("one estimate cannot claim two bursts") {
  Scenario s;
  s.horizon = 1e-4;
  s.sample_rate = 5e8;
  s.trains = {{1.0, 1.2e9, 0.0, 2e-5, 1e-5, 5e-5, 2}};
  ChirpEstimate wide;
  wide.gamma = 1e-5;
  wide.duration = 7e-5;  // spans both bursts
  wide.omega = 1.2e9;
  wide.slope = 0.0;
  const MatchReport report = match_estimates(s, {wide}, plan_of(s, 100));
  CHECK(report.total == 2);
  CHECK(report.detected == 1);
}

TEST_CASE("an offset line is rejected by the frequency tolerance") {
  Scenario s;
  s.horizon = 1e-4;
  s.sample_rate = 5e8;
  s.trains = {{1.0, 1.2e9, 0.0, 5e-5, 1e-5, 0.0, 1}};
  auto estimates = perfect_estimates(s);
  estimates[0].omega *= 1.08;  // 8% off
  const MatchReport report = match_estimates(s, estimates, plan_of(s, 100));
  CHECK(report.detected == 0);
}

TEST_CASE("experiment rmse closed forms") {
  const Scenario s = reference_scenario();
  const SnippetPlan plan = plan_of(s, 500);
  const auto estimates = perfect_estimates(s);
  const MatchReport match = match_estimates(s, estimates, plan);

  PipelineResult result;
  result.estimates = estimates;
  result.in_band.plan = plan;
  result.in_band.sample_rate = s.sample_rate;

  RmseOptions options;
  options.variant = RmseVariant::fitted_line;
  const auto perfect = experiment_rmse(s, result, match, plan, options, 8e6);
  REQUIRE(perfect.has_value());
  CHECK(perfect->value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(perfect->pairs_excluded == 0);

  // a uniform 0.5% relative error on every active pair gives
  // 0.005 * sqrt(total pairs / D)
  auto biased = estimates;
  PipelineResult biased_result;
  for (auto& e : biased) {
    e.omega *= 1.005;
    e.slope *= 1.005;
  }
  biased_result.estimates = biased;
  biased_result.in_band = result.in_band;
  const MatchReport biased_match = match_estimates(s, biased, plan);
  REQUIRE(biased_match.detected == 12);
  const auto skewed = experiment_rmse(s, biased_result, biased_match, plan, options, 8e6);
  REQUIRE(skewed.has_value());
  const double expected = 0.005 * std::sqrt(static_cast<double>(skewed->pairs_used) /
                                            static_cast<double>(plan.count));
  CHECK(skewed->value == doctest::Approx(expected).epsilon(1e-6));

  // the reported-parameter line reads bandwidth as the full sweep, halving the
  // recovered slope on synthesized data
  RmseOptions params;
  params.variant = RmseVariant::reported_params;
  const auto nominal = experiment_rmse(s, result, match, plan, params, 8e6);
  REQUIRE(nominal.has_value());
  CHECK(nominal->value > 5e-3);

  // peaks variant with exact diagram points
  PipelineResult with_points = result;
  for (int k = 0; k < plan.count; ++k) {
    const double t = plan.centers[static_cast<std::size_t>(k)];
    for (const auto& tr : s.trains) {
      if (auto f = instantaneous_frequency(tr, t)) {
        DiagramPoint p;
        p.t = t;
        p.freq = *f;
        p.magnitude = 1.0;
        p.snippet_index = k;
        with_points.in_band.points.push_back(p);
      }
    }
  }
  RmseOptions peaks;
  peaks.variant = RmseVariant::peaks;
  const auto from_peaks = experiment_rmse(s, with_points, match, plan, peaks, 8e6);
  REQUIRE(from_peaks.has_value());
  CHECK(from_peaks->value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(from_peaks->pairs_excluded == 0);
}

TEST_CASE("sweep csv shape and determinism") {
  Scenario s;
  s.label = "t";
  s.horizon = 2e-5;
  s.sample_rate = 1e8;
  s.trains = {{1.0, 1.1e8, 2e6, 1.5e-5, 2e-6, 0.0, 1}};

  ExperimentConfig config;
  config.snr_db = {10.0, 0.0};
  config.rate_hz = {1e8};
  config.trials = 2;
  config.base_seed = 77;
  config.plan.delta = 1e-6;
  config.plan.snippets = 60;
  config.plan.percentile = 99.5;
  config.pipeline.b_rec = 3e8;
  config.pipeline.eta = 2e7;
  config.pipeline.d2 = 7;
  config.rmse.variant = RmseVariant::fitted_line;

  const SweepReport a = run_sweep(config, s);
  const SweepReport b = run_sweep(config, s);
  const std::string csv_a = sweep_csv(a);
  CHECK(csv_a == sweep_csv(b));
  CHECK(csv_a.rfind("snr_db,example,rate_hz,total,detected,rmse,std\n", 0) == 0);
  CHECK(a.rows.size() == 2);
  CHECK(a.rows[0].total == 1);
  CHECK(a.rows[0].detected_mean == doctest::Approx(1.0));
}

TEST_CASE("heatmap csv") {
  const Scenario s = reference_scenario();
  const SnippetPlan plan = plan_of(s, 200);
  const auto estimates = perfect_estimates(s);
  const MatchReport match = match_estimates(s, estimates, plan);
  const std::string csv = heatmap_csv(s, estimates, match, plan);
  CHECK(csv.rfind("t,freq_true,freq_est,abs_residue", 0) == 0);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto comma = line.rfind(',');
    CHECK(std::stod(line.substr(comma + 1)) <= 1e-6);  // perfect fit: zero residue
  }
  CHECK(rows > 0);

  const std::string empty_csv = heatmap_csv(s, {}, match_estimates(s, {}, plan), plan);
  CHECK(empty_csv == "t,freq_true,freq_est,abs_residue\n");
}
