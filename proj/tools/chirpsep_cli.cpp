// Command-line front end: synthesize scenarios, extract peak diagrams, run
// the full separation pipeline, score estimates against ground truth, and
// sweep (snr, rate) grids.
//
// Exit codes: 0 success, 2 configuration error, 3 no signal detected,
// 4 partial failure (some sweep cells missing).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "chirpsep/chirpsep.hpp"
#include "chirpsep/parallel.hpp"
#include "chirpsep/rng.hpp"

namespace {

using namespace chirpsep;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoSignal = 3;
constexpr int kExitPartial = 4;

struct PlanFlags {
  double delta = 2e-6;
  int snippets = 2500;
  double percentile = 99.0;
  bool no_interp = false;
  std::string filter = "smooth";
};

void add_plan_flags(CLI::App* cmd, PlanFlags& flags) {
  cmd->add_option("--delta", flags.delta, "Snippet half-width in seconds");
  cmd->add_option("--snippets", flags.snippets, "Number of snippet centers (D)");
  cmd->add_option("--grid", flags.percentile,
                  "Ignored compatibility alias; grid size follows the snippet order")
      ->group("");
  cmd->add_option("--percentile", flags.percentile, "Per-snippet threshold percentile");
  cmd->add_flag("--no-interp", flags.no_interp, "Disable parabolic peak refinement");
  cmd->add_option("--filter", flags.filter, "Taper kind: smooth|cosine")
      ->check(CLI::IsMember({"smooth", "cosine"}));
}

struct PipelineFlags {
  std::optional<double> b_rec;
  std::optional<double> eta;
  std::optional<int> d1;
  std::optional<int> d2;
  std::optional<int> m_parts;
  double rmse_gate = 0.01;
  double keep_fraction = 0.5;
  double merge_tol = 0.10;
  bool alg3_raw_d2 = false;
  bool merge_average = false;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
  cmd->add_option("--b-rec", flags.b_rec, "Receiver bandwidth, rad/s");
  cmd->add_option("--eta", flags.eta, "Minimal frequency separation, rad/s");
  cmd->add_option("--d1", flags.d1, "Band-filter min neighbors (default D/2)");
  cmd->add_option("--d2", flags.d2, "Component min neighbors");
  cmd->add_option("--m-parts", flags.m_parts, "Crossover partitions");
  cmd->add_option("--rmse-gate", flags.rmse_gate, "Residue gate fraction of mean frequency");
  cmd->add_option("--keep-fraction", flags.keep_fraction, "Regression subset fraction");
  cmd->add_option("--merge-tol", flags.merge_tol, "Segment merge tolerance");
  cmd->add_flag("--alg3-raw-d2", flags.alg3_raw_d2,
                "Keep d2 unscaled inside crossover partitions");
  cmd->add_flag("--merge-average", flags.merge_average,
                "Average agreeing segments instead of refitting");
}

PipelineConfig resolve_pipeline(const PipelineFlags& flags, const AnalysisDefaults& defaults) {
  PipelineConfig cfg;
  if (flags.b_rec) {
    cfg.b_rec = *flags.b_rec;
  } else if (defaults.b_rec) {
    cfg.b_rec = *defaults.b_rec;
  } else {
    throw ConfigError("receiver bandwidth required: pass --b-rec or add scenario tuning");
  }
  if (flags.eta) {
    cfg.eta = *flags.eta;
  } else if (defaults.eta) {
    cfg.eta = *defaults.eta;
  } else {
    throw ConfigError("minimal separation required: pass --eta or add scenario tuning");
  }
  cfg.d1 = flags.d1.value_or(defaults.d1.value_or(0));
  cfg.d2 = flags.d2.value_or(defaults.d2.value_or(cfg.d2));
  cfg.m_parts = flags.m_parts.value_or(defaults.m_parts.value_or(cfg.m_parts));
  cfg.rmse_gate_fraction = flags.rmse_gate;
  cfg.regression_keep_fraction = flags.keep_fraction;
  cfg.merge_tolerance = flags.merge_tol;
  cfg.crossover_unscaled_min_neighbors = flags.alg3_raw_d2;
  cfg.merge_by_averaging = flags.merge_average;
  return cfg;
}

SnippetPlan resolve_plan(const IQRecord& record, const PlanFlags& flags,
                         const AnalysisDefaults& defaults, bool prefer_defaults) {
  const double delta = prefer_defaults ? defaults.delta.value_or(flags.delta) : flags.delta;
  const int snippets = prefer_defaults ? defaults.snippets.value_or(flags.snippets) : flags.snippets;
  const double pct = prefer_defaults ? defaults.percentile.value_or(flags.percentile)
                                     : flags.percentile;
  return SnippetPlan::uniform(record, delta, snippets, pct);
}

void print_frequencies_note(bool hz) {
  if (hz) std::cout << "# frequencies shown in Hz\n";
}

double shown(double rad_s, bool hz) { return hz ? rad_s / (2.0 * std::numbers::pi) : rad_s; }

int cmd_gen(const std::string& scenario_path, const std::string& out_path, double snr_db,
            std::uint64_t seed, std::optional<double> rate) {
  auto file = load_scenario(scenario_path);
  if (rate) file.scenario.sample_rate = *rate;
  for (const auto& warning : scenario_warnings(file.scenario)) {
    std::cerr << "warning: " << warning << "\n";
  }
  IQRecord record = synthesize(file.scenario);
  if (std::isfinite(snr_db)) record = add_noise(record, NoiseSpec{snr_db, seed});
  save_iq(out_path, record);
  std::cout << "wrote " << record.samples.size() << " samples to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chirpsep: pulsed linear-chirp separation from complex IQ records"};
  app.require_subcommand(1);

  // gen --------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Synthesize a scenario into an IQ file");
  std::string gen_scenario, gen_out = "out.iq";
  double gen_snr = std::numeric_limits<double>::infinity();
  std::uint64_t gen_seed = 1;
  std::optional<double> gen_rate;
  gen->add_option("scenario", gen_scenario, "Scenario JSON path")->required();
  gen->add_option("-o,--out", gen_out, "Output path (.csv for text, else binary)");
  gen->add_option("--snr", gen_snr, "SNR in dB (omit for a clean record)");
  gen->add_option("--seed", gen_seed, "Noise seed");
  gen->add_option("--rate", gen_rate, "Override sample rate in Hz");

  // diagram ----------------------------------------------------------------
  auto* diagram_cmd = app.add_subcommand("diagram", "Extract the peak diagram from an IQ file");
  std::string dia_iq, dia_out = "-", dia_scenario;
  PlanFlags dia_plan;
  std::optional<double> dia_eta;
  bool dia_hz = false;
  diagram_cmd->add_option("iq", dia_iq, "IQ file")->required();
  diagram_cmd->add_option("-o,--out", dia_out, "Diagram CSV path or - for stdout");
  diagram_cmd->add_option("--scenario", dia_scenario, "Scenario JSON providing tuning defaults");
  diagram_cmd->add_option("--eta", dia_eta, "Minimal frequency separation, rad/s");
  diagram_cmd->add_flag("--hz", dia_hz, "Display frequencies in Hz");
  add_plan_flags(diagram_cmd, dia_plan);

  // analyze ----------------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "Run the separation pipeline on an IQ file");
  std::string ana_iq, ana_out = "-", ana_scenario, ana_diagram_out;
  PlanFlags ana_plan;
  PipelineFlags ana_pipe;
  bool ana_hz = false;
  analyze->add_option("iq", ana_iq, "IQ file")->required();
  analyze->add_option("-o,--out", ana_out, "Estimates CSV path or - for stdout");
  analyze->add_option("--scenario", ana_scenario,
                      "Scenario JSON providing tuning defaults and plan advisories");
  analyze->add_option("--diagram-out", ana_diagram_out, "Also write the in-band diagram CSV");
  analyze->add_flag("--hz", ana_hz, "Display frequencies in Hz");
  add_plan_flags(analyze, ana_plan);
  add_pipeline_flags(analyze, ana_pipe);

  // eval -------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Score estimates against scenario ground truth");
  std::string eval_estimates, eval_scenario, eval_diagram, eval_heatmap;
  PlanFlags eval_plan;
  std::string eval_variant = "line";
  bool eval_unmatched_nearest = false;
  double eval_pairing_radius = 0.0;
  double eval_overlap = 0.5, eval_iftol = 0.05;
  std::optional<double> eval_eta;
  eval->add_option("estimates", eval_estimates, "Estimates CSV")->required();
  eval->add_option("scenario", eval_scenario, "Scenario JSON")->required();
  eval->add_option("--diagram", eval_diagram, "In-band diagram CSV (enables the peaks variant)");
  eval->add_option("--heatmap-out", eval_heatmap, "Write t,freq_true,freq_est,abs_residue CSV");
  eval->add_option("--rmse-variant", eval_variant, "line|params|peaks")
      ->check(CLI::IsMember({"line", "params", "peaks"}));
  eval->add_flag("--rmse-unmatched-nearest", eval_unmatched_nearest,
                 "Score unmatched bursts against the nearest estimate");
  eval->add_option("--pairing-radius", eval_pairing_radius,
                   "Peak pairing radius, rad/s (default eta)");
  eval->add_option("--overlap-min", eval_overlap, "Detection overlap fraction");
  eval->add_option("--if-tol", eval_iftol, "Detection frequency tolerance (relative)");
  eval->add_option("--eta", eval_eta, "Minimal separation, rad/s");
  add_plan_flags(eval, eval_plan);

  // sweep ------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run a (snr, rate) grid from a config file");
  std::string sweep_config, sweep_out = "-";
  bool sweep_quiet = false;
  sweep->add_option("config", sweep_config, "Sweep config JSON")->required();
  sweep->add_option("-o,--out", sweep_out, "Report CSV path or - for stdout");
  sweep->add_flag("--quiet", sweep_quiet, "Suppress the human-readable table");

  // probe-noise ------------------------------------------------------------
  auto* probe = app.add_subcommand("probe-noise", "Noise-floor scaling of the window transform");
  std::vector<int> probe_n{256, 1024, 4096, 16384};
  double probe_v = 1.0;
  int probe_trials = 256;
  std::uint64_t probe_seed = 1;
  std::string probe_filter = "smooth";
  probe->add_option("--n", probe_n, "Window orders to probe");
  probe->add_option("--v", probe_v, "Per-component noise deviation");
  probe->add_option("--trials", probe_trials, "Monte-Carlo windows per order");
  probe->add_option("--seed", probe_seed, "Seed");
  probe->add_option("--filter", probe_filter, "Taper kind: smooth|cosine")
      ->check(CLI::IsMember({"smooth", "cosine"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_scenario, gen_out, gen_snr, gen_seed, gen_rate);
    }

    if (diagram_cmd->parsed()) {
      AnalysisDefaults defaults;
      if (!dia_scenario.empty()) defaults = load_scenario(dia_scenario).defaults;
      const double eta = dia_eta.value_or(defaults.eta.value_or(0.0));
      if (!(eta > 0.0)) throw ConfigError("minimal separation required: pass --eta");
      const IQRecord record = load_iq(dia_iq);
      const SnippetPlan plan = resolve_plan(record, dia_plan, defaults, false);
      DiagramOptions options;
      options.filter = filter_from_name(dia_plan.filter);
      options.refine_peaks = !dia_plan.no_interp;
      const Diagram diagram = build_diagram(record, plan, eta, options);
      if (dia_out == "-") {
        print_frequencies_note(dia_hz);
        write_diagram_csv(std::cout, diagram);
      } else {
        std::ofstream out(dia_out);
        if (!out) throw ConfigError("cannot write " + dia_out);
        write_diagram_csv(out, diagram);
      }
      return kExitOk;
    }

    if (analyze->parsed()) {
      AnalysisDefaults defaults;
      std::optional<ScenarioFile> scenario_file;
      if (!ana_scenario.empty()) {
        scenario_file = load_scenario(ana_scenario);
        defaults = scenario_file->defaults;
      }
      const IQRecord record = load_iq(ana_iq);
      const SnippetPlan plan = resolve_plan(record, ana_plan, defaults, false);
      const PipelineConfig cfg = resolve_pipeline(ana_pipe, defaults);
      DiagramOptions options;
      options.filter = filter_from_name(ana_plan.filter);
      options.refine_peaks = !ana_plan.no_interp;

      if (scenario_file) {
        const auto diag = plan_diagnostics(scenario_file->scenario, plan, options.filter);
        for (const auto& advisory : validate_plan(plan, diag, record.sample_rate)) {
          std::cerr << "advisory: " << advisory << "\n";
        }
      }

      const PipelineResult result = run_pipeline(record, plan, cfg, options);
      for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
      if (!ana_diagram_out.empty()) {
        std::ofstream out(ana_diagram_out);
        if (!out) throw ConfigError("cannot write " + ana_diagram_out);
        write_diagram_csv(out, result.in_band);
      }
      if (ana_out == "-") {
        print_frequencies_note(ana_hz);
        if (ana_hz) {
          for (const auto& e : result.estimates) {
            std::printf("gamma=%.6e duration=%.6e omega=%.6e slope=%.6e rmse=%.6e\n", e.gamma,
                        e.duration, shown(e.omega, true), shown(e.slope, true),
                        shown(e.rmse_p, true));
          }
        } else {
          write_estimates_csv(std::cout, result.estimates);
        }
      } else {
        std::ofstream out(ana_out);
        if (!out) throw ConfigError("cannot write " + ana_out);
        write_estimates_csv(out, result.estimates);
      }
      return result.estimates.empty() ? kExitNoSignal : kExitOk;
    }

    if (eval->parsed()) {
      const ScenarioFile sf = load_scenario(eval_scenario);
      std::ifstream est_in(eval_estimates);
      if (!est_in) throw ConfigError("cannot open " + eval_estimates);
      const auto estimates = read_estimates_csv(est_in);

      // The plan is reconstructed from flags over a synthetic record so that
      // snippet centers match the analysis run.
      Scenario scenario = sf.scenario;
      const IQRecord reference = synthesize(scenario);
      const SnippetPlan plan = resolve_plan(reference, eval_plan, sf.defaults, true);

      const MatchReport match =
          match_estimates(scenario, estimates, plan, eval_overlap, eval_iftol);

      PipelineResult result;
      result.estimates = estimates;
      result.in_band.plan = plan;
      result.in_band.sample_rate = scenario.sample_rate;
      if (!eval_diagram.empty()) {
        std::ifstream dia_in(eval_diagram);
        if (!dia_in) throw ConfigError("cannot open " + eval_diagram);
        result.in_band.points = read_diagram_points_csv(dia_in);
      } else if (eval_variant == "peaks") {
        throw ConfigError("--rmse-variant peaks needs --diagram");
      }

      RmseOptions rmse_options;
      rmse_options.variant = rmse_variant_from_name(eval_variant);
      rmse_options.unmatched_nearest = eval_unmatched_nearest;
      rmse_options.pairing_radius = eval_pairing_radius;
      const double eta = eval_eta.value_or(sf.defaults.eta.value_or(0.0));

      std::printf("detected %d of %d bursts\n", match.detected, match.total);
      for (std::size_t b = 0; b < match.bursts.size(); ++b) {
        const auto& burst = match.bursts[b];
        std::printf("  train %d burst %d [%.3e, %.3e]: %s\n", burst.train + 1, burst.burst,
                    burst.start, burst.start + burst.duration,
                    match.assignment[b] >= 0
                        ? ("estimate " + std::to_string(match.assignment[b] + 1) +
                           " (rel err " + std::to_string(match.midpoint_errors[b]) + ")")
                              .c_str()
                        : "unmatched");
      }
      if (const auto rmse =
              experiment_rmse(scenario, result, match, plan, rmse_options, eta)) {
        std::printf("rmse (%s): %.6f over %d pairs (%d excluded)\n", eval_variant.c_str(),
                    rmse->value, rmse->pairs_used, rmse->pairs_excluded);
      } else {
        std::printf("rmse (%s): undefined (no matched pulses)\n", eval_variant.c_str());
      }
      if (!eval_heatmap.empty()) {
        std::ofstream out(eval_heatmap);
        if (!out) throw ConfigError("cannot write " + eval_heatmap);
        out << heatmap_csv(scenario, estimates, match, plan);
      }
      return match.detected > 0 ? kExitOk : kExitNoSignal;
    }

    if (sweep->parsed()) {
      const ResolvedExperiment exp = load_experiment(sweep_config);
      const SweepReport report = run_sweep(exp.config, exp.scenario);
      const std::string csv = sweep_csv(report);
      if (sweep_out == "-") {
        std::cout << csv;
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw ConfigError("cannot write " + sweep_out);
        out << csv;
      }
      if (!sweep_quiet) std::cerr << sweep_table(report);
      return report.partial ? kExitPartial : kExitOk;
    }

    if (probe->parsed()) {
      const FilterKind kind = filter_from_name(probe_filter);
      std::printf("%8s %14s %14s\n", "n", "mean_max", "p95_max");
      std::vector<double> log_n, log_mean;
      for (int n : probe_n) {
        const auto summary = noise_floor_probe(n, probe_v, probe_trials, probe_seed, kind);
        std::printf("%8d %14.6e %14.6e\n", n, summary.mean_max, summary.p95_max);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_mean.push_back(std::log(summary.mean_max));
      }
      if (log_n.size() >= 2) {
        double nm = 0, mm = 0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
          nm += log_n[i];
          mm += log_mean[i];
        }
        nm /= static_cast<double>(log_n.size());
        mm /= static_cast<double>(log_n.size());
        double num = 0, den = 0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
          num += (log_n[i] - nm) * (log_mean[i] - mm);
          den += (log_n[i] - nm) * (log_n[i] - nm);
        }
        std::printf("log-log slope: %.4f\n", num / den);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoSignalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoSignal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
