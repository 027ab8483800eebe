#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chirpsep/kernel.hpp"
#include "chirpsep/signal.hpp"

namespace chirpsep {

// Layout of the overlapping analysis windows [t_k - delta, t_k + delta].
// Centers are snapped to the sample lattice so every window tap falls on a
// recorded sample; windows that cross the record edge are zero-extended.
struct SnippetPlan {
  double delta = 0.0;       // half-width, seconds
  int count = 0;            // number of windows (D)
  std::vector<double> centers;
  int n = 0;                // floor(sample_rate * delta)
  int grid_size = 0;        // spectrum grid resolution (G)
  double percentile = 99.0;

  // count centers equidistant over the record span.
  static SnippetPlan uniform(const IQRecord& record, double delta, int count,
                             double percentile = 99.0);

  void validate(const IQRecord& record) const;  // throws ConfigError
};

struct SnippetSpectrum {
  std::vector<cplx> values;      // on the grid x_g = -pi + 2*pi*g/G
  std::vector<double> magnitudes;
  double center = 0.0;

  int grid_size() const { return static_cast<int>(values.size()); }
  double grid_x(int g) const;
};

struct DiagramPoint {
  double t = 0.0;           // snippet center, seconds
  double lambda_hat = 0.0;  // peak location on (-pi, pi]
  double freq = 0.0;        // sample_rate * lambda_hat, rad/s
  double magnitude = 0.0;   // peak |spectrum|
  int snippet_index = 0;
};

struct Diagram {
  std::vector<DiagramPoint> points;  // sorted by (snippet_index, freq)
  SnippetPlan plan;
  double sample_rate = 0.0;

  double center_spacing() const;  // typical gap between consecutive centers
};

// Weighted spectral transform of one window: per grid point,
// norm * sum_{|l|<n} H(|l|/n) F(t_k - l/R) e^{ilx}, computed with a
// zero-padded FFT. The direct variant evaluates the sum literally and exists
// as an independent cross-check of the FFT path.
SnippetSpectrum snippet_spectrum(const IQRecord& record, double center, const SnippetPlan& plan,
                                 const KernelSpec& kernel);
SnippetSpectrum snippet_spectrum_direct(const IQRecord& record, double center,
                                        const SnippetPlan& plan, const KernelSpec& kernel);

// q-th percentile of the magnitudes, linear interpolation between order
// statistics.
double percentile_threshold(const SnippetSpectrum& spectrum, double percentile);

// Maximal groups of above-threshold grid indices; adjacent runs closer than
// (eta / sample_rate) / 2 radians merge. Grouping is circular across the
// +-pi seam. Each group lists its grid indices in circular order.
std::vector<std::vector<int>> superlevel_partition(const SnippetSpectrum& spectrum, double tau,
                                                   double eta, double sample_rate);

// One point per group at the magnitude argmax (ties toward the smallest grid
// index). refine enables 3-point parabolic interpolation of the peak
// location within one grid cell.
std::vector<DiagramPoint> snippet_peaks(const SnippetSpectrum& spectrum,
                                        const std::vector<std::vector<int>>& groups,
                                        double sample_rate, int snippet_index, bool refine = true);

struct DiagramOptions {
  FilterKind filter = FilterKind::smooth_bump;
  bool refine_peaks = true;
};

// Peak extraction over all snippets. Snippets are processed concurrently;
// output ordering is deterministic (merge by snippet index).
Diagram build_diagram(const IQRecord& record, const SnippetPlan& plan, double eta,
                      const DiagramOptions& options = {});

// Scenario-derived quantities used by the plan advisories.
struct PlanDiagnostics {
  double m_lower = 0.0;     // smallest component amplitude
  double M_total = 0.0;     // largest total active amplitude
  double eta = 0.0;         // minimal frequency separation, rad/s
  double C_const = 0.0;     // (16 * M * L / m)^(1/S)
  double delta_prob = 0.05;
  double alpha = 0.0;       // largest relative frequency Lipschitz constant
  double V = 0.0;           // noise scale, when known
  double max_abs_if = 0.0;  // largest |frequency| over active bursts
};

PlanDiagnostics plan_diagnostics(const Scenario& scenario, const SnippetPlan& plan,
                                 FilterKind filter, double delta_prob = 0.05, double noise_v = 0.0);

// Advisory strings; never blocks execution.
std::vector<std::string> validate_plan(const SnippetPlan& plan, const PlanDiagnostics& diag,
                                       double sample_rate);

struct NoiseFloorSummary {
  double mean_max = 0.0;
  double p95_max = 0.0;
};

// Distribution of max |weighted noise spectrum| over pure-noise windows with
// per-component deviation v.
NoiseFloorSummary noise_floor_probe(int n, double v, int trials, std::uint64_t seed,
                                    FilterKind filter = FilterKind::smooth_bump);

}  // namespace chirpsep
