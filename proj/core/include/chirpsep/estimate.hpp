#pragma once

#include <string>
#include <vector>

#include "chirpsep/dbscan.hpp"
#include "chirpsep/snippet.hpp"

namespace chirpsep {

struct PipelineConfig {
  double b_rec = 0.0;  // receiver bandwidth, rad/s
  double eta = 0.0;    // minimal frequency separation, rad/s

  int d1 = 0;  // band-filter min neighbors; 0 means snippet_count / 2
  // Component min neighbors. With time-scaled axes a clean track interior
  // point has 9 eps-neighbors, so the default must stay below that; see
  // band_min_neighbors for the band-selection default.
  int d2 = 7;
  int m_parts = 8;  // crossover partitions

  double rmse_gate_fraction = 0.01;
  double regression_keep_fraction = 0.5;
  double merge_tolerance = 0.10;

  bool crossover_unscaled_min_neighbors = false;  // keep d2 unscaled inside partitions
  bool merge_by_averaging = false;                // average agreeing segments instead of refitting

  int band_min_neighbors(int snippet_count) const {
    return d1 > 0 ? d1 : std::max(1, snippet_count / 2);
  }

  void validate() const;  // throws ConfigError
};

// A fitted linear-frequency segment. omega is the fitted line at t = gamma;
// slope is the regression slope. b_param_sweep = (max freq - min freq) / 2
// and b_param_slope = slope * duration / 2 are the two bandwidth readings.
struct ChirpEstimate {
  double gamma = 0.0;
  double duration = 0.0;
  double omega = 0.0;
  double slope = 0.0;
  double b_param_sweep = 0.0;
  double b_param_slope = 0.0;
  double rmse_p = 0.0;
  std::vector<DiagramPoint> support;

  double line_at(double t) const { return omega + slope * (t - gamma); }
  // Frequency line under the reported-parameter convention, with slope
  // b_param_sweep / duration.
  double nominal_line_at(double t) const {
    return duration > 0.0 ? omega + b_param_sweep / duration * (t - gamma) : omega;
  }
};

// Keeps points that cluster in frequency alone (eps = b_rec, min = d1);
// throws NoSignalError when nothing survives.
Diagram band_select(const Diagram& diagram, const PipelineConfig& cfg);

// Splits the in-band diagram into track clusters on time-scaled axes
// (eps = eta, min = d2); throws NoSignalError when no cluster forms.
std::vector<std::vector<DiagramPoint>> component_clusters(const Diagram& diagram,
                                                          const PipelineConfig& cfg);

// Least-squares line through the regression_keep_fraction of points with the
// highest magnitude (ties by ascending snippet index). Throws
// std::invalid_argument when the cluster has fewer than two distinct times.
ChirpEstimate fit_component(const std::vector<DiagramPoint>& cluster, const PipelineConfig& cfg,
                            int snippet_count);

// sqrt((1/D) * sum |freq - line|^2) over the cluster, D = snippet_count.
double residue_rmse(const std::vector<DiagramPoint>& cluster, const ChirpEstimate& estimate,
                    int snippet_count);

// Gate threshold: rmse_gate_fraction * |mean cluster frequency|.
double rmse_gate(const std::vector<DiagramPoint>& cluster, const PipelineConfig& cfg);

// Transitive merge of segments whose slopes and line values at the shared
// midpoint agree within merge_tolerance; merged segments are refit on the
// union of their supports (or averaged, per config).
std::vector<ChirpEstimate> merge_collinear(const std::vector<ChirpEstimate>& estimates,
                                           const PipelineConfig& cfg, int snippet_count);

// Crossover resolution for a cluster that failed the rmse gate: partition the
// cluster's time extent into m_parts, re-cluster and fit each part, gate the
// sub-fits, then merge agreeing segments. Merged outputs must be supported by
// at least two segments and pass a per-point residue gate.
std::vector<ChirpEstimate> refine_crossover(const std::vector<DiagramPoint>& cluster,
                                            const PipelineConfig& cfg, const SnippetPlan& plan,
                                            double center_spacing);

struct PipelineResult {
  std::vector<ChirpEstimate> estimates;  // sorted by gamma
  Diagram diagram;                       // raw peak diagram
  Diagram in_band;                       // after band selection
  std::vector<std::string> notes;        // per-cluster failures, empty-band note
};

PipelineResult run_pipeline(const IQRecord& record, const SnippetPlan& plan,
                            const PipelineConfig& cfg, const DiagramOptions& options = {});

}  // namespace chirpsep
