#include "chirpsep/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "chirpsep/errors.hpp"

namespace chirpsep {

namespace {

double cluster_mean_freq(const std::vector<DiagramPoint>& cluster) {
  double s = 0.0;
  for (const auto& p : cluster) s += p.freq;
  return s / static_cast<double>(cluster.size());
}

struct TimeSpan {
  double lo;
  double hi;
};

TimeSpan time_span(const std::vector<DiagramPoint>& cluster) {
  TimeSpan span{cluster.front().t, cluster.front().t};
  for (const auto& p : cluster) {
    span.lo = std::min(span.lo, p.t);
    span.hi = std::max(span.hi, p.t);
  }
  return span;
}

// Two segments describe the same line when their slopes agree relative to
// their size (or the slope gap stays below the separation resolution over the
// union span) and the extrapolated lines meet at the union midpoint.
bool segments_agree(const ChirpEstimate& a, const ChirpEstimate& b, const PipelineConfig& cfg) {
  const double lo = std::min(a.gamma, b.gamma);
  const double hi = std::max(a.gamma + a.duration, b.gamma + b.duration);
  const double span = hi - lo;
  const double slope_gap = std::abs(a.slope - b.slope);
  const bool slopes_ok =
      slope_gap <= cfg.merge_tolerance * std::max(std::abs(a.slope), std::abs(b.slope)) ||
      slope_gap * span <= cfg.merge_tolerance * cfg.eta;
  if (!slopes_ok) return false;

  const double mid = 0.5 * (lo + hi);
  const double va = a.line_at(mid);
  const double vb = b.line_at(mid);
  return std::abs(va - vb) <= cfg.merge_tolerance * std::max(std::abs(va), std::abs(vb));
}

std::vector<std::vector<int>> agreement_groups(const std::vector<ChirpEstimate>& estimates,
                                               const PipelineConfig& cfg) {
  const int count = static_cast<int>(estimates.size());
  std::vector<int> parent(static_cast<std::size_t>(count));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (segments_agree(estimates[static_cast<std::size_t>(i)],
                         estimates[static_cast<std::size_t>(j)], cfg)) {
        parent[static_cast<std::size_t>(find(j))] = find(i);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of(static_cast<std::size_t>(count), -1);
  for (int i = 0; i < count; ++i) {
    const int root = find(i);
    if (group_of[static_cast<std::size_t>(root)] < 0) {
      group_of[static_cast<std::size_t>(root)] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(root)])].push_back(i);
  }
  return groups;
}

std::vector<DiagramPoint> union_support(const std::vector<ChirpEstimate>& estimates,
                                        const std::vector<int>& members) {
  std::vector<DiagramPoint> pts;
  for (int m : members) {
    const auto& sup = estimates[static_cast<std::size_t>(m)].support;
    pts.insert(pts.end(), sup.begin(), sup.end());
  }
  std::sort(pts.begin(), pts.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
    return std::tie(a.snippet_index, a.freq) < std::tie(b.snippet_index, b.freq);
  });
  return pts;
}

ChirpEstimate average_segments(const std::vector<ChirpEstimate>& estimates,
                               const std::vector<int>& members, int snippet_count) {
  auto pts = union_support(estimates, members);
  const auto span = time_span(pts);
  const double mid = 0.5 * (span.lo + span.hi);

  double slope = 0.0;
  double value_mid = 0.0;
  for (int m : members) {
    slope += estimates[static_cast<std::size_t>(m)].slope;
    value_mid += estimates[static_cast<std::size_t>(m)].line_at(mid);
  }
  slope /= static_cast<double>(members.size());
  value_mid /= static_cast<double>(members.size());

  ChirpEstimate out;
  out.gamma = span.lo;
  out.duration = span.hi - span.lo;
  out.slope = slope;
  out.omega = value_mid - slope * (mid - span.lo);
  double fmin = pts.front().freq, fmax = pts.front().freq;
  for (const auto& p : pts) {
    fmin = std::min(fmin, p.freq);
    fmax = std::max(fmax, p.freq);
  }
  out.b_param_sweep = 0.5 * (fmax - fmin);
  out.b_param_slope = 0.5 * slope * out.duration;
  out.support = std::move(pts);
  out.rmse_p = residue_rmse(out.support, out, snippet_count);
  return out;
}

double per_point_rmse(const std::vector<DiagramPoint>& cluster, const ChirpEstimate& estimate) {
  double acc = 0.0;
  for (const auto& p : cluster) {
    const double r = p.freq - estimate.line_at(p.t);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(cluster.size()));
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(b_rec > 0.0)) throw ConfigError("b_rec must be positive");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (d1 < 0 || d2 < 1 || m_parts < 1) throw ConfigError("neighbor/partition counts invalid");
  if (!(rmse_gate_fraction > 0.0 && rmse_gate_fraction <= 1.0)) {
    throw ConfigError("rmse_gate_fraction must be in (0,1]");
  }
  if (!(regression_keep_fraction > 0.0 && regression_keep_fraction <= 1.0)) {
    throw ConfigError("regression_keep_fraction must be in (0,1]");
  }
  if (!(merge_tolerance > 0.0 && merge_tolerance <= 1.0)) {
    throw ConfigError("merge_tolerance must be in (0,1]");
  }
}

Diagram band_select(const Diagram& diagram, const PipelineConfig& cfg) {
  if (diagram.points.empty()) throw NoSignalError("empty diagram");
  const auto coords = scale_axes(diagram, AxisMode::freq_only);
  const auto labeled = dbscan(coords, cfg.b_rec, cfg.band_min_neighbors(diagram.plan.count));

  Diagram out;
  out.plan = diagram.plan;
  out.sample_rate = diagram.sample_rate;
  for (std::size_t i = 0; i < diagram.points.size(); ++i) {
    if (labeled.labels[i] > 0) out.points.push_back(diagram.points[i]);
  }
  if (out.points.empty()) throw NoSignalError("no in-band signal");
  return out;
}

std::vector<std::vector<DiagramPoint>> component_clusters(const Diagram& diagram,
                                                          const PipelineConfig& cfg) {
  if (diagram.points.empty()) throw NoSignalError("empty diagram");
  const auto coords = scale_axes(diagram, AxisMode::time_freq, cfg.eta);
  const auto labeled = dbscan(coords, cfg.eta, cfg.d2);
  if (labeled.cluster_count == 0) throw NoSignalError("no component clusters");

  std::vector<std::vector<DiagramPoint>> clusters(
      static_cast<std::size_t>(labeled.cluster_count));
  for (std::size_t i = 0; i < diagram.points.size(); ++i) {
    const int label = labeled.labels[i];
    if (label > 0) clusters[static_cast<std::size_t>(label - 1)].push_back(diagram.points[i]);
  }
  return clusters;
}

ChirpEstimate fit_component(const std::vector<DiagramPoint>& cluster, const PipelineConfig& cfg,
                            int snippet_count) {
  if (cluster.size() < 2) throw std::invalid_argument("cluster too short");
  const auto span = time_span(cluster);
  if (!(span.hi > span.lo)) throw std::invalid_argument("cluster too short");

  // Regression subset: ceil(keep * size) points of highest magnitude, ties by
  // ascending snippet index.
  std::vector<int> order(cluster.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = cluster[static_cast<std::size_t>(a)];
    const auto& pb = cluster[static_cast<std::size_t>(b)];
    if (pa.magnitude != pb.magnitude) return pa.magnitude > pb.magnitude;
    if (pa.snippet_index != pb.snippet_index) return pa.snippet_index < pb.snippet_index;
    return pa.freq < pb.freq;
  });
  auto keep = static_cast<std::size_t>(
      std::ceil(cfg.regression_keep_fraction * static_cast<double>(cluster.size())));
  keep = std::clamp<std::size_t>(keep, 2, cluster.size());

  std::vector<const DiagramPoint*> fit_pts;
  fit_pts.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    fit_pts.push_back(&cluster[static_cast<std::size_t>(order[i])]);
  }
  // The kept subset can collapse to one instant; fall back to the full cluster.
  {
    bool distinct = false;
    for (std::size_t i = 1; i < fit_pts.size(); ++i) {
      if (fit_pts[i]->t != fit_pts[0]->t) {
        distinct = true;
        break;
      }
    }
    if (!distinct) {
      fit_pts.clear();
      for (const auto& p : cluster) fit_pts.push_back(&p);
    }
  }

  double t_mean = 0.0, f_mean = 0.0;
  for (const auto* p : fit_pts) {
    t_mean += p->t;
    f_mean += p->freq;
  }
  t_mean /= static_cast<double>(fit_pts.size());
  f_mean /= static_cast<double>(fit_pts.size());
  double stt = 0.0, stf = 0.0;
  for (const auto* p : fit_pts) {
    const double dt = p->t - t_mean;
    stt += dt * dt;
    stf += dt * (p->freq - f_mean);
  }
  const double slope = stt > 0.0 ? stf / stt : 0.0;

  ChirpEstimate est;
  est.gamma = span.lo;
  est.duration = span.hi - span.lo;
  est.slope = slope;
  est.omega = f_mean + slope * (span.lo - t_mean);
  double fmin = cluster.front().freq, fmax = cluster.front().freq;
  for (const auto& p : cluster) {
    fmin = std::min(fmin, p.freq);
    fmax = std::max(fmax, p.freq);
  }
  est.b_param_sweep = 0.5 * (fmax - fmin);
  est.b_param_slope = 0.5 * slope * est.duration;
  est.support = cluster;
  est.rmse_p = residue_rmse(cluster, est, snippet_count);
  return est;
}

double residue_rmse(const std::vector<DiagramPoint>& cluster, const ChirpEstimate& estimate,
                    int snippet_count) {
  double acc = 0.0;
  for (const auto& p : cluster) {
    const double r = p.freq - estimate.line_at(p.t);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(snippet_count));
}

double rmse_gate(const std::vector<DiagramPoint>& cluster, const PipelineConfig& cfg) {
  return cfg.rmse_gate_fraction * std::abs(cluster_mean_freq(cluster));
}

std::vector<ChirpEstimate> merge_collinear(const std::vector<ChirpEstimate>& estimates,
                                           const PipelineConfig& cfg, int snippet_count) {
  if (estimates.empty()) return {};
  const auto groups = agreement_groups(estimates, cfg);

  std::vector<ChirpEstimate> out;
  out.reserve(groups.size());
  for (const auto& members : groups) {
    if (members.size() == 1) {
      out.push_back(estimates[static_cast<std::size_t>(members.front())]);
      continue;
    }
    if (cfg.merge_by_averaging) {
      out.push_back(average_segments(estimates, members, snippet_count));
    } else {
      out.push_back(fit_component(union_support(estimates, members), cfg, snippet_count));
    }
  }
  return out;
}

std::vector<ChirpEstimate> refine_crossover(const std::vector<DiagramPoint>& cluster,
                                            const PipelineConfig& cfg, const SnippetPlan& plan,
                                            double center_spacing) {
  const auto span = time_span(cluster);
  const double width = (span.hi - span.lo) / cfg.m_parts;
  if (!(width > 0.0)) return {};
  const int sub_min_neighbors =
      cfg.crossover_unscaled_min_neighbors ? cfg.d2 : std::max(2, cfg.d2 / cfg.m_parts);
  const double time_scale = (cfg.eta / 4.0) / center_spacing;

  std::vector<ChirpEstimate> segments;
  std::vector<int> segment_part;
  for (int m = 0; m < cfg.m_parts; ++m) {
    const double lo = span.lo + m * width;
    const double hi = m + 1 == cfg.m_parts ? span.hi : lo + width;
    std::vector<DiagramPoint> part;
    for (const auto& p : cluster) {
      if (p.t >= lo && (p.t < hi || (m + 1 == cfg.m_parts && p.t <= hi))) part.push_back(p);
    }
    if (part.size() < 2) continue;

    std::vector<std::array<double, 2>> coords;
    coords.reserve(part.size());
    for (const auto& p : part) coords.push_back({p.t * time_scale, p.freq});
    const auto labeled = dbscan(coords, cfg.eta, sub_min_neighbors);

    for (int label = 1; label <= labeled.cluster_count; ++label) {
      std::vector<DiagramPoint> sub;
      for (std::size_t i = 0; i < part.size(); ++i) {
        if (labeled.labels[i] == label) sub.push_back(part[i]);
      }
      if (sub.size() < 2) continue;
      ChirpEstimate est;
      try {
        est = fit_component(sub, cfg, plan.count);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (est.rmse_p > rmse_gate(sub, cfg)) continue;  // failed part of the signal
      segments.push_back(std::move(est));
      segment_part.push_back(m);
    }
  }
  if (segments.empty()) return {};

  // Merge agreeing segments across partitions. A lone segment is an artifact
  // of the partitioning (typically the blob around the crossover itself) and
  // is discarded; surviving merges are re-gated point-wise since the
  // 1/snippet-count normalization is insensitive for small supports.
  const auto groups = agreement_groups(segments, cfg);
  std::vector<ChirpEstimate> out;
  for (const auto& members : groups) {
    if (members.size() < 2) continue;
    ChirpEstimate merged = cfg.merge_by_averaging
                               ? average_segments(segments, members, plan.count)
                               : fit_component(union_support(segments, members), cfg, plan.count);
    const double gate = rmse_gate(merged.support, cfg);
    if (per_point_rmse(merged.support, merged) > gate) continue;
    out.push_back(std::move(merged));
  }
  return out;
}

PipelineResult run_pipeline(const IQRecord& record, const SnippetPlan& plan,
                            const PipelineConfig& cfg, const DiagramOptions& options) {
  cfg.validate();
  PipelineResult result;
  result.diagram = build_diagram(record, plan, cfg.eta, options);

  try {
    result.in_band = band_select(result.diagram, cfg);
  } catch (const NoSignalError& e) {
    result.in_band.plan = plan;
    result.in_band.sample_rate = record.sample_rate;
    result.notes.emplace_back(e.what());
    return result;
  }

  std::vector<std::vector<DiagramPoint>> clusters;
  try {
    clusters = component_clusters(result.in_band, cfg);
  } catch (const NoSignalError& e) {
    result.notes.emplace_back(e.what());
    return result;
  }

  const double spacing = result.in_band.center_spacing();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& cluster = clusters[c];
    ChirpEstimate est;
    try {
      est = fit_component(cluster, cfg, plan.count);
    } catch (const std::invalid_argument& e) {
      result.notes.push_back("cluster " + std::to_string(c + 1) + ": " + e.what());
      continue;
    }
    if (est.rmse_p <= rmse_gate(cluster, cfg)) {
      result.estimates.push_back(std::move(est));
      continue;
    }
    auto refined = refine_crossover(cluster, cfg, plan, spacing);
    if (refined.empty()) {
      result.notes.push_back("cluster " + std::to_string(c + 1) + ": failed to resolve");
      continue;
    }
    for (auto& r : refined) result.estimates.push_back(std::move(r));
  }

  std::sort(result.estimates.begin(), result.estimates.end(),
            [](const ChirpEstimate& a, const ChirpEstimate& b) {
              if (a.gamma != b.gamma) return a.gamma < b.gamma;
              return a.omega < b.omega;
            });
  return result;
}

}  // namespace chirpsep
