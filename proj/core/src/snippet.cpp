#include "chirpsep/snippet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chirpsep/errors.hpp"
#include "chirpsep/fft.hpp"
#include "chirpsep/parallel.hpp"
#include "chirpsep/rng.hpp"
#include "chirpsep/stats.hpp"

namespace chirpsep {

namespace {

constexpr double kPi = std::numbers::pi;

int grid_for(int n) { return next_pow2(std::max(4096, 8 * n)); }

// Spectrum of a window given the taps F(t_k - l/R) for l = -(n-1)..n-1,
// passed as taps[l + n - 1].
SnippetSpectrum spectrum_from_taps(const std::vector<cplx>& taps, const KernelSpec& kernel,
                                   int grid_size, double center) {
  const int n = kernel.n;
  const double norm = kernel_norm(kernel);
  const auto weights = kernel_weights(kernel);

  // values[g] = norm * sum_l w_l taps_l e^{i l x_g} with x_g = -pi + 2 pi g / G.
  // Folding e^{-i l pi} = (-1)^l into the coefficients turns the sum into an
  // unnormalized backward DFT of length G.
  std::vector<cplx> buf(static_cast<std::size_t>(grid_size), cplx{0.0, 0.0});
  for (int l = -(n - 1); l <= n - 1; ++l) {
    const cplx tap = taps[static_cast<std::size_t>(l + n - 1)];
    if (tap == cplx{0.0, 0.0}) continue;
    const double w = weights[static_cast<std::size_t>(std::abs(l))];
    const int sign = (l & 1) ? -1 : 1;
    const int idx = l >= 0 ? l : l + grid_size;
    buf[static_cast<std::size_t>(idx)] = sign * w * tap;
  }

  SnippetSpectrum out;
  out.center = center;
  out.values.resize(static_cast<std::size_t>(grid_size));
  fft::backward(buf, out.values);

  out.magnitudes.resize(out.values.size());
  for (std::size_t g = 0; g < out.values.size(); ++g) {
    out.values[g] *= norm;
    out.magnitudes[g] = std::abs(out.values[g]);
  }
  return out;
}

std::vector<cplx> window_taps(const IQRecord& record, double center, int n) {
  const auto size = static_cast<std::ptrdiff_t>(record.samples.size());
  const auto center_idx =
      static_cast<std::ptrdiff_t>(std::llround((center - record.t0) * record.sample_rate));
  std::vector<cplx> taps(static_cast<std::size_t>(2 * n - 1), cplx{0.0, 0.0});
  for (int l = -(n - 1); l <= n - 1; ++l) {
    const std::ptrdiff_t j = center_idx - l;  // sample at t_k - l/R
    if (j < 0 || j >= size) continue;         // zero-extension at the record edge
    taps[static_cast<std::size_t>(l + n - 1)] = record.samples[static_cast<std::size_t>(j)];
  }
  return taps;
}

void check_center(const IQRecord& record, double center) {
  const double t_end =
      record.t0 + static_cast<double>(record.samples.size() - 1) / record.sample_rate;
  const double slack = 0.5 / record.sample_rate;
  if (center < record.t0 - slack || center > t_end + slack) {
    throw std::domain_error("snippet center outside the record");
  }
}

}  // namespace

double SnippetSpectrum::grid_x(int g) const {
  return -kPi + 2.0 * kPi * static_cast<double>(g) / grid_size();
}

SnippetPlan SnippetPlan::uniform(const IQRecord& record, double delta, int count,
                                 double percentile) {
  if (count < 1) throw ConfigError("snippet count must be >= 1");
  if (!(delta > 0.0)) throw ConfigError("snippet half-width must be positive");

  SnippetPlan plan;
  plan.delta = delta;
  plan.count = count;
  plan.percentile = percentile;
  plan.n = static_cast<int>(std::floor(record.sample_rate * delta));
  if (plan.n < 1) throw ConfigError("sample_rate * delta must be >= 1");
  plan.grid_size = grid_for(plan.n);

  const auto last = static_cast<double>(record.samples.size() - 1);
  plan.centers.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
    const auto idx = std::llround(frac * last);
    plan.centers.push_back(record.t0 + static_cast<double>(idx) / record.sample_rate);
  }
  return plan;
}

void SnippetPlan::validate(const IQRecord& record) const {
  if (static_cast<int>(centers.size()) != count) throw ConfigError("plan center count mismatch");
  if (grid_size < 4 * n) throw ConfigError("grid_size must be >= 4n");
  if (!(percentile > 0.0 && percentile < 100.0)) throw ConfigError("percentile must be in (0,100)");
  for (std::size_t k = 0; k + 1 < centers.size(); ++k) {
    if (!(centers[k] < centers[k + 1])) throw ConfigError("centers must be strictly increasing");
    if (!(centers[k + 1] - centers[k] < 2.0 * delta)) {
      throw ConfigError("consecutive snippets must overlap");
    }
  }
  for (double c : centers) check_center(record, c);
}

double Diagram::center_spacing() const {
  if (plan.centers.size() < 2) return plan.delta;
  return (plan.centers.back() - plan.centers.front()) /
         static_cast<double>(plan.centers.size() - 1);
}

SnippetSpectrum snippet_spectrum(const IQRecord& record, double center, const SnippetPlan& plan,
                                 const KernelSpec& kernel) {
  check_center(record, center);
  const auto taps = window_taps(record, center, kernel.n);
  return spectrum_from_taps(taps, kernel, plan.grid_size, center);
}

SnippetSpectrum snippet_spectrum_direct(const IQRecord& record, double center,
                                        const SnippetPlan& plan, const KernelSpec& kernel) {
  check_center(record, center);
  const int n = kernel.n;
  const auto taps = window_taps(record, center, n);
  const auto weights = kernel_weights(kernel);
  const double norm = kernel_norm(kernel);

  SnippetSpectrum out;
  out.center = center;
  out.values.resize(static_cast<std::size_t>(plan.grid_size));
  out.magnitudes.resize(out.values.size());
  for (int g = 0; g < plan.grid_size; ++g) {
    const double x = -kPi + 2.0 * kPi * static_cast<double>(g) / plan.grid_size;
    cplx acc{0.0, 0.0};
    for (int l = -(n - 1); l <= n - 1; ++l) {
      const cplx tap = taps[static_cast<std::size_t>(l + n - 1)];
      if (tap == cplx{0.0, 0.0}) continue;
      acc += weights[static_cast<std::size_t>(std::abs(l))] * tap * std::polar(1.0, l * x);
    }
    out.values[static_cast<std::size_t>(g)] = norm * acc;
    out.magnitudes[static_cast<std::size_t>(g)] = std::abs(out.values[static_cast<std::size_t>(g)]);
  }
  return out;
}

double percentile_threshold(const SnippetSpectrum& spectrum, double percentile) {
  return percentile_linear(spectrum.magnitudes, percentile);
}

std::vector<std::vector<int>> superlevel_partition(const SnippetSpectrum& spectrum, double tau,
                                                   double eta, double sample_rate) {
  const int grid = spectrum.grid_size();
  const double cell = 2.0 * kPi / grid;
  const double min_gap = 0.5 * eta / sample_rate;  // radians

  // Runs of consecutive above-threshold cells, circular over the seam.
  struct Run {
    int start;
    int len;
  };
  std::vector<Run> runs;
  int g = 0;
  while (g < grid) {
    if (spectrum.magnitudes[static_cast<std::size_t>(g)] < tau) {
      ++g;
      continue;
    }
    int len = 0;
    while (g + len < grid && spectrum.magnitudes[static_cast<std::size_t>(g + len)] >= tau) ++len;
    runs.push_back({g, len});
    g += len;
  }
  if (runs.empty()) return {};
  if (runs.size() == 1 && runs[0].len == grid) {
    std::vector<int> all(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) all[static_cast<std::size_t>(i)] = i;
    return {all};
  }
  if (runs.size() > 1 && runs.front().start == 0 && runs.back().start + runs.back().len == grid) {
    // Wrap the seam-straddling run.
    runs.front().start = runs.back().start;
    runs.front().len += runs.back().len;
    runs.pop_back();
  }

  // Merge circularly adjacent runs separated by less than min_gap.
  const auto run_end = [&](const Run& r) { return (r.start + r.len - 1) % grid; };
  std::vector<std::vector<Run>> groups;
  groups.push_back({runs[0]});
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const int prev_end = run_end(groups.back().back());
    int gap_cells = runs[i].start - prev_end;
    if (gap_cells < 0) gap_cells += grid;
    if (gap_cells * cell < min_gap) {
      groups.back().push_back(runs[i]);
    } else {
      groups.push_back({runs[i]});
    }
  }
  if (groups.size() > 1) {
    // Circular closure between the last and the first group.
    const int prev_end = run_end(groups.back().back());
    int gap_cells = groups.front().front().start - prev_end;
    if (gap_cells < 0) gap_cells += grid;
    if (gap_cells * cell < min_gap) {
      auto tail = std::move(groups.back());
      groups.pop_back();
      auto head = std::move(groups.front());
      groups.front() = std::move(tail);
      for (auto& r : head) groups.front().push_back(r);
    }
  }

  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (const auto& grp : groups) {
    std::vector<int> cells;
    for (const auto& r : grp) {
      for (int i = 0; i < r.len; ++i) cells.push_back((r.start + i) % grid);
    }
    out.push_back(std::move(cells));
  }
  return out;
}

std::vector<DiagramPoint> snippet_peaks(const SnippetSpectrum& spectrum,
                                        const std::vector<std::vector<int>>& groups,
                                        double sample_rate, int snippet_index, bool refine) {
  const int grid = spectrum.grid_size();
  std::vector<DiagramPoint> out;
  out.reserve(groups.size());
  for (const auto& group : groups) {
    if (group.empty()) continue;
    int best = group.front();
    for (int g : group) {
      const double mg = spectrum.magnitudes[static_cast<std::size_t>(g)];
      const double mb = spectrum.magnitudes[static_cast<std::size_t>(best)];
      if (mg > mb || (mg == mb && g < best)) best = g;
    }

    double offset = 0.0;
    if (refine) {
      const double m0 = spectrum.magnitudes[static_cast<std::size_t>((best + grid - 1) % grid)];
      const double m1 = spectrum.magnitudes[static_cast<std::size_t>(best)];
      const double m2 = spectrum.magnitudes[static_cast<std::size_t>((best + 1) % grid)];
      const double denom = m0 - 2.0 * m1 + m2;
      if (denom < 0.0) {
        offset = std::clamp(0.5 * (m0 - m2) / denom, -0.5, 0.5);
      }
    }

    DiagramPoint p;
    p.t = spectrum.center;
    p.lambda_hat = wrap_angle(-kPi + 2.0 * kPi * (static_cast<double>(best) + offset) / grid);
    p.freq = sample_rate * p.lambda_hat;
    p.magnitude = spectrum.magnitudes[static_cast<std::size_t>(best)];
    p.snippet_index = snippet_index;
    out.push_back(p);
  }
  return out;
}

Diagram build_diagram(const IQRecord& record, const SnippetPlan& plan, double eta,
                      const DiagramOptions& options) {
  plan.validate(record);
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");

  const KernelSpec kernel = KernelSpec::make(plan.n, options.filter);
  std::vector<std::vector<DiagramPoint>> per_snippet(static_cast<std::size_t>(plan.count));

  parallel_for(0, plan.count, [&](int k) {
    const auto spectrum =
        snippet_spectrum(record, plan.centers[static_cast<std::size_t>(k)], plan, kernel);
    const double tau = percentile_threshold(spectrum, plan.percentile);
    const auto groups = superlevel_partition(spectrum, tau, eta, record.sample_rate);
    auto peaks = snippet_peaks(spectrum, groups, record.sample_rate, k, options.refine_peaks);
    std::sort(peaks.begin(), peaks.end(),
              [](const DiagramPoint& a, const DiagramPoint& b) { return a.freq < b.freq; });
    per_snippet[static_cast<std::size_t>(k)] = std::move(peaks);
  });

  Diagram diagram;
  diagram.plan = plan;
  diagram.sample_rate = record.sample_rate;
  for (auto& chunk : per_snippet) {
    diagram.points.insert(diagram.points.end(), chunk.begin(), chunk.end());
  }
  return diagram;
}

PlanDiagnostics plan_diagnostics(const Scenario& scenario, const SnippetPlan& plan,
                                 FilterKind filter, double delta_prob, double noise_v) {
  PlanDiagnostics d;
  d.delta_prob = delta_prob;
  d.V = noise_v;

  d.m_lower = std::numeric_limits<double>::infinity();
  for (const auto& tr : scenario.trains) d.m_lower = std::min(d.m_lower, std::abs(tr.amplitude));
  if (!std::isfinite(d.m_lower)) d.m_lower = 0.0;

  d.eta = std::numeric_limits<double>::infinity();
  for (double t : plan.centers) {
    double active_sum = 0.0;
    std::vector<double> freqs;
    for (const auto& tr : scenario.trains) {
      if (auto f = instantaneous_frequency(tr, t)) {
        active_sum += std::abs(tr.amplitude);
        freqs.push_back(*f);
        d.max_abs_if = std::max(d.max_abs_if, std::abs(*f));
      }
    }
    d.M_total = std::max(d.M_total, active_sum);
    std::sort(freqs.begin(), freqs.end());
    for (std::size_t i = 0; i + 1 < freqs.size(); ++i) {
      d.eta = std::min(d.eta, freqs[i + 1] - freqs[i]);
    }
  }

  for (const auto& tr : scenario.trains) {
    try {
      d.alpha = std::max(d.alpha, chirp_lipschitz_alpha(tr));
    } catch (const std::domain_error&) {
      d.alpha = std::numeric_limits<double>::infinity();
    }
  }

  if (d.m_lower > 0.0 && d.M_total > 0.0) {
    const double s = default_exponent(filter);
    const double loc = fitted_localization_constant(filter, s);
    d.C_const = std::pow(16.0 * d.M_total * loc / d.m_lower, 1.0 / s);
  }
  return d;
}

std::vector<std::string> validate_plan(const SnippetPlan& plan, const PlanDiagnostics& diag,
                                       double sample_rate) {
  std::vector<std::string> advisories;

  const double eta_star = diag.eta / sample_rate;
  if (!(eta_star > 0.0) || !std::isfinite(diag.eta)) {
    if (!std::isfinite(diag.eta)) {
      // Never two simultaneous components; the separation condition is vacuous.
    } else {
      advisories.push_back("separation condition violated: minimal separation is zero");
    }
  } else if (static_cast<double>(plan.n) < 4.0 * diag.C_const / eta_star) {
    advisories.push_back("separation condition violated: n=" + std::to_string(plan.n) +
                         " below 4C/eta* = " + std::to_string(4.0 * diag.C_const / eta_star));
  }

  if (diag.m_lower > 0.0) {
    const double lhs =
        diag.alpha * diag.M_total * (diag.max_abs_if * plan.delta + 1.0) * plan.delta;
    if (lhs > diag.m_lower / 4.0) {
      advisories.push_back("snippet width condition violated: alpha*M*(B*delta+1)*delta = " +
                           std::to_string(lhs) + " exceeds m/4 = " +
                           std::to_string(diag.m_lower / 4.0));
    }
  }
  return advisories;
}

NoiseFloorSummary noise_floor_probe(int n, double v, int trials, std::uint64_t seed,
                                    FilterKind filter) {
  if (trials < 1) throw ConfigError("noise probe needs at least one trial");
  const KernelSpec kernel = KernelSpec::make(n, filter);
  const int grid = grid_for(n);

  std::vector<double> maxima(static_cast<std::size_t>(trials), 0.0);
  parallel_for(0, trials, [&](int trial) {
    GaussianStream stream(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));
    std::vector<cplx> taps(static_cast<std::size_t>(2 * n - 1));
    for (auto& tap : taps) tap = v * stream.next_complex();
    const auto spectrum = spectrum_from_taps(taps, kernel, grid, 0.0);
    maxima[static_cast<std::size_t>(trial)] =
        *std::max_element(spectrum.magnitudes.begin(), spectrum.magnitudes.end());
  });

  NoiseFloorSummary summary;
  summary.mean_max = mean(maxima);
  summary.p95_max = percentile_linear(maxima, 95.0);
  return summary;
}

}  // namespace chirpsep
