#include "chirpsep/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chirpsep {

namespace {

// C-infinity step: 0 at s=0, 1 at s=1.
double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace

double filter_eval(FilterKind kind, double t) {
  const double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  switch (kind) {
    case FilterKind::smooth_bump:
      return smooth_step(2.0 * (1.0 - a));
    case FilterKind::cosine_taper: {
      const double c = std::cos(std::numbers::pi * (a - 0.5));
      return c * c;
    }
  }
  return 0.0;
}

FilterKind filter_from_name(const std::string& name) {
  if (name == "smooth") return FilterKind::smooth_bump;
  if (name == "cosine") return FilterKind::cosine_taper;
  throw std::invalid_argument("unknown filter: " + name);
}

std::string filter_name(FilterKind kind) {
  return kind == FilterKind::smooth_bump ? "smooth" : "cosine";
}

double default_exponent(FilterKind kind) {
  return kind == FilterKind::smooth_bump ? 3.0 : 2.0;
}

double kernel_norm(const KernelSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("kernel order must be >= 1");
  double sum = 1.0;  // l = 0
  for (int l = 1; l < spec.n; ++l) {
    sum += 2.0 * filter_eval(spec.filter, static_cast<double>(l) / spec.n);
  }
  return 1.0 / sum;
}

double kernel_eval(const KernelSpec& spec, double x) {
  double sum = 1.0;
  for (int l = 1; l < spec.n; ++l) {
    sum += 2.0 * filter_eval(spec.filter, static_cast<double>(l) / spec.n) * std::cos(l * x);
  }
  return kernel_norm(spec) * sum;
}

std::vector<double> kernel_weights(const KernelSpec& spec) {
  std::vector<double> w(static_cast<std::size_t>(spec.n));
  for (int l = 0; l < spec.n; ++l) {
    w[static_cast<std::size_t>(l)] = filter_eval(spec.filter, static_cast<double>(l) / spec.n);
  }
  return w;
}

namespace {

double measure_localization_constant(FilterKind kind, double s_exponent) {
  double worst = 1.0;  // the bound must also hold at x=0 where the kernel is 1
  for (int n : {64, 256, 1024}) {
    KernelSpec spec{n, kind, s_exponent, 1.0};
    // Sample between 1/n and pi; 8 points per 1/n localization width.
    const int samples = 8 * n;
    for (int i = 1; i <= samples; ++i) {
      const double x = std::numbers::pi * static_cast<double>(i) / samples;
      const double nx = n * x;
      if (nx < 1.0) continue;
      const double bound_arg = std::pow(nx, s_exponent);
      worst = std::max(worst, std::abs(kernel_eval(spec, x)) * bound_arg);
    }
  }
  return worst;
}

std::mutex loc_mutex;
std::map<std::pair<FilterKind, double>, double> loc_cache;

}  // namespace

double fitted_localization_constant(FilterKind kind, double s_exponent) {
  std::lock_guard lock(loc_mutex);
  const auto key = std::make_pair(kind, s_exponent);
  auto it = loc_cache.find(key);
  if (it != loc_cache.end()) return it->second;
  const double value = measure_localization_constant(kind, s_exponent);
  loc_cache.emplace(key, value);
  return value;
}

KernelSpec KernelSpec::make(int n, FilterKind kind) {
  KernelSpec spec;
  spec.n = n;
  spec.filter = kind;
  spec.s_exponent = default_exponent(kind);
  spec.loc_constant = fitted_localization_constant(kind, spec.s_exponent);
  return spec;
}

}  // namespace chirpsep
