#pragma once

#include <string>
#include <vector>

namespace chirpsep {

// Low-pass taper H: even, H == 1 on [-1/2, 1/2], H == 0 outside (-1, 1),
// nonincreasing on [1/2, 1]. smooth_bump uses a C-infinity transition,
// cosine_taper a cos^2 transition.
enum class FilterKind { smooth_bump, cosine_taper };

double filter_eval(FilterKind kind, double t);

FilterKind filter_from_name(const std::string& name);  // "smooth" | "cosine"
std::string filter_name(FilterKind kind);

// Decay exponent the taper supports in the bound |K_n(x)| <= L / (n|x|)^S.
double default_exponent(FilterKind kind);

// Empirical L for the bound above, measured once per (kind, S) by scanning
// n in {64, 256, 1024} on a dense grid, then cached.
double fitted_localization_constant(FilterKind kind, double s_exponent);

struct KernelSpec {
  int n = 1;
  FilterKind filter = FilterKind::smooth_bump;
  double s_exponent = 3.0;
  double loc_constant = 1.0;

  static KernelSpec make(int n, FilterKind kind = FilterKind::smooth_bump);
};

// Normalization 1 / sum_{|l|<n} H(|l|/n); with it the kernel peaks at exactly 1.
double kernel_norm(const KernelSpec& spec);

// K_n(x) = norm * sum_{|l|<n} H(|l|/n) e^{ilx}, evaluated by direct summation.
// The symmetric sum is real.
double kernel_eval(const KernelSpec& spec, double x);

// Nonnegative weights H(l/n) for l = 0..n-1.
std::vector<double> kernel_weights(const KernelSpec& spec);

}  // namespace chirpsep
