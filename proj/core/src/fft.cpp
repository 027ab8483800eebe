#include "chirpsep/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace chirpsep::fft {

namespace {

std::mutex planner_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> plan_cache;

fftw_plan plan_for(std::size_t size, int sign) {
  std::lock_guard lock(planner_mutex);
  const auto key = std::make_pair(size, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;

  // FFTW_UNALIGNED so the cached plan executes on arbitrary caller buffers.
  fftw_complex* in = fftw_alloc_complex(size);
  fftw_complex* out = fftw_alloc_complex(size);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(size), in, out, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  if (!plan) throw std::runtime_error("fftw plan creation failed");
  plan_cache.emplace(key, plan);
  return plan;
}

}  // namespace

void transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
               bool forward) {
  if (in.size() != out.size()) throw std::invalid_argument("fft size mismatch");
  if (in.empty()) return;
  const int sign = forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = plan_for(in.size(), sign);
  auto* in_raw = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* out_raw = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, in_raw, out_raw);
}

}  // namespace chirpsep::fft
