#include "chirpsep/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chirpsep/errors.hpp"
#include "chirpsep/rng.hpp"

namespace chirpsep {

void ChirpPulseTrain::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("pulse duration must be positive");
  if (burst_count < 1) throw std::invalid_argument("burst_count must be >= 1");
  if (pri < 0.0) throw std::invalid_argument("pri must be nonnegative");
  if (burst_count > 1 && pri < duration) {
    throw std::invalid_argument("bursts overlap: pri < duration with burst_count > 1");
  }
  if (!std::isfinite(amplitude) || !std::isfinite(theta) || !std::isfinite(bandwidth_param) ||
      !std::isfinite(start_time)) {
    throw std::invalid_argument("train parameters must be finite");
  }
}

void Scenario::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("scenario horizon must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  const double band = std::numbers::pi * sample_rate;
  for (std::size_t i = 0; i < trains.size(); ++i) {
    const auto& tr = trains[i];
    try {
      tr.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("train " + std::to_string(i + 1) + ": " + e.what());
    }
    const double last_end = tr.burst_start(tr.burst_count - 1) + tr.duration;
    if (tr.start_time < 0.0 || last_end > horizon) {
      throw ConfigError("train " + std::to_string(i + 1) + " leaves [0, horizon]");
    }
    // Hard aliasing gate on the nominal band [theta, theta + B]; the swept
    // band [theta, theta + 2B] is checked softly in scenario_warnings.
    const double lo = std::min(tr.theta, tr.theta + tr.bandwidth_param);
    const double hi = std::max(tr.theta, tr.theta + tr.bandwidth_param);
    if (lo <= -band || hi > band) {
      throw ConfigError("train " + std::to_string(i + 1) +
                        " frequency band leaves (-pi*R, pi*R]: configuration error");
    }
  }
}

std::vector<std::string> scenario_warnings(const Scenario& scenario) {
  std::vector<std::string> out;
  const double band = std::numbers::pi * scenario.sample_rate;
  for (std::size_t i = 0; i < scenario.trains.size(); ++i) {
    const auto& tr = scenario.trains[i];
    const double end_if = tr.theta + 2.0 * tr.bandwidth_param;
    const double lo = std::min(tr.theta, end_if);
    const double hi = std::max(tr.theta, end_if);
    if (lo <= -band || hi > band) {
      out.push_back("train " + std::to_string(i + 1) +
                    " sweep exits the unambiguous band; the out-of-band tail will wrap");
    }
  }
  return out;
}

double pulse_phase(const ChirpPulseTrain& train, int burst_index, double t) {
  if (burst_index < 0 || burst_index >= train.burst_count) {
    throw std::domain_error("burst index out of range");
  }
  const double g = train.burst_start(burst_index);
  const double u = t - g;
  if (u < 0.0 || u > train.duration) throw std::domain_error("t outside burst support");
  return train.theta * u + (train.bandwidth_param / train.duration) * u * u;
}

std::optional<int> burst_containing(const ChirpPulseTrain& train, double t) {
  // Bursts are ordered and non-overlapping (pri >= duration).
  for (int n = 0; n < train.burst_count; ++n) {
    const double g = train.burst_start(n);
    if (t < g) break;
    if (t <= g + train.duration) return n;
  }
  return std::nullopt;
}

std::optional<double> instantaneous_frequency(const ChirpPulseTrain& train, double t) {
  const auto n = burst_containing(train, t);
  if (!n) return std::nullopt;
  const double u = t - train.burst_start(*n);
  return train.theta + train.if_slope() * u;
}

cplx scenario_value(const Scenario& scenario, double t) {
  cplx acc{0.0, 0.0};
  for (const auto& tr : scenario.trains) {
    const auto n = burst_containing(tr, t);
    if (!n) continue;
    acc += tr.amplitude * std::polar(1.0, pulse_phase(tr, *n, t));
  }
  return acc;
}

IQRecord synthesize(const Scenario& scenario) {
  scenario.validate();
  const double rate = scenario.sample_rate;
  const auto count = static_cast<std::size_t>(std::floor(scenario.horizon * rate)) + 1;

  IQRecord out;
  out.sample_rate = rate;
  out.t0 = 0.0;
  out.samples.assign(count, cplx{0.0, 0.0});

  // Per-burst closed-form evaluation over the burst's sample range; no
  // accumulated oscillator state, so there is no phase drift and samples
  // outside every burst stay exactly zero.
  for (const auto& tr : scenario.trains) {
    for (int n = 0; n < tr.burst_count; ++n) {
      const double g = tr.burst_start(n);
      const auto first = static_cast<std::size_t>(std::ceil(g * rate - 1e-9));
      const auto last =
          std::min(count - 1, static_cast<std::size_t>(std::floor((g + tr.duration) * rate + 1e-9)));
      for (std::size_t l = first; l <= last; ++l) {
        const double u = static_cast<double>(l) / rate - g;
        const double phase = tr.theta * u + (tr.bandwidth_param / tr.duration) * u * u;
        out.samples[l] += tr.amplitude * std::polar(1.0, phase);
      }
    }
  }
  return out;
}

IQRecord add_noise(const IQRecord& clean, const NoiseSpec& spec) {
  if (clean.samples.empty()) throw std::invalid_argument("add_noise: empty record");
  if (std::isinf(spec.snr_db) && spec.snr_db > 0.0) return clean;

  double signal_energy = 0.0;
  for (const auto& s : clean.samples) signal_energy += std::norm(s);
  if (signal_energy == 0.0) throw std::invalid_argument("add_noise: all-zero signal, SNR undefined");

  GaussianStream stream(spec.seed);
  std::vector<cplx> noise(clean.samples.size());
  double noise_energy = 0.0;
  for (auto& v : noise) {
    v = stream.next_complex();
    noise_energy += std::norm(v);
  }

  const double scale =
      std::sqrt(signal_energy) / (std::pow(10.0, spec.snr_db / 20.0) * std::sqrt(noise_energy));

  IQRecord out = clean;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += scale * noise[i];
  return out;
}

double chirp_lipschitz_alpha(const ChirpPulseTrain& train) {
  const double slope = train.nominal_slope();
  if (slope == 0.0) return 0.0;
  const double f0 = train.theta;
  const double f1 = train.theta + train.bandwidth_param;  // nominal frequency at pulse end
  if (f0 == 0.0 || f1 == 0.0 || (f0 > 0.0) != (f1 > 0.0)) {
    throw std::domain_error("frequency crosses zero inside the burst: alpha unbounded");
  }
  return std::abs(slope) / std::min(std::abs(f0), std::abs(f1));
}

}  // namespace chirpsep
