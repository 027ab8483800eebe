#pragma once

#include <cmath>
#include <numbers>

#include "chirpsep/signal.hpp"

namespace chirpsep::testing {

// Six-train reference scenario: two repeating trains, three single pulses
// whose tracks cross or come close mid-record, and one low-band repeater.
inline Scenario reference_scenario(double sample_rate = 5e8) {
  Scenario s;
  s.label = "1";
  s.horizon = 1e-4;
  s.sample_rate = sample_rate;
  s.trains = {
      {1.0, 1.08e9, 1.5e7, 3e-5, 1e-5, 5e-5, 2},
      {1.0, 1.36e9, 5e6, 1e-5, 1e-5, 1.5e-5, 5},
      {1.0, 1.54e9, -2e7, 3e-5, 1e-5, 0.0, 1},
      {1.0, 1.51e9, 5e7, 7e-5, 1.5e-5, 0.0, 1},
      {1.0, 1.48e9, -1.5e7, 5e-5, 3e-5, 0.0, 1},
      {1.0, 1.04e9, -1.5e7, 3e-5, 1.5e-5, 4e-5, 2},
  };
  return s;
}

// Two full-horizon chirps whose frequency tracks intersect mid-record, with
// the vertex placed away from refinement partition boundaries.
inline Scenario x_cross_scenario(double sample_rate = 5e8) {
  Scenario s;
  s.label = "x";
  s.horizon = 1e-4;
  s.sample_rate = sample_rate;
  s.trains = {
      {1.0, 1.20e9, 1.4e8, 8.6e-5, 4e-6, 0.0, 1},
      {1.0, 1.50e9, -1.4e8, 8.6e-5, 7e-6, 0.0, 1},
  };
  return s;
}

inline IQRecord tone_record(double omega, double sample_rate, std::size_t count, double t0 = 0.0) {
  IQRecord r;
  r.sample_rate = sample_rate;
  r.t0 = t0;
  r.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = t0 + static_cast<double>(i) / sample_rate;
    r.samples.push_back(std::polar(1.0, omega * t));
  }
  return r;
}

}  // namespace chirpsep::testing
