#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chirpsep {

using cplx = std::complex<double>;

// One emitter's pulse train. A burst starting at g = start_time + n*pri has
// phase theta*(t-g) + (bandwidth_param/duration)*(t-g)^2, so its frequency
// sweeps from theta to theta + 2*bandwidth_param over one pulse. All
// frequencies are angular (rad/s).
struct ChirpPulseTrain {
  double amplitude = 1.0;
  double theta = 0.0;
  double bandwidth_param = 0.0;
  double duration = 0.0;
  double start_time = 0.0;
  double pri = 0.0;
  int burst_count = 1;

  double burst_start(int n) const { return start_time + n * pri; }
  double if_slope() const { return 2.0 * bandwidth_param / duration; }
  // Slope implied by reading bandwidth_param as the full sweep; used by the
  // reported-parameter frequency line (see ChirpEstimate::nominal_line_at).
  double nominal_slope() const { return bandwidth_param / duration; }

  void validate() const;  // throws std::invalid_argument
};

struct Scenario {
  std::string label;
  std::vector<ChirpPulseTrain> trains;
  double horizon = 0.0;      // seconds
  double sample_rate = 0.0;  // Hz

  void validate() const;  // throws ConfigError
};

// Soft diagnostics (e.g. a sweep tail leaving the unambiguous frequency band);
// these never block synthesis.
std::vector<std::string> scenario_warnings(const Scenario& scenario);

struct IQRecord {
  std::vector<cplx> samples;
  double sample_rate = 0.0;  // Hz
  double t0 = 0.0;           // time of samples[0], seconds
};

enum class NoiseKind { gaussian };

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();  // +inf disables noise
  std::uint64_t seed = 0;
  NoiseKind kind = NoiseKind::gaussian;
};

// Phase of one burst at time t; t must lie inside that burst's support.
double pulse_phase(const ChirpPulseTrain& train, int burst_index, double t);

// Frequency of the train at t, or empty when t is in no burst.
std::optional<double> instantaneous_frequency(const ChirpPulseTrain& train, double t);

// Index of the burst containing t, or empty.
std::optional<int> burst_containing(const ChirpPulseTrain& train, double t);

// Noiseless scenario value at an arbitrary time.
cplx scenario_value(const Scenario& scenario, double t);

// Closed-form evaluation at sample instants l / sample_rate, l = 0..floor(T*R).
IQRecord synthesize(const Scenario& scenario);

// F = f + (|f| / (10^{snr/20} |n|)) n with n i.i.d. complex standard Gaussian
// from the seeded stream. The realized energy ratio matches snr_db exactly.
IQRecord add_noise(const IQRecord& clean, const NoiseSpec& spec);

// Relative Lipschitz constant of the frequency over one burst, computed with
// the nominal (bandwidth_param / duration) slope convention:
// |B/d| / min over the burst of |theta + (B/d)(t - g)|.
double chirp_lipschitz_alpha(const ChirpPulseTrain& train);

}  // namespace chirpsep
