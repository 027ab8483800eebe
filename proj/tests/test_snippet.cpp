#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chirpsep/errors.hpp"
#include "chirpsep/rng.hpp"
#include "chirpsep/snippet.hpp"
#include "fixtures.hpp"

using namespace chirpsep;
using chirpsep::testing::tone_record;

namespace {

constexpr double kPi = std::numbers::pi;

SnippetSpectrum make_spectrum(std::vector<double> magnitudes) {
  SnippetSpectrum s;
  s.magnitudes = std::move(magnitudes);
  s.values.assign(s.magnitudes.size(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < s.magnitudes.size(); ++i) s.values[i] = s.magnitudes[i];
  return s;
}

}  // namespace

TEST_CASE("plan layout and validation") {
  const IQRecord r = tone_record(0.0, 1e8, 10001);
  const SnippetPlan plan = SnippetPlan::uniform(r, 2e-6, 50);
  CHECK(plan.n == 200);
  CHECK(plan.grid_size == 4096);
  CHECK(plan.centers.size() == 50);
  CHECK(plan.centers.front() == doctest::Approx(0.0));
  CHECK(plan.centers.back() == doctest::Approx(1e-4));
  CHECK_NOTHROW(plan.validate(r));

  SnippetPlan sparse = plan;
  sparse.centers[1] = sparse.centers[0] + 5e-6;  // gap beyond 2*delta
  CHECK_THROWS_AS(sparse.validate(r), ConfigError);

  // grid follows 8n once that exceeds 4096
  const IQRecord fast = tone_record(0.0, 1e9, 200001);
  CHECK(SnippetPlan::uniform(fast, 2e-6, 11).grid_size == 16384);
}

TEST_CASE("zero input gives a zero spectrum") {
  IQRecord r;
  r.sample_rate = 1e8;
  r.samples.assign(4001, cplx{0.0, 0.0});
  const SnippetPlan plan = SnippetPlan::uniform(r, 2e-6, 11);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  const auto s = snippet_spectrum(r, plan.centers[5], plan, kernel);
  for (double m : s.magnitudes) CHECK(m == 0.0);
}

TEST_CASE("on-grid tone peaks at exactly its bin") {
  const double rate = 1e8;
  const IQRecord r = tone_record(0.0, rate, 4001);
  const SnippetPlan plan = SnippetPlan::uniform(r, 2e-6, 11);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  const int grid = plan.grid_size;

  // pick a bin index and synthesize the matching frequency
  const int g0 = grid / 2 + grid / 8;
  const double lambda = -kPi + 2.0 * kPi * g0 / grid;
  const IQRecord tone = tone_record(lambda * rate, rate, 4001);
  const auto s = snippet_spectrum(tone, plan.centers[5], plan, kernel);

  const auto peak =
      std::max_element(s.magnitudes.begin(), s.magnitudes.end()) - s.magnitudes.begin();
  CHECK(peak == g0);
  CHECK(s.magnitudes[static_cast<std::size_t>(g0)] == doctest::Approx(1.0).epsilon(1e-10));

  // off-peak magnitudes obey the kernel decay envelope
  for (int off : {32, 128, 512}) {
    const double x_gap = 2.0 * kPi * off / grid;
    const double bound =
        kernel.loc_constant / std::max(1.0, std::pow(kernel.n * x_gap, kernel.s_exponent));
    CHECK(s.magnitudes[static_cast<std::size_t>(g0 - off)] <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("fft path equals direct summation") {
  const double rate = 1e8;
  Scenario s;
  s.horizon = 4e-5;
  s.sample_rate = rate;
  s.trains = {{1.0, 2.0e8, 1e6, 3e-5, 2e-6, 0.0, 1}, {1.0, -1.2e8, 0.0, 2e-5, 8e-6, 0.0, 1}};
  IQRecord record = add_noise(synthesize(s), {0.0, 11});

  SnippetPlan plan = SnippetPlan::uniform(record, 1e-6, 9);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  for (int k : {0, 3, 8}) {
    const auto fast = snippet_spectrum(record, plan.centers[static_cast<std::size_t>(k)], plan, kernel);
    const auto slow =
        snippet_spectrum_direct(record, plan.centers[static_cast<std::size_t>(k)], plan, kernel);
    double max_mag = 0.0;
    for (double m : slow.magnitudes) max_mag = std::max(max_mag, m);
    for (int g = 0; g < plan.grid_size; ++g) {
      CHECK(std::abs(fast.values[static_cast<std::size_t>(g)] -
                     slow.values[static_cast<std::size_t>(g)]) <= 1e-8 * max_mag);
    }
  }
}

TEST_CASE("operator is linear in the record") {
  const double rate = 1e8;
  const IQRecord a = tone_record(1.7e8, rate, 2001);
  const IQRecord b = tone_record(-0.9e8, rate, 2001);
  IQRecord mix = a;
  for (std::size_t i = 0; i < mix.samples.size(); ++i) {
    mix.samples[i] = 2.0 * a.samples[i] + 0.5 * b.samples[i];
  }
  const SnippetPlan plan = SnippetPlan::uniform(a, 1e-6, 5);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  const auto sa = snippet_spectrum(a, plan.centers[2], plan, kernel);
  const auto sb = snippet_spectrum(b, plan.centers[2], plan, kernel);
  const auto sm = snippet_spectrum(mix, plan.centers[2], plan, kernel);
  for (int g = 0; g < plan.grid_size; g += 13) {
    const cplx expect = 2.0 * sa.values[static_cast<std::size_t>(g)] +
                        0.5 * sb.values[static_cast<std::size_t>(g)];
    CHECK(std::abs(sm.values[static_cast<std::size_t>(g)] - expect) <= 1e-10);
  }
}

TEST_CASE("modulation shifts peaks") {
  const double rate = 1e8;
  const double omega0 = 0.7e8;
  const IQRecord base = tone_record(0.5e8, rate, 4001);
  IQRecord shifted = base;
  for (std::size_t i = 0; i < shifted.samples.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    shifted.samples[i] *= std::polar(1.0, omega0 * t);
  }
  const SnippetPlan plan = SnippetPlan::uniform(base, 2e-6, 9);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  const double cell = 2.0 * kPi / plan.grid_size;

  const auto sa = snippet_spectrum(base, plan.centers[4], plan, kernel);
  const auto sb = snippet_spectrum(shifted, plan.centers[4], plan, kernel);
  const auto pa =
      std::max_element(sa.magnitudes.begin(), sa.magnitudes.end()) - sa.magnitudes.begin();
  const auto pb =
      std::max_element(sb.magnitudes.begin(), sb.magnitudes.end()) - sb.magnitudes.begin();
  const double got = sa.grid_x(static_cast<int>(pb)) - sa.grid_x(static_cast<int>(pa));
  CHECK(std::abs(got - omega0 / rate) <= cell * 1.0001);
}

TEST_CASE("percentile threshold") {
  CHECK(percentile_threshold(make_spectrum(std::vector<double>(64, 3.25)), 99.0) ==
        doctest::Approx(3.25));

  std::vector<double> ramp(100);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  CHECK(percentile_threshold(make_spectrum(ramp), 99.0) == doctest::Approx(98.01));

  // top ~1% of a 4096 grid clears the threshold
  std::vector<double> grid(4096);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i);
  const double tau = percentile_threshold(make_spectrum(grid), 99.0);
  int above = 0;
  for (double v : grid) above += v >= tau;
  CHECK(above == 41);
}

TEST_CASE("superlevel grouping with circular gaps") {
  const double rate = 1.0;  // eta expressed directly in radians
  std::vector<double> mags(1024, 0.0);

  SUBCASE("empty set") {
    const auto groups = superlevel_partition(make_spectrum(mags), 0.5, 0.1 * rate, rate);
    CHECK(groups.empty());
  }

  SUBCASE("nearby runs merge, distant runs stay apart") {
    // runs at [100,110] and [120,130]: gap 10 cells; [500,510] far away
    for (int g = 100; g <= 110; ++g) mags[static_cast<std::size_t>(g)] = 1.0;
    for (int g = 120; g <= 130; ++g) mags[static_cast<std::size_t>(g)] = 1.0;
    for (int g = 500; g <= 510; ++g) mags[static_cast<std::size_t>(g)] = 1.0;
    const double cell = 2.0 * kPi / 1024;
    // min separation eta/2 of 15 cells merges the first two only
    const auto groups =
        superlevel_partition(make_spectrum(mags), 0.5, 2.0 * 15.0 * cell * rate, rate);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].size() == 22);
    CHECK(groups[1].size() == 11);

    // a 5-cell threshold keeps all three apart
    const auto split =
        superlevel_partition(make_spectrum(mags), 0.5, 2.0 * 5.0 * cell * rate, rate);
    CHECK(split.size() == 3);
  }

  SUBCASE("a run straddling the seam stays one group") {
    for (int g = 1015; g < 1024; ++g) mags[static_cast<std::size_t>(g)] = 1.0;
    for (int g = 0; g <= 8; ++g) mags[static_cast<std::size_t>(g)] = 1.0;
    const auto groups = superlevel_partition(make_spectrum(mags), 0.5, 0.01, rate);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].size() == 18);
  }

  SUBCASE("brute-force merge oracle on random masks") {
    GaussianStream g(99);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> m(256, 0.0);
      for (auto& v : m) v = g.next() > 1.2 ? 1.0 : 0.0;
      const double cell = 2.0 * kPi / 256;
      const double eta = 2.0 * 3.0 * cell;  // merge gaps under 3 cells
      const auto groups = superlevel_partition(make_spectrum(m), 0.5, eta, 1.0);

      // oracle: count boundaries where a gap of >= 3 cells separates cells
      std::vector<int> above;
      for (int i = 0; i < 256; ++i) {
        if (m[static_cast<std::size_t>(i)] >= 0.5) above.push_back(i);
      }
      int expected = 0;
      if (!above.empty()) {
        expected = 1;
        for (std::size_t i = 0; i + 1 < above.size(); ++i) {
          if (above[i + 1] - above[i] > 1 &&
              (above[i + 1] - above[i]) * cell >= eta / 2.0) {
            ++expected;
          }
        }
        // circular closure
        const int wrap_gap = above.front() + 256 - above.back();
        if (expected > 1 && wrap_gap > 1 && wrap_gap * cell < eta / 2.0) --expected;
        if (static_cast<int>(above.size()) == 256) expected = 1;
      }
      CHECK(static_cast<int>(groups.size()) == expected);
    }
  }
}

TEST_CASE("peak picking and refinement") {
  const double rate = 1e8;
  const IQRecord r = tone_record(0.42e8, rate, 4001);
  const SnippetPlan plan = SnippetPlan::uniform(r, 2e-6, 9);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  const auto s = snippet_spectrum(r, plan.centers[4], plan, kernel);
  const double tau = percentile_threshold(s, 99.0);
  const auto groups = superlevel_partition(s, tau, 0.05 * rate, rate);
  REQUIRE(!groups.empty());

  const double cell_freq = rate * 2.0 * kPi / plan.grid_size;
  const auto coarse = snippet_peaks(s, groups, rate, 4, false);
  REQUIRE(coarse.size() >= 1);
  double best_gap = 1e18;
  for (const auto& p : coarse) best_gap = std::min(best_gap, std::abs(p.freq - 0.42e8));
  CHECK(best_gap <= cell_freq);

  const auto fine = snippet_peaks(s, groups, rate, 4, true);
  best_gap = 1e18;
  for (const auto& p : fine) best_gap = std::min(best_gap, std::abs(p.freq - 0.42e8));
  CHECK(best_gap <= cell_freq / 4.0);

  for (const auto& p : fine) CHECK(p.magnitude >= tau);
}

TEST_CASE("diagram over a clean tone tracks the frequency everywhere") {
  const double rate = 1e8;
  const double omega = 0.83e8;
  const IQRecord r = tone_record(omega, rate, 20001);
  const SnippetPlan plan = SnippetPlan::uniform(r, 2e-6, 101);
  const Diagram d = build_diagram(r, plan, 0.05 * rate);

  REQUIRE(static_cast<int>(d.points.size()) >= plan.count);
  const double cell_freq = rate * 2.0 * kPi / plan.grid_size;
  for (int k = 0; k < plan.count; ++k) {
    double best = 1e18;
    for (const auto& p : d.points) {
      if (p.snippet_index == k) best = std::min(best, std::abs(p.freq - omega));
    }
    CHECK(best <= cell_freq);
  }
  CHECK(std::is_sorted(d.points.begin(), d.points.end(),
                       [](const DiagramPoint& a, const DiagramPoint& b) {
                         return std::tie(a.snippet_index, a.freq) <
                                std::tie(b.snippet_index, b.freq);
                       }));
}

TEST_CASE("plan advisories") {
  // two well-separated tones, zero sweep: no advisories
  Scenario tones;
  tones.horizon = 1e-4;
  tones.sample_rate = 5e8;
  tones.trains = {{1.0, 1.0e9, 0.0, 9e-5, 1e-6, 0.0, 1}, {1.0, 1.3e9, 0.0, 9e-5, 2e-6, 0.0, 1}};
  const IQRecord quiet_record = synthesize(tones);
  const SnippetPlan wide = SnippetPlan::uniform(quiet_record, 2e-6, 101);
  const auto quiet =
      validate_plan(wide, plan_diagnostics(tones, wide, FilterKind::smooth_bump), tones.sample_rate);
  CHECK(quiet.empty());

  // crossing tracks drive the separation toward zero
  const Scenario s = chirpsep::testing::reference_scenario();
  const IQRecord r = synthesize(s);
  const SnippetPlan plan = SnippetPlan::uniform(r, 2e-6, 2500);
  const auto diag = plan_diagnostics(s, plan, FilterKind::smooth_bump);
  CHECK(diag.m_lower == 1.0);
  CHECK(diag.M_total >= 3.0);
  const auto advisories = validate_plan(plan, diag, s.sample_rate);
  CHECK(!advisories.empty());
}

TEST_CASE("noise floor probe scaling") {
  // V doubled doubles the mean max (same seeds)
  const auto a = noise_floor_probe(256, 1.0, 24, 5);
  const auto b = noise_floor_probe(256, 2.0, 24, 5);
  CHECK(b.mean_max == doctest::Approx(2.0 * a.mean_max).epsilon(1e-9));
  CHECK(a.p95_max >= a.mean_max);

  // growing n shrinks the floor roughly like 1/sqrt(n)
  const auto big = noise_floor_probe(1024, 1.0, 24, 5);
  CHECK(big.mean_max < a.mean_max);
  const double ratio = a.mean_max / big.mean_max;
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.8);
}
