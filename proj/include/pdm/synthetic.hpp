#pragma once

// Synthetic run-to-failure fleets in the C-MAPSS file layout. Used as test
// fixtures and as a stand-in when the NASA files are not available.
//
// Each engine runs for a random life L and accumulates wear
// w(t) = w0 + (exp(b t / L) - 1) / (exp(b) - 1); sensors respond linearly to
// wear through a per-fault-mode sensitivity profile, on top of an
// operating-condition baseline and Gaussian noise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pdm/cmapss.hpp"
#include "pdm/rng.hpp"

namespace pdm {

struct SyntheticFleetSpec {
  std::size_t engines = 100;
  int conditions = 1;   // 1 or 6 operating regimes
  int fault_modes = 1;  // 1 or 2
  int min_life = 128;
  double mean_extra_life = 80.0;
  int max_life = 362;
  double noise_scale = 1.0;
};

// Engine counts and life ranges shaped like the four public training sets.
inline SyntheticFleetSpec cmapss_like_spec(SubsetLabel label) {
  switch (label) {
    case SubsetLabel::FD001: return {100, 1, 1, 128, 78.0, 362, 1.0};
    case SubsetLabel::FD002: return {260, 6, 1, 128, 78.0, 378, 1.0};
    case SubsetLabel::FD003: return {100, 1, 2, 145, 102.0, 525, 1.0};
    case SubsetLabel::FD004: return {249, 6, 2, 128, 118.0, 543, 1.0};
    case SubsetLabel::COMBINED: break;
  }
  throw UsageError("no synthetic profile for COMBINED");
}

inline std::vector<EngineRun> generate_fleet(const SyntheticFleetSpec& spec, std::uint64_t seed) {
  if (spec.engines == 0) return {};
  if (spec.conditions != 1 && spec.conditions != 6) throw UsageError("conditions must be 1 or 6");
  if (spec.fault_modes != 1 && spec.fault_modes != 2) throw UsageError("fault modes must be 1 or 2");
  if (spec.min_life < 2 || spec.max_life < spec.min_life) throw UsageError("bad life range");

  // Operating regimes: altitude (kft), Mach, throttle resolver angle.
  static constexpr std::array<std::array<double, 3>, 6> regimes{{{0.0, 0.0, 100.0},
                                                                 {10.0, 0.25, 100.0},
                                                                 {20.0, 0.70, 100.0},
                                                                 {25.0, 0.62, 60.0},
                                                                 {35.0, 0.84, 100.0},
                                                                 {42.0, 0.84, 100.0}}};
  // Sensor baseline at sea level and its sensitivity to altitude/Mach/TRA.
  static constexpr std::array<double, kSensors> base{518.67, 642.0, 1590.0, 1400.0, 14.62, 21.6,  554.0,
                                                     2388.0, 9050.0, 1.3,    47.5,  521.7, 2388.0, 8140.0,
                                                     8.42,   0.03,   392.0,  2388.0, 100.0, 38.9,  23.3};
  static constexpr std::array<double, kSensors> regime_gain{-1.2, -3.0, -8.0, -9.0, -0.2, -0.4, -6.0,
                                                            0.0,  -30.0, 0.0,  -0.6, -5.5, 0.0,  -25.0,
                                                            0.01, 0.0,   -2.0, 0.0,  0.0,  -0.4, -0.25};
  // Wear response per fault mode (0: HPC, 1: HPC + fan) and noise level.
  static constexpr std::array<std::array<double, kSensors>, 2> wear_gain{
      {{0.0, 1.2, 9.0, 12.0, 0.0, 0.0, -2.0, 0.15, 8.0, 0.0, 0.5, -1.6, 0.15, 6.0, 0.05, 0.0, 3.0, 0.0, 0.0,
        -0.5, -0.3},
       {0.0, 1.0, 7.0, 10.0, 0.0, 0.0, 1.5, 0.25, 14.0, 0.0, 0.4, 1.2, 0.25, 11.0, 0.04, 0.0, 2.5, 0.0, 0.0,
        0.6, 0.35}}};
  static constexpr std::array<double, kSensors> noise{0.0,  0.5,  6.0, 9.0,  0.0, 0.002, 0.9,  0.07,
                                                     5.0,  0.0,  0.27, 0.75, 0.07, 4.0,  0.04, 0.0,
                                                     1.5,  0.0,  0.0,  0.18, 0.11};

  Rng rng(seed);
  std::vector<EngineRun> fleet;
  fleet.reserve(spec.engines);
  for (std::size_t u = 0; u < spec.engines; ++u) {
    EngineRun run;
    run.unit_id = static_cast<int>(u + 1);
    run.key = std::to_string(run.unit_id);
    const double extra = -spec.mean_extra_life * std::log(1.0 - rng.uniform());
    const int life = std::min(spec.max_life, spec.min_life + static_cast<int>(extra));
    const double rate = 2.0 + 2.0 * rng.uniform();
    const double w0 = 0.15 * rng.uniform();
    const std::size_t mode = spec.fault_modes == 2 ? static_cast<std::size_t>(rng.below(2)) : 0;
    for (int t = 1; t <= life; ++t) {
      MeasurementRow row;
      row.unit_id = run.unit_id;
      row.cycle = t;
      const auto c = spec.conditions == 6 ? static_cast<std::size_t>(rng.below(6)) : 0;
      const auto& reg = regimes[c];
      row.values[0] = reg[0] + (spec.conditions == 6 ? 0.003 : 0.002) * rng.normal();
      row.values[1] = reg[1] + 0.0003 * rng.normal();
      row.values[2] = reg[2];
      const double regime_level = reg[0] / 10.0 + 2.0 * reg[1] + (100.0 - reg[2]) / 20.0;
      const double wear =
          w0 + (std::exp(rate * t / static_cast<double>(life)) - 1.0) / (std::exp(rate) - 1.0);
      for (std::size_t j = 0; j < kSensors; ++j) {
        const double v = base[j] + regime_gain[j] * regime_level + wear_gain[mode][j] * wear +
                         spec.noise_scale * noise[j] * rng.normal();
        // Rounded like the distributed files.
        row.values[kOpSettings + j] = std::round(v * 1e4) / 1e4;
      }
      run.rows.push_back(row);
    }
    run.failure_cycle = life;
    fleet.push_back(std::move(run));
  }
  return fleet;
}

}  // namespace pdm
