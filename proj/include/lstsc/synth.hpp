#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lstsc/errors.hpp"

namespace lstsc {

// Deterministic test-signal generators used by scene presets and fixtures.

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, amplitude);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

// One-pole lowpass, softens white noise into a speech-band-ish spectrum.
inline std::vector<double> lowpass(const std::vector<double>& x, double coeff) {
  std::vector<double> out(x.size());
  double state = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    state = coeff * state + (1.0 - coeff) * x[i];
    out[i] = state;
  }
  return out;
}

// Noise gated by raised-cosine bursts: crude speech activity with pauses.
// burst_len/gap_len in samples; the envelope ramps over `ramp` samples.
inline std::vector<double> burst_noise(std::size_t n, std::uint64_t seed, std::size_t burst_len,
                                       std::size_t gap_len, std::size_t ramp = 256,
                                       double lowpass_coeff = 0.6) {
  if (burst_len == 0) throw ContractError("synth: burst_len must be positive");
  auto base = lowpass(white_noise(n, seed), lowpass_coeff);
  const std::size_t period = burst_len + gap_len;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ph = i % period;
    double env = 0.0;
    if (ph < burst_len) {
      env = 1.0;
      if (ph < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * ph / ramp);
      const std::size_t tail = burst_len - ph;
      if (tail < ramp) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * tail / ramp));
    }
    base[i] *= env;
  }
  return base;
}

// Prepends `n` zero samples (interference-only preroll construction).
inline std::vector<double> with_leading_silence(std::vector<double> x, std::size_t n) {
  x.insert(x.begin(), n, 0.0);
  return x;
}

}  // namespace lstsc
