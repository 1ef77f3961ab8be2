#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "lstsc/errors.hpp"
#include "lstsc/fft.hpp"

namespace lstsc {

enum class WindowKind { PeriodicHann, Rectangular };

struct StftConfig {
  int sample_rate = 16000;
  int window_len = 512;
  int hop = 256;
  int fft_len = 512;
  WindowKind window_kind = WindowKind::PeriodicHann;

  void validate() const {
    if (sample_rate <= 0) throw UsageError("stft: sample_rate must be positive");
    if (window_len <= 0 || hop <= 0) throw UsageError("stft: window_len and hop must be positive");
    if (hop > window_len) throw UsageError("stft: hop must not exceed window_len");
    if (fft_len < window_len) throw UsageError("stft: fft_len must be >= window_len");
    if (!is_power_of_two(static_cast<std::size_t>(fft_len))) {
      throw UsageError("stft: fft_len must be a power of two");
    }
  }

  int num_bins() const { return fft_len / 2 + 1; }

  // Frames fully covered by the signal; trailing partial frame is dropped.
  int num_frames(std::size_t signal_len) const {
    if (signal_len < static_cast<std::size_t>(window_len)) return 0;
    return static_cast<int>((signal_len - window_len) / hop) + 1;
  }

  double bin_hz(int f) const {
    return static_cast<double>(f) * sample_rate / static_cast<double>(fft_len);
  }
};

inline std::vector<double> make_window(const StftConfig& cfg) {
  std::vector<double> w(cfg.window_len, 1.0);
  if (cfg.window_kind == WindowKind::PeriodicHann) {
    for (int n = 0; n < cfg.window_len; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.window_len);
    }
  }
  return w;
}

// Single-channel complex STFT, frames x bins.
struct Spectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<std::complex<double>> data;  // frame-major

  Spectrogram() = default;
  Spectrogram(int t, int f) : frames(t), bins(f), data(static_cast<std::size_t>(t) * f) {}

  std::complex<double>& at(int l, int f) { return data[static_cast<std::size_t>(l) * bins + f]; }
  const std::complex<double>& at(int l, int f) const {
    return data[static_cast<std::size_t>(l) * bins + f];
  }
};

struct MultichannelSpectrogram {
  std::vector<Spectrogram> channels;
  StftConfig config;

  int num_channels() const { return static_cast<int>(channels.size()); }
  int frames() const { return channels.empty() ? 0 : channels.front().frames; }
  int bins() const { return channels.empty() ? 0 : channels.front().bins; }

  const std::complex<double>& at(int m, int l, int f) const { return channels[m].at(l, f); }
};

inline Spectrogram analyze_channel(const std::vector<double>& signal, const StftConfig& cfg) {
  cfg.validate();
  if (signal.size() < static_cast<std::size_t>(cfg.window_len)) {
    throw ContractError("stft: signal shorter than one window (" +
                        std::to_string(signal.size()) + " < " +
                        std::to_string(cfg.window_len) + ")");
  }
  const std::vector<double> window = make_window(cfg);
  const int frames = cfg.num_frames(signal.size());
  Spectrogram spec(frames, cfg.num_bins());
  std::vector<double> block(cfg.window_len);
  for (int l = 0; l < frames; ++l) {
    const std::size_t start = static_cast<std::size_t>(l) * cfg.hop;
    for (int n = 0; n < cfg.window_len; ++n) block[n] = signal[start + n] * window[n];
    const auto bins = rfft(block, static_cast<std::size_t>(cfg.fft_len));
    std::copy(bins.begin(), bins.end(), spec.data.begin() + static_cast<std::size_t>(l) * spec.bins);
  }
  return spec;
}

inline MultichannelSpectrogram analyze(const std::vector<std::vector<double>>& channels,
                                       const StftConfig& cfg) {
  if (channels.empty()) throw ContractError("stft: no input channels");
  for (std::size_t m = 1; m < channels.size(); ++m) {
    if (channels[m].size() != channels[0].size()) {
      throw ContractError("stft: channel length mismatch (channel " + std::to_string(m) +
                          " has " + std::to_string(channels[m].size()) + " samples, channel 0 has " +
                          std::to_string(channels[0].size()) + ")");
    }
  }
  MultichannelSpectrogram out;
  out.config = cfg;
  out.channels.reserve(channels.size());
  for (const auto& ch : channels) out.channels.push_back(analyze_channel(ch, cfg));
  return out;
}

// Weighted overlap-add: synthesis window equals the analysis window, output
// normalized by the accumulated squared window. Exact on the interior for any
// config whose squared-window overlap sum stays bounded away from zero.
inline std::vector<double> synthesize(const Spectrogram& spec, const StftConfig& cfg) {
  cfg.validate();
  const std::vector<double> window = make_window(cfg);

  // overlap-add feasibility: the squared window sum must not vanish anywhere
  // in the interior period.
  std::vector<double> period(cfg.hop, 0.0);
  for (int n = 0; n < cfg.window_len; ++n) period[n % cfg.hop] += window[n] * window[n];
  const double wmin = *std::min_element(period.begin(), period.end());
  const double wmax = *std::max_element(period.begin(), period.end());
  if (wmin < 1e-6 * wmax) {
    throw ContractError("stft: window/hop combination does not satisfy overlap-add");
  }

  if (spec.frames == 0) return {};
  if (spec.bins != cfg.num_bins()) {
    throw ContractError("stft: spectrogram bin count does not match config");
  }

  const std::size_t out_len =
      static_cast<std::size_t>(spec.frames - 1) * cfg.hop + cfg.window_len;
  std::vector<double> out(out_len, 0.0);
  std::vector<double> norm(out_len, 0.0);
  std::vector<std::complex<double>> half(spec.bins);
  for (int l = 0; l < spec.frames; ++l) {
    std::copy(spec.data.begin() + static_cast<std::size_t>(l) * spec.bins,
              spec.data.begin() + static_cast<std::size_t>(l + 1) * spec.bins, half.begin());
    const auto block = irfft(half, static_cast<std::size_t>(cfg.fft_len));
    const std::size_t start = static_cast<std::size_t>(l) * cfg.hop;
    for (int n = 0; n < cfg.window_len; ++n) {
      out[start + n] += block[n] * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }
  for (std::size_t i = 0; i < out_len; ++i) {
    if (norm[i] > 1e-12) out[i] /= norm[i];
  }
  return out;
}

}  // namespace lstsc
