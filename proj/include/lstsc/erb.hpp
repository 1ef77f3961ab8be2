#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <span>
#include <vector>

#include "lstsc/errors.hpp"
#include "lstsc/spatial.hpp"
#include "lstsc/stft.hpp"

namespace lstsc {

// Glasberg-Moore ERB-rate scale.
inline double hz_to_erb_rate(double hz) { return 21.4 * std::log10(4.37e-3 * hz + 1.0); }
inline double erb_rate_to_hz(double erb) { return (std::pow(10.0, erb / 21.4) - 1.0) / 4.37e-3; }

// Triangular bands with 50% overlap, centers uniformly spaced on the
// ERB-rate scale. The lowest and highest bands are half-triangles clamped
// flat at DC and Nyquist so every bin is covered.
struct ErbFilterbank {
  int n_bands = 0;
  int n_bins = 0;
  std::vector<double> weights;      // band-major, n_bands x n_bins
  std::vector<double> normalizers;  // per band, sum of weights
  std::vector<double> center_hz;

  double weight(int b, int f) const { return weights[static_cast<std::size_t>(b) * n_bins + f]; }
};

inline ErbFilterbank build_erb_filterbank(const StftConfig& cfg, int n_bands = 16) {
  cfg.validate();
  if (n_bands < 2) throw UsageError("erb: n_bands must be at least 2");
  const int n_bins = cfg.num_bins();
  const double nyquist = cfg.sample_rate / 2.0;
  const double erb_lo = hz_to_erb_rate(0.0);
  const double erb_hi = hz_to_erb_rate(nyquist);

  ErbFilterbank fb;
  fb.n_bands = n_bands;
  fb.n_bins = n_bins;
  fb.weights.assign(static_cast<std::size_t>(n_bands) * n_bins, 0.0);
  fb.center_hz.resize(n_bands);

  std::vector<double> centers_erb(n_bands);
  for (int b = 0; b < n_bands; ++b) {
    centers_erb[b] = erb_lo + (b + 1) * (erb_hi - erb_lo) / (n_bands + 1);
    fb.center_hz[b] = erb_rate_to_hz(centers_erb[b]);
  }

  for (int f = 0; f < n_bins; ++f) {
    const double e = hz_to_erb_rate(cfg.bin_hz(f));
    for (int b = 0; b < n_bands; ++b) {
      const double c = centers_erb[b];
      double w = 0.0;
      if (e <= c) {
        if (b == 0) {
          w = 1.0;  // clamped low edge
        } else {
          const double prev = centers_erb[b - 1];
          if (e >= prev) w = (e - prev) / (c - prev);
        }
      } else {
        if (b == n_bands - 1) {
          w = 1.0;  // clamped high edge
        } else {
          const double next = centers_erb[b + 1];
          if (e <= next) w = (next - e) / (next - c);
        }
      }
      fb.weights[static_cast<std::size_t>(b) * n_bins + f] = w;
    }
  }

  fb.normalizers.resize(n_bands);
  for (int b = 0; b < n_bands; ++b) {
    double pi_b = 0.0;
    for (int f = 0; f < n_bins; ++f) pi_b += fb.weight(b, f);
    if (pi_b <= 0.0) {
      throw UsageError("erb: " + std::to_string(n_bands) + " bands is too many for " +
                       std::to_string(n_bins) + " bins (band " + std::to_string(b) +
                       " owns no bin)");
    }
    fb.normalizers[b] = pi_b;
  }
  return fb;
}

// Band energies of one complex spectrum frame: sum_f w_b(f) |Y(f)|^2.
inline std::vector<double> erb_spectrum(std::span<const std::complex<double>> frame,
                                        const ErbFilterbank& fb) {
  if (static_cast<int>(frame.size()) != fb.n_bins) {
    throw ContractError("erb: frame has " + std::to_string(frame.size()) + " bins, filterbank " +
                        std::to_string(fb.n_bins));
  }
  std::vector<double> out(fb.n_bands, 0.0);
  for (int b = 0; b < fb.n_bands; ++b) {
    double acc = 0.0;
    for (int f = 0; f < fb.n_bins; ++f) acc += fb.weight(b, f) * std::norm(frame[f]);
    out[b] = acc;
  }
  return out;
}

// Band energies of a precomputed power spectrum frame.
inline std::vector<double> erb_power(std::span<const double> power, const ErbFilterbank& fb) {
  if (static_cast<int>(power.size()) != fb.n_bins) {
    throw ContractError("erb: power frame bin count mismatch");
  }
  std::vector<double> out(fb.n_bands, 0.0);
  for (int b = 0; b < fb.n_bands; ++b) {
    double acc = 0.0;
    for (int f = 0; f < fb.n_bins; ++f) acc += fb.weight(b, f) * power[f];
    out[b] = acc;
  }
  return out;
}

// Normalized weighted mean of a coherence frame per band.
inline std::vector<double> erb_coherence(std::span<const double> gamma_frame,
                                         const ErbFilterbank& fb) {
  if (static_cast<int>(gamma_frame.size()) != fb.n_bins) {
    throw ContractError("erb: coherence frame has " + std::to_string(gamma_frame.size()) +
                        " bins, filterbank " + std::to_string(fb.n_bins));
  }
  std::vector<double> out(fb.n_bands, 0.0);
  for (int b = 0; b < fb.n_bands; ++b) {
    double acc = 0.0;
    for (int f = 0; f < fb.n_bins; ++f) acc += fb.weight(b, f) * gamma_frame[f];
    out[b] = acc / fb.normalizers[b];
  }
  return out;
}

// Full-map reduction, frame by frame; rows are frames, columns bands.
inline std::vector<std::vector<double>> erb_coherence_map(const CoherenceMap& map,
                                                          const ErbFilterbank& fb) {
  std::vector<std::vector<double>> out;
  out.reserve(map.frames);
  for (int l = 0; l < map.frames; ++l) {
    out.push_back(erb_coherence(
        std::span<const double>(map.gamma.data() + static_cast<std::size_t>(l) * map.bins,
                                map.bins),
        fb));
  }
  return out;
}

inline void write_filterbank_csv(const ErbFilterbank& fb, const StftConfig& cfg,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("erb: cannot open '" + path + "' for writing");
  out << "band,center_hz,normalizer";
  for (int f = 0; f < fb.n_bins; ++f) out << ",w_bin" << f;
  out << "\n";
  for (int b = 0; b < fb.n_bands; ++b) {
    out << b << "," << fb.center_hz[b] << "," << fb.normalizers[b];
    for (int f = 0; f < fb.n_bins; ++f) out << "," << fb.weight(b, f);
    out << "\n";
  }
  (void)cfg;
}

}  // namespace lstsc
