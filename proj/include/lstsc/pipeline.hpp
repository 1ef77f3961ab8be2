#pragma once

#include <span>
#include <string>
#include <vector>

#include "lstsc/erb.hpp"
#include "lstsc/errors.hpp"
#include "lstsc/feature_file.hpp"
#include "lstsc/spatial.hpp"
#include "lstsc/stft.hpp"

namespace lstsc {

struct ExtractOptions {
  StftConfig stft;
  int n_bands = 16;
  int r_frames = 4;
  double lambda_global = 0.999;
  double lambda_local = 0.01;
  double eps = 1e-12;
  int reference_channel = 0;
  bool require_spatial = false;  // error out on mono input instead of degrading
};

struct ExtractResult {
  FeatureFile features;
  CoherenceMap gamma_global;  // empty for mono input
  CoherenceMap gamma_local;
};

// Full feature pipeline: reference-channel ERB spectrum always; global and
// local ERB-scaled coherence streams when the input has two or more
// channels. Mono input degrades to the spectral stream alone unless
// require_spatial is set.
inline ExtractResult extract_features(const std::vector<std::vector<double>>& channels,
                                      const ExtractOptions& opt) {
  opt.stft.validate();
  if (channels.empty()) throw ContractError("extract: no input channels");
  if (opt.reference_channel < 0 || opt.reference_channel >= static_cast<int>(channels.size())) {
    throw UsageError("extract: reference channel out of range");
  }
  const bool spatial = channels.size() >= 2;
  if (!spatial && opt.require_spatial) {
    throw UsageError("extract: spatial streams requested but input is mono");
  }

  const MultichannelSpectrogram spec = analyze(channels, opt.stft);
  const ErbFilterbank fb = build_erb_filterbank(opt.stft, opt.n_bands);

  ExtractResult result;
  if (spatial) {
    RtfConfig cfg_g{.r_frames = opt.r_frames,
                    .lambda = opt.lambda_global,
                    .eps = opt.eps,
                    .reference_channel = opt.reference_channel};
    RtfConfig cfg_l = cfg_g;
    cfg_l.lambda = opt.lambda_local;
    result.gamma_global = coherence_stream(spec, cfg_g);
    result.gamma_local = coherence_stream(spec, cfg_l);
  }

  FeatureFile& ff = result.features;
  ff.n_frames = static_cast<uint32_t>(spec.frames());
  ff.n_bands = static_cast<uint32_t>(opt.n_bands);
  ff.stream_labels = spatial
                         ? std::vector<std::string>{"erb-spectral", "erb-g-lstsc", "erb-l-lstsc"}
                         : std::vector<std::string>{"erb-spectral"};
  ff.sample_rate = static_cast<uint32_t>(opt.stft.sample_rate);
  ff.window_len = static_cast<uint32_t>(opt.stft.window_len);
  ff.hop = static_cast<uint32_t>(opt.stft.hop);
  ff.fft_len = static_cast<uint32_t>(opt.stft.fft_len);
  ff.lambda_global = spatial ? opt.lambda_global : 0.0;
  ff.lambda_local = spatial ? opt.lambda_local : 0.0;
  ff.payload.reserve(static_cast<std::size_t>(ff.n_frames) * ff.n_streams() * ff.n_bands);

  const Spectrogram& ref = spec.channels[opt.reference_channel];
  for (int l = 0; l < spec.frames(); ++l) {
    const auto spectral = erb_spectrum(
        std::span<const std::complex<double>>(
            ref.data.data() + static_cast<std::size_t>(l) * ref.bins, ref.bins),
        fb);
    for (double v : spectral) ff.payload.push_back(static_cast<float>(v));
    if (spatial) {
      for (const CoherenceMap* map : {&result.gamma_global, &result.gamma_local}) {
        const auto bands = erb_coherence(
            std::span<const double>(map->gamma.data() + static_cast<std::size_t>(l) * map->bins,
                                    map->bins),
            fb);
        for (double v : bands) ff.payload.push_back(static_cast<float>(v));
      }
    }
  }
  ff.validate();
  return result;
}

// The ERB-scaled global coherence stream as frames x bands, for scoring.
inline std::vector<std::vector<double>> erb_global_stream(const ExtractResult& result) {
  const FeatureFile& ff = result.features;
  if (ff.n_streams() < 2) throw ContractError("extract: no spatial stream present");
  std::vector<std::vector<double>> out(ff.n_frames, std::vector<double>(ff.n_bands));
  for (uint32_t l = 0; l < ff.n_frames; ++l) {
    for (uint32_t b = 0; b < ff.n_bands; ++b) out[l][b] = ff.at(l, 1, b);
  }
  return out;
}

}  // namespace lstsc
