#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lstsc/erb.hpp"
#include "lstsc/errors.hpp"
#include "lstsc/scene.hpp"
#include "lstsc/spatial.hpp"
#include "lstsc/stft.hpp"

namespace lstsc {

// Per-(frame, band) target-dominance ground truth from clean stems.
struct OracleLabels {
  int frames = 0;
  int bands = 0;
  std::vector<uint8_t> dominant;  // frame-major
  std::vector<uint8_t> valid;
  std::vector<double> margin_db;

  bool is_dominant(int l, int b) const { return dominant[static_cast<std::size_t>(l) * bands + b]; }
  bool is_valid(int l, int b) const { return valid[static_cast<std::size_t>(l) * bands + b]; }
};

// Compares ERB band energies of the target stem against the summed
// interference stems at the reference mic. Cells where both stems sit below
// the silence floor (relative to the clip peak band energy) are invalid.
inline OracleLabels oracle_labels(const LabeledScene& scene, const ErbFilterbank& fb,
                                  const StftConfig& cfg, double silence_floor_db = -80.0) {
  const int ref = scene.spec.reference_mic;
  std::vector<std::size_t> target_idx, interf_idx;
  for (std::size_t j = 0; j < scene.spec.sources.size(); ++j) {
    (scene.spec.sources[j].role == SourceRole::Target ? target_idx : interf_idx).push_back(j);
  }
  if (target_idx.size() != 1 || interf_idx.empty()) {
    throw ContractError("oracle: need exactly one target stem and at least one interference stem");
  }
  if (scene.stems.size() != scene.spec.sources.size()) {
    throw ContractError("oracle: stems missing from scene");
  }

  auto band_energy = [&](const std::vector<double>& signal) {
    const Spectrogram spec = analyze_channel(signal, cfg);
    std::vector<std::vector<double>> e;
    e.reserve(spec.frames);
    for (int l = 0; l < spec.frames; ++l) {
      e.push_back(erb_spectrum(
          std::span<const std::complex<double>>(
              spec.data.data() + static_cast<std::size_t>(l) * spec.bins, spec.bins),
          fb));
    }
    return e;
  };

  const auto target_e = band_energy(scene.stems[target_idx[0]][ref]);
  std::vector<std::vector<double>> interf_e = band_energy(scene.stems[interf_idx[0]][ref]);
  for (std::size_t k = 1; k < interf_idx.size(); ++k) {
    const auto extra = band_energy(scene.stems[interf_idx[k]][ref]);
    for (std::size_t l = 0; l < interf_e.size(); ++l) {
      for (int b = 0; b < fb.n_bands; ++b) interf_e[l][b] += extra[l][b];
    }
  }

  const int frames = static_cast<int>(target_e.size());
  double peak = 0.0;
  for (int l = 0; l < frames; ++l) {
    for (int b = 0; b < fb.n_bands; ++b) {
      peak = std::max({peak, target_e[l][b], interf_e[l][b]});
    }
  }
  const double floor = peak * std::pow(10.0, silence_floor_db / 10.0);

  OracleLabels labels;
  labels.frames = frames;
  labels.bands = fb.n_bands;
  labels.dominant.assign(static_cast<std::size_t>(frames) * fb.n_bands, 0);
  labels.valid.assign(labels.dominant.size(), 0);
  labels.margin_db.assign(labels.dominant.size(), 0.0);
  for (int l = 0; l < frames; ++l) {
    for (int b = 0; b < fb.n_bands; ++b) {
      const std::size_t i = static_cast<std::size_t>(l) * fb.n_bands + b;
      const double te = target_e[l][b], ie = interf_e[l][b];
      labels.valid[i] = (te > floor || ie > floor) ? 1 : 0;
      labels.dominant[i] = (te > ie) ? 1 : 0;  // strict: ties are not dominant
      labels.margin_db[i] = 10.0 * std::log10(std::max(te, 1e-300) / std::max(ie, 1e-300));
    }
  }
  return labels;
}

// Mann-Whitney AUC with half-credit for ties.
inline double rank_auc(std::span<const double> scores, std::span<const uint8_t> positives) {
  if (scores.size() != positives.size()) throw ContractError("auc: score/label length mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (auto p : positives) n_pos += p ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0) throw ContractError("auc: no positive labels");
  if (n_neg == 0) throw ContractError("auc: no negative labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (positives[order[k]]) rank_sum_pos += mean_rank;
    }
    i = j + 1;
  }
  return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

struct DiscriminationReport {
  double auc = 0.0;
  std::vector<double> band_auc;  // NaN for bands missing a class
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

// AUC of (1 - gamma_erb) as a detector of target dominance over all valid
// cells at frame >= first_frame (lets the caller exclude an adaptation
// preroll from scoring).
inline DiscriminationReport score_discrimination(const std::vector<std::vector<double>>& erb_gamma,
                                                 const OracleLabels& labels, int first_frame = 0) {
  const int frames = std::min<int>(static_cast<int>(erb_gamma.size()), labels.frames);
  if (frames == 0) throw ContractError("score: no frames");
  if (static_cast<int>(erb_gamma.front().size()) != labels.bands) {
    throw ContractError("score: band count mismatch");
  }
  std::vector<double> scores;
  std::vector<uint8_t> y;
  std::vector<std::vector<double>> band_scores(labels.bands);
  std::vector<std::vector<uint8_t>> band_y(labels.bands);
  for (int l = std::max(0, first_frame); l < frames; ++l) {
    for (int b = 0; b < labels.bands; ++b) {
      if (!labels.is_valid(l, b)) continue;
      const double s = 1.0 - erb_gamma[l][b];
      const uint8_t lab = labels.is_dominant(l, b) ? 1 : 0;
      scores.push_back(s);
      y.push_back(lab);
      band_scores[b].push_back(s);
      band_y[b].push_back(lab);
    }
  }
  DiscriminationReport report;
  report.auc = rank_auc(scores, y);
  for (auto lab : y) (lab ? report.n_positive : report.n_negative)++;
  report.band_auc.resize(labels.bands);
  for (int b = 0; b < labels.bands; ++b) {
    bool has_pos = false, has_neg = false;
    for (auto lab : band_y[b]) (lab ? has_pos : has_neg) = true;
    report.band_auc[b] = (has_pos && has_neg) ? rank_auc(band_scores[b], band_y[b])
                                              : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

// Scale-invariant SNR in dB of an estimate against a reference.
inline double si_snr(std::span<const double> estimate, std::span<const double> reference) {
  const std::size_t n = std::min(estimate.size(), reference.size());
  if (n == 0) throw ContractError("si-snr: empty signals");
  double mean_e = 0.0, mean_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_e += estimate[i];
    mean_r += reference[i];
  }
  mean_e /= static_cast<double>(n);
  mean_r /= static_cast<double>(n);
  double dot = 0.0, ref_pow = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += (estimate[i] - mean_e) * (reference[i] - mean_r);
    ref_pow += (reference[i] - mean_r) * (reference[i] - mean_r);
  }
  if (ref_pow < 1e-300) throw ContractError("si-snr: reference is silent");
  const double alpha = dot / ref_pow;
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = alpha * (reference[i] - mean_r);
    const double e = (estimate[i] - mean_e) - s;
    sig += s * s;
    err += e * e;
  }
  return 10.0 * std::log10(std::max(sig, 1e-300) / std::max(err, 1e-300));
}

// Binary coherence mask on the reference channel: keep bins whose gamma
// does not exceed the threshold (low coherence with the interferer-adapted
// long-term state marks target-dominant bins), then overlap-add resynthesis.
inline std::vector<double> coherence_mask_enhance(const std::vector<double>& reference_channel,
                                                  const CoherenceMap& coherence, double threshold,
                                                  const StftConfig& cfg) {
  if (threshold < -1.0 || threshold > 1.0) {
    throw ContractError("mask: threshold must lie in [-1, 1], got " + std::to_string(threshold));
  }
  Spectrogram spec = analyze_channel(reference_channel, cfg);
  if (spec.frames != coherence.frames || spec.bins != coherence.bins) {
    throw ContractError("mask: coherence map not aligned with mixture spectrogram");
  }
  for (int l = 0; l < spec.frames; ++l) {
    for (int f = 0; f < spec.bins; ++f) {
      if (coherence.at(l, f) > threshold) spec.at(l, f) = 0.0;
    }
  }
  return synthesize(spec, cfg);
}

struct MaskSweepPoint {
  double threshold = 0.0;
  double si_snr_db = 0.0;
};

struct MaskSweepReport {
  double si_snr_unprocessed_db = 0.0;
  std::vector<MaskSweepPoint> points;
  double best_threshold = 0.0;
  double best_gain_db = 0.0;
};

inline MaskSweepReport mask_threshold_sweep(const std::vector<double>& reference_channel,
                                            const std::vector<double>& target_ref_stem,
                                            const CoherenceMap& coherence, const StftConfig& cfg,
                                            const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ContractError("mask sweep: no thresholds");
  // skip STFT edge transients when scoring
  const std::size_t n = std::min(reference_channel.size(), target_ref_stem.size());
  const std::size_t lo = std::min<std::size_t>(cfg.window_len, n / 4);
  auto trim = [&](std::span<const double> x) {
    const std::size_t m = std::min(x.size(), n);
    return x.subspan(lo, m - 2 * lo);
  };

  MaskSweepReport report;
  report.si_snr_unprocessed_db = si_snr(trim(reference_channel), trim(target_ref_stem));
  report.best_gain_db = -1e30;
  for (double th : thresholds) {
    const auto enhanced = coherence_mask_enhance(reference_channel, coherence, th, cfg);
    MaskSweepPoint pt;
    pt.threshold = th;
    pt.si_snr_db = si_snr(trim(enhanced), trim(target_ref_stem));
    const double gain = pt.si_snr_db - report.si_snr_unprocessed_db;
    if (gain > report.best_gain_db) {
      report.best_gain_db = gain;
      report.best_threshold = th;
    }
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace lstsc
