// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Fixtures are desk-scale synthetic scenes; thresholds are fixed
// regression bars.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "acoustic_checks.hpp"
#include "lstsc/erb.hpp"
#include "lstsc/eval.hpp"
#include "lstsc/pipeline.hpp"
#include "lstsc/scene.hpp"
#include "lstsc/spatial.hpp"
#include "lstsc/stft.hpp"
#include "lstsc/synth.hpp"
#include "naive_reference.hpp"

using namespace lstsc;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-38s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MultichannelSpectrogram random_spectrogram(int channels, int frames, int bins, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  MultichannelSpectrogram spec;
  spec.config = StftConfig{};
  for (int m = 0; m < channels; ++m) {
    Spectrogram ch(frames, bins);
    for (auto& v : ch.data) v = {dist(rng), dist(rng)};
    spec.channels.push_back(std::move(ch));
  }
  return spec;
}

// Discrimination fixture: anechoic two-source scene, target and interferer
// about 160 degrees apart, bursty target behind a 1-s interference-only
// preroll. The sources are mirror images across the x axis, which is the
// baseline of the 2-mic array: a two-element array cannot tell them apart,
// so discrimination must improve as elements are added off that axis.
LabeledScene discrimination_scene(double snr_db, const ArrayGeometry& geometry) {
  const int fs = 16000;
  SceneSpec spec;
  spec.geometry = geometry;
  SourceSpec target;
  target.role = SourceRole::Target;
  target.position = {1.5 * std::cos(1.4), 1.5 * std::sin(1.4), 0.0};
  target.signal = with_leading_silence(burst_noise(7 * fs, 11, 8000, 4000), fs);
  SourceSpec interf;
  interf.role = SourceRole::Interference;
  interf.position = {2.0 * std::cos(-1.4), 2.0 * std::sin(-1.4), 0.0};
  interf.signal = lowpass(white_noise(8 * fs, 23), 0.25);
  spec.sources = {target, interf};
  spec.snr_db = snr_db;
  return render_scene(spec);
}

double fixture_auc(const LabeledScene& scene) {
  StftConfig cfg;
  ExtractOptions opt;
  const auto result = extract_features(scene.mixture, opt);
  const auto fb = build_erb_filterbank(cfg, 16);
  const auto labels = oracle_labels(scene, fb, cfg);
  const int preroll_frames = 16000 / cfg.hop;
  return score_discrimination(erb_global_stream(result), labels, preroll_frames).auc;
}

void criterion_1_whitening() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(101);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::uniform_real_distribution<double> scale_dist(-40.0, 4.0);
  bool ok = true;
  for (int i = 0; i < 100000; ++i) {
    const double scale = std::pow(10.0, scale_dist(rng));
    std::vector<std::complex<double>> v = {{scale * dist(rng), scale * dist(rng)}};
    whiten_inplace(v, 1e-12);
    const double mag = std::abs(v[0]);
    if (!(mag == 0.0 || std::abs(mag - 1.0) <= 1e-9)) ok = false;
  }
  const double dt = seconds_since(t0);
  report(1, "whitening unit-modulus invariant", ok && dt < 1.0,
         "1e5 inputs in " + std::to_string(dt) + " s");
}

void criterion_2_coherence_fixed_points() {
  std::mt19937 rng(102);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::complex<double>> r(3), neg(3);
    for (int i = 0; i < 3; ++i) {
      r[i] = std::polar(1.0, phase(rng));
      neg[i] = -r[i];
    }
    if (std::abs(spatial_coherence(r, r) - 1.0) > 1e-9) ok = false;
    if (std::abs(spatial_coherence(r, neg) + 1.0) > 1e-9) ok = false;
  }
  // range over random whitened vectors
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::complex<double>> a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = std::polar(1.0, phase(rng));
      b[i] = std::polar(1.0, phase(rng));
    }
    const double g = spatial_coherence(a, b);
    if (g < -1.0 || g > 1.0) ok = false;
  }
  report(2, "coherence range and fixed points", ok, "gamma(r,r)=1, gamma(r,-r)=-1, |gamma|<=1");
}

void criterion_3_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double max_err = 0.0;
  for (int channels : {2, 3, 4}) {
    const auto spec = random_spectrogram(channels, 50, 17, 300 + channels);
    for (double lambda : {0.999, 0.3, 0.01}) {
      RtfConfig cfg;
      cfg.lambda = lambda;
      const auto got = coherence_stream(spec, cfg);
      const auto want = naive::coherence_map(spec, cfg);
      for (int l = 0; l < 50; ++l) {
        for (int f = 0; f < 17; ++f) {
          max_err = std::max(max_err, std::abs(got.at(l, f) - want[l][f]));
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  report(3, "naive-oracle equivalence", max_err < 1e-9 && dt < 10.0,
         "max |err| = " + std::to_string(max_err));
}

void criterion_4_erb_reduction() {
  StftConfig cfg;
  const auto fb = build_erb_filterbank(cfg, 16);
  bool ok = true;
  for (double c : {-0.7, 0.0, 0.53, 1.0}) {
    for (double v : erb_coherence(std::vector<double>(fb.n_bins, c), fb)) {
      if (std::abs(v - c) > 1e-12) ok = false;
    }
  }
  std::mt19937 rng(104);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::complex<double>> frame(fb.n_bins);
  for (auto& v : frame) v = {dist(rng), dist(rng)};
  const auto got = erb_spectrum(frame, fb);
  for (int b = 0; b < fb.n_bands; ++b) {
    double want = 0.0;
    for (int f = 0; f < fb.n_bins; ++f) want += fb.weight(b, f) * std::norm(frame[f]);
    if (std::abs(got[b] - want) > 1e-9 * std::max(1.0, std::abs(want))) ok = false;
  }
  report(4, "erb reduction correctness", ok, "constant field exact, spectrum matches brute force");
}

void criterion_5_rtf_ground_truth() {
  const auto t0 = std::chrono::steady_clock::now();
  const int fs = 16000;
  const double c = 343.0;
  SceneSpec spec;
  spec.geometry = ArrayGeometry::uca(4, 0.04);
  SourceSpec src;
  src.role = SourceRole::Target;
  src.position = {1.8 * std::cos(0.6), 1.8 * std::sin(0.6), 0.0};
  src.signal = white_noise(2 * fs, 177);
  spec.sources.push_back(src);
  const auto scene = render_scene(spec);

  StftConfig cfg;
  const auto mc = analyze(scene.mixture, cfg);
  RtfConfig rtf_cfg;
  double max_phase_err = 0.0;
  const double d0 = distance(spec.geometry.mic_positions[0], src.position);
  for (int l : {40, 60, 80}) {  // steady frames
    for (int f = 3; f < cfg.num_bins(); ++f) {
      const double freq = cfg.bin_hz(f);
      if (freq >= 4000.0) break;
      const auto est = short_term_rtf(mc, l, f, rtf_cfg);
      for (int m = 1; m < 4; ++m) {
        const double dm = distance(spec.geometry.mic_positions[m], src.position);
        const double expected = -2.0 * std::numbers::pi * freq * (dm - d0) / c;
        max_phase_err =
            std::max(max_phase_err, std::abs(std::arg(est[m - 1] * std::polar(1.0, -expected))));
      }
    }
  }
  const double dt = seconds_since(t0);
  report(5, "free-field RTF phase ground truth", max_phase_err < 0.05 && dt < 30.0,
         "max phase err = " + std::to_string(max_phase_err) + " rad");
}

void criterion_6_stationary_interferer() {
  const int fs = 16000;
  SceneSpec spec;
  spec.geometry = ArrayGeometry::uca(4, 0.04);
  SourceSpec interf;
  interf.role = SourceRole::Interference;
  interf.position = {2.0 * std::cos(2.1), 2.0 * std::sin(2.1), 0.0};
  interf.signal = lowpass(white_noise(3 * fs, 223), 0.3);
  spec.sources.push_back(interf);
  const auto scene = render_scene(spec);

  StftConfig cfg;
  const auto mc = analyze(scene.mixture, cfg);
  const auto gamma = coherence_stream(mc, RtfConfig::global());

  // active bins: interferer energy above -60 dB of the per-bin peak
  std::vector<double> peak(mc.bins(), 0.0);
  for (int l = 0; l < mc.frames(); ++l) {
    for (int f = 0; f < mc.bins(); ++f) {
      peak[f] = std::max(peak[f], std::norm(mc.at(0, l, f)));
    }
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (int l = 50; l < gamma.frames; ++l) {
    for (int f = 1; f < gamma.bins; ++f) {
      if (std::norm(mc.at(0, l, f)) > 1e-6 * peak[f]) {
        sum += gamma.at(l, f);
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);
  report(6, "stationary-interferer coherence", mean >= 0.95,
         "mean gamma = " + std::to_string(mean) + " over " + std::to_string(count) + " bins");
}

void criterion_7_discrimination(double& auc4_at_5db) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto geometry = ArrayGeometry::uca(4, 0.04);
  const double auc5 = fixture_auc(discrimination_scene(5.0, geometry));
  const double auc0 = fixture_auc(discrimination_scene(0.0, geometry));
  auc4_at_5db = auc5;
  const double dt = seconds_since(t0);
  report(7, "discrimination fixture AUC", auc5 >= 0.85 && auc0 >= 0.70 && dt < 60.0,
         "auc@5dB = " + std::to_string(auc5) + ", auc@0dB = " + std::to_string(auc0));
}

void criterion_8_geometry_agnosticism(double auc4_at_5db) {
  StftConfig cfg;
  ExtractOptions opt;
  std::vector<double> aucs;
  std::vector<uint32_t> band_counts;
  for (int mics : {2, 3, 4}) {
    const auto scene = discrimination_scene(5.0, ArrayGeometry::uca(mics, 0.04));
    const auto result = extract_features(scene.mixture, opt);
    band_counts.push_back(result.features.n_bands);
    aucs.push_back(fixture_auc(scene));
  }

  // 4-mic geometry never used for tuning: a square array with a different
  // aperture
  ArrayGeometry square;
  square.mic_positions = {{0.03, 0.03, 0.0}, {-0.03, 0.03, 0.0}, {-0.03, -0.03, 0.0},
                          {0.03, -0.03, 0.0}};
  const auto unseen_scene = discrimination_scene(5.0, square);
  const auto unseen = extract_features(unseen_scene.mixture, opt);
  band_counts.push_back(unseen.features.n_bands);
  const double unseen_auc = fixture_auc(unseen_scene);

  bool dims_ok = true;
  for (uint32_t b : band_counts) {
    if (b != 16) dims_ok = false;
  }
  const bool monotone = aucs[0] <= aucs[1] + 1e-12 && aucs[1] <= aucs[2] + 1e-12;
  (void)auc4_at_5db;
  report(8, "geometry/count agnosticism", dims_ok && monotone && unseen_auc > 0.7,
         "auc(2,3,4) = " + std::to_string(aucs[0]) + ", " + std::to_string(aucs[1]) + ", " +
             std::to_string(aucs[2]) + "; unseen 4-mic auc = " + std::to_string(unseen_auc));
}

void criterion_9_masking() {
  const auto scene = discrimination_scene(0.0, ArrayGeometry::uca(4, 0.04));
  StftConfig cfg;
  const auto spec = analyze(scene.mixture, cfg);
  const auto gamma = coherence_stream(spec, RtfConfig::global());
  // Interferer-dominant bins sit very close to gamma = 1, so the useful
  // operating points cluster just below 1; sample that region densely.
  std::vector<double> thresholds;
  for (int i = -8; i <= 9; ++i) thresholds.push_back(0.1 * i);
  for (double th : {0.95, 0.97, 0.99, 0.995, 0.999}) thresholds.push_back(th);
  const auto sweep =
      mask_threshold_sweep(scene.mixture[0], scene.stems[0][0], gamma, cfg, thresholds);
  report(9, "coherence masking gain", sweep.best_gain_db > 0.0,
         "best si-snr gain = " + std::to_string(sweep.best_gain_db) + " dB at threshold " +
             std::to_string(sweep.best_threshold));
}

void criterion_10_image_source() {
  RoomSpec room{{5.0, 4.0, 3.0}, 0.0};
  ArrayGeometry g;
  g.mic_positions = {{2.5, 2.0, 1.5}};
  bool ok = true;
  std::string detail;
  for (double t60 : {0.32, 0.48, 0.60}) {
    room.t60 = t60;
    const auto rirs = image_source_rir(room, g, {1.4, 2.9, 1.2}, 16000);
    const double measured = acoustic::schroeder_t60(rirs[0], 16000);
    if (!(measured > 0.8 * t60 && measured < 1.2 * t60)) ok = false;
    detail += std::to_string(t60) + "->" + std::to_string(measured) + "s ";
  }
  report(10, "image-source decay plausibility", ok, detail);
}

void criterion_11_stft_round_trip() {
  StftConfig cfg;
  std::mt19937 rng(111);
  std::normal_distribution<double> dist(0.0, 1.0);
  double worst = -1e30;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> x(16000);
    for (auto& v : x) v = dist(rng);
    const auto y = synthesize(analyze({x}, cfg).channels[0], cfg);
    double err = 0.0, sig = 0.0;
    for (std::size_t i = cfg.window_len; i + cfg.window_len < y.size(); ++i) {
      const double d = y[i] - x[i];
      err += d * d;
      sig += x[i] * x[i];
    }
    worst = std::max(worst, 10.0 * std::log10(err / sig));
  }
  report(11, "stft round trip", worst <= -50.0, "worst interior error = " + std::to_string(worst) +
                                                   " dB");
}

}  // namespace

int main() {
  criterion_1_whitening();
  criterion_2_coherence_fixed_points();
  criterion_3_oracle_equivalence();
  criterion_4_erb_reduction();
  criterion_5_rtf_ground_truth();
  criterion_6_stationary_interferer();
  double auc4 = 0.0;
  criterion_7_discrimination(auc4);
  criterion_8_geometry_agnosticism(auc4);
  criterion_9_masking();
  criterion_10_image_source();
  criterion_11_stft_round_trip();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
