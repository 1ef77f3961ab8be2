#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lstsc/erb.hpp"
#include "lstsc/eval.hpp"
#include "lstsc/pipeline.hpp"
#include "lstsc/scene.hpp"
#include "lstsc/synth.hpp"

using namespace lstsc;

namespace {

// Two-source anechoic scene: stationary interferer plus bursty target with
// an interference-only preroll.
LabeledScene make_fixture(double snr_db, int mics = 4) {
  const int fs = 16000;
  SceneSpec spec;
  spec.geometry = ArrayGeometry::uca(mics, 0.04);
  SourceSpec target;
  target.role = SourceRole::Target;
  target.position = {1.5 * std::cos(0.35), 1.5 * std::sin(0.35), 0.0};
  target.signal = with_leading_silence(burst_noise(4 * fs, 11, 6400, 3200), fs);
  SourceSpec interf;
  interf.role = SourceRole::Interference;
  interf.position = {2.0 * std::cos(2.1), 2.0 * std::sin(2.1), 0.0};
  interf.signal = lowpass(white_noise(5 * fs, 23), 0.3);
  spec.sources = {target, interf};
  spec.snr_db = snr_db;
  return render_scene(spec);
}

}  // namespace

TEST_CASE("oracle labels on single-role scenes") {
  const int fs = 16000;
  SceneSpec spec;
  spec.geometry = ArrayGeometry::uca(2, 0.04);
  SourceSpec target;
  target.role = SourceRole::Target;
  target.position = {1.5, 0.0, 0.0};
  target.signal = std::vector<double>(fs, 0.0);
  SourceSpec interf;
  interf.role = SourceRole::Interference;
  interf.position = {0.0, 2.0, 0.0};
  interf.signal = white_noise(fs, 5);
  spec.sources = {target, interf};
  auto scene = render_scene(spec);

  StftConfig cfg;
  const auto fb = build_erb_filterbank(cfg, 16);

  SUBCASE("interference-only: every valid label is false") {
    const auto labels = oracle_labels(scene, fb, cfg);
    for (int l = 0; l < labels.frames; ++l) {
      for (int b = 0; b < labels.bands; ++b) {
        if (labels.is_valid(l, b)) CHECK_FALSE(labels.is_dominant(l, b));
      }
    }
  }

  SUBCASE("target-only: every valid label is true") {
    scene.spec.sources[0].signal = white_noise(fs, 6);
    std::swap(scene.spec.sources[0].signal, scene.spec.sources[1].signal);
    std::swap(scene.stems[0], scene.stems[1]);  // energy now lives in the target stem
    const auto labels = oracle_labels(scene, fb, cfg);
    int valid = 0;
    for (int l = 0; l < labels.frames; ++l) {
      for (int b = 0; b < labels.bands; ++b) {
        if (labels.is_valid(l, b)) {
          CHECK(labels.is_dominant(l, b));
          ++valid;
        }
      }
    }
    CHECK(valid > 0);
  }

  SUBCASE("equal band energies break toward not-dominant") {
    scene.stems[0] = scene.stems[1];  // identical stems, margin 0 dB
    const auto labels = oracle_labels(scene, fb, cfg);
    for (int l = 0; l < labels.frames; ++l) {
      for (int b = 0; b < labels.bands; ++b) {
        if (labels.is_valid(l, b)) {
          CHECK_FALSE(labels.is_dominant(l, b));
          CHECK(std::abs(labels.margin_db[static_cast<std::size_t>(l) * labels.bands + b]) <
                1e-9);
        }
      }
    }
  }

  SUBCASE("missing stems are an error") {
    scene.stems.pop_back();
    CHECK_THROWS_AS(oracle_labels(scene, fb, cfg), ContractError);
  }
}

TEST_CASE("rank auc basics") {
  SUBCASE("perfect detector") {
    const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
    const std::vector<uint8_t> labels = {1, 1, 0, 0};
    CHECK(rank_auc(scores, labels) == doctest::Approx(1.0));
  }
  SUBCASE("inverted detector") {
    const std::vector<double> scores = {0.1, 0.2, 0.8, 0.9};
    const std::vector<uint8_t> labels = {1, 1, 0, 0};
    CHECK(rank_auc(scores, labels) == doctest::Approx(0.0));
  }
  SUBCASE("random scores sit near chance") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> scores(20000);
    std::vector<uint8_t> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = dist(rng);
      labels[i] = (i % 2 == 0) ? 1 : 0;
    }
    CHECK(rank_auc(scores, labels) == doctest::Approx(0.5).epsilon(0.05));
  }
  SUBCASE("degenerate label sets name the missing class") {
    const std::vector<double> scores = {0.1, 0.2};
    CHECK_THROWS_WITH_AS(rank_auc(scores, std::vector<uint8_t>{1, 1}),
                         "auc: no negative labels", ContractError);
    CHECK_THROWS_WITH_AS(rank_auc(scores, std::vector<uint8_t>{0, 0}),
                         "auc: no positive labels", ContractError);
  }
}

TEST_CASE("rank auc equals brute-force pairwise comparison") {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> score_dist(0, 9);  // forces ties
  std::uniform_int_distribution<int> label_dist(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores(60);
    std::vector<uint8_t> labels(scores.size());
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = score_dist(rng) / 10.0;
      labels[i] = static_cast<uint8_t>(label_dist(rng));
      (labels[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!labels[i]) continue;
      for (std::size_t j = 0; j < scores.size(); ++j) {
        if (labels[j]) continue;
        ++pairs;
        if (scores[i] > scores[j]) {
          wins += 1.0;
        } else if (scores[i] == scores[j]) {
          wins += 0.5;
        }
      }
    }
    CHECK(rank_auc(scores, labels) == doctest::Approx(wins / pairs).epsilon(1e-12));
  }
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(0.01, 1.0);
  std::vector<double> scores(500);
  std::vector<uint8_t> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = dist(rng);
    labels[i] = (scores[i] + 0.3 * dist(rng) > 0.7) ? 1 : 0;
  }
  const double base = rank_auc(scores, labels);
  std::vector<double> transformed(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    transformed[i] = std::exp(3.0 * scores[i]) - 5.0;
  }
  CHECK(rank_auc(transformed, labels) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("score_discrimination with synthetic features") {
  OracleLabels labels;
  labels.frames = 10;
  labels.bands = 4;
  labels.dominant.assign(40, 0);
  labels.valid.assign(40, 1);
  labels.margin_db.assign(40, 0.0);
  std::vector<std::vector<double>> gamma(10, std::vector<double>(4, 0.0));
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> flip(0, 1);
  for (int l = 0; l < 10; ++l) {
    for (int b = 0; b < 4; ++b) {
      const int dominant = flip(rng);
      labels.dominant[static_cast<std::size_t>(l) * 4 + b] = static_cast<uint8_t>(dominant);
      // feature = labels mapped {true -> 0, false -> 1}; detector is 1-gamma
      gamma[l][b] = dominant ? 0.0 : 1.0;
    }
  }
  const auto report = score_discrimination(gamma, labels);
  CHECK(report.auc == doctest::Approx(1.0));
  CHECK(report.n_positive + report.n_negative == 40);
}

TEST_CASE("si-snr rewards matching signals and ignores scale") {
  const auto x = white_noise(4000, 31);
  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 7.3 * x[i];
  CHECK(si_snr(scaled, x) > 100.0);

  auto noisy = x;
  const auto noise = white_noise(4000, 32, 0.5);
  for (std::size_t i = 0; i < x.size(); ++i) noisy[i] += noise[i];
  const double snr = si_snr(noisy, x);
  CHECK(snr > 3.0);
  CHECK(snr < 12.0);
}

TEST_CASE("coherence mask extremes") {
  const auto scene = make_fixture(0.0);
  StftConfig cfg;
  RtfConfig rtf = RtfConfig::global();
  const auto spec = analyze(scene.mixture, cfg);
  const auto gamma = coherence_stream(spec, rtf);
  const auto& ref = scene.mixture[0];

  SUBCASE("threshold 1 passes everything through") {
    const auto out = coherence_mask_enhance(ref, gamma, 1.0, cfg);
    double err = 0.0, sig = 0.0;
    for (std::size_t i = cfg.window_len; i + cfg.window_len < out.size(); ++i) {
      const double d = out[i] - ref[i];
      err += d * d;
      sig += ref[i] * ref[i];
    }
    CHECK(10.0 * std::log10(err / sig) < -50.0);
  }

  SUBCASE("threshold -1 rejects nearly everything") {
    const auto out = coherence_mask_enhance(ref, gamma, -1.0, cfg);
    double out_pow = 0.0, ref_pow = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out_pow += out[i] * out[i];
      ref_pow += ref[i] * ref[i];
    }
    CHECK(out_pow < 1e-6 * ref_pow);
  }

  SUBCASE("threshold outside the coherence range is an error") {
    CHECK_THROWS_AS(coherence_mask_enhance(ref, gamma, 1.5, cfg), ContractError);
  }
}

TEST_CASE("mask threshold sweep finds a positive-gain threshold at 0 dB") {
  const auto scene = make_fixture(0.0);
  StftConfig cfg;
  const auto spec = analyze(scene.mixture, cfg);
  const auto gamma = coherence_stream(spec, RtfConfig::global());
  std::vector<double> thresholds;
  for (int i = -8; i <= 9; ++i) thresholds.push_back(0.1 * i);
  for (double th : {0.95, 0.97, 0.99, 0.995, 0.999}) thresholds.push_back(th);
  const auto sweep =
      mask_threshold_sweep(scene.mixture[0], scene.stems[0][0], gamma, cfg, thresholds);
  CHECK(sweep.best_gain_db > 0.0);
}

TEST_CASE("end-to-end scale invariance of labels and coherence") {
  auto scene = make_fixture(5.0, 2);
  StftConfig cfg;
  const auto fb = build_erb_filterbank(cfg, 16);
  const auto labels_a = oracle_labels(scene, fb, cfg);
  const auto gamma_a = coherence_stream(analyze(scene.mixture, cfg), RtfConfig::global());

  for (auto& stem : scene.stems) {
    for (auto& ch : stem) {
      for (double& v : ch) v *= 4.5;
    }
  }
  for (auto& ch : scene.mixture) {
    for (double& v : ch) v *= 4.5;
  }
  const auto labels_b = oracle_labels(scene, fb, cfg);
  const auto gamma_b = coherence_stream(analyze(scene.mixture, cfg), RtfConfig::global());

  CHECK(labels_a.dominant == labels_b.dominant);
  CHECK(labels_a.valid == labels_b.valid);
  for (std::size_t i = 0; i < gamma_a.gamma.size(); ++i) {
    CHECK(std::abs(gamma_a.gamma[i] - gamma_b.gamma[i]) < 1e-9);
  }
}

TEST_CASE("discrimination fixture separates target-dominant cells") {
  const auto scene = make_fixture(5.0);
  StftConfig cfg;
  ExtractOptions opt;
  opt.stft = cfg;
  const auto result = extract_features(scene.mixture, opt);
  const auto fb = build_erb_filterbank(cfg, 16);
  const auto labels = oracle_labels(scene, fb, cfg);
  const int preroll_frames = 16000 / cfg.hop;
  const auto report =
      score_discrimination(erb_global_stream(result), labels, preroll_frames);
  CHECK(report.auc > 0.8);
}
