// lstsc command-line tool: feature extraction, scene simulation, and
// feature-quality evaluation for multichannel audio.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lstsc/erb.hpp"
#include "lstsc/errors.hpp"
#include "lstsc/eval.hpp"
#include "lstsc/feature_file.hpp"
#include "lstsc/pipeline.hpp"
#include "lstsc/scene.hpp"
#include "lstsc/scene_config.hpp"
#include "lstsc/spatial.hpp"
#include "lstsc/stft.hpp"
#include "lstsc/wav.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
  double lambda_global = 0.999;
  double lambda_local = 0.01;
  int r_frames = 4;
  int bands = 16;
  int ref_channel = 0;
};

void add_common(CLI::App* app, CommonOpts& opts) {
  app->add_option("--lambda-global", opts.lambda_global, "Global forgetting factor");
  app->add_option("--lambda-local", opts.lambda_local, "Local forgetting factor");
  app->add_option("--r-frames", opts.r_frames, "Short-term RTF averaging span (even)");
  app->add_option("--bands", opts.bands, "Number of ERB bands");
  app->add_option("--ref-channel", opts.ref_channel, "Reference channel index (0-based)");
}

lstsc::ExtractOptions make_extract_options(const CommonOpts& opts, int sample_rate) {
  lstsc::ExtractOptions eo;
  eo.stft.sample_rate = sample_rate;
  eo.n_bands = opts.bands;
  eo.r_frames = opts.r_frames;
  eo.lambda_global = opts.lambda_global;
  eo.lambda_local = opts.lambda_local;
  eo.reference_channel = opts.ref_channel;
  return eo;
}

void write_feature_csv(const lstsc::FeatureFile& ff, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw lstsc::IoError("csv: cannot open '" + path + "' for writing");
  out << "frame";
  for (uint32_t s = 0; s < ff.n_streams(); ++s) {
    for (uint32_t b = 0; b < ff.n_bands; ++b) {
      out << "," << ff.stream_labels[s] << "_b" << b;
    }
  }
  out << "\n";
  for (uint32_t l = 0; l < ff.n_frames; ++l) {
    out << l;
    for (uint32_t s = 0; s < ff.n_streams(); ++s) {
      for (uint32_t b = 0; b < ff.n_bands; ++b) out << "," << ff.at(l, s, b);
    }
    out << "\n";
  }
}

int run_extract(const std::string& input, const std::string& out_path, const std::string& csv_path,
                const CommonOpts& opts, int expect_rate, bool require_spatial) {
  lstsc::AudioBuffer buf = lstsc::read_wav(input);
  if (buf.sample_rate != expect_rate) {
    throw lstsc::IoError("extract: '" + input + "' has sample rate " +
                         std::to_string(buf.sample_rate) + ", expected " +
                         std::to_string(expect_rate));
  }
  lstsc::ExtractOptions eo = make_extract_options(opts, expect_rate);
  eo.require_spatial = require_spatial;
  const lstsc::ExtractResult result = lstsc::extract_features(buf.channels, eo);
  lstsc::write_feature_file(result.features, out_path);
  if (!csv_path.empty()) write_feature_csv(result.features, csv_path);
  std::cout << "extracted " << result.features.n_frames << " frames x "
            << result.features.n_streams() << " streams x " << result.features.n_bands
            << " bands -> " << out_path << "\n";
  return 0;
}

int run_simulate(const std::string& config, const std::string& preset, const std::string& out_dir) {
  lstsc::ResolvedScene resolved =
      preset.empty() ? lstsc::load_scene_config(config) : lstsc::make_preset_scene(preset);
  const lstsc::LabeledScene scene = lstsc::render_scene(resolved.spec);
  lstsc::write_scene(scene, resolved, out_dir);
  std::cout << "rendered scene '" << resolved.name << "' (" << scene.spec.geometry.num_mics()
            << " mics, " << scene.spec.sources.size() << " sources) -> " << out_dir << "\n";
  return 0;
}

int run_evaluate(const std::string& scene_dir, const std::string& out_csv, bool mask_sweep,
                 double preroll_override, const CommonOpts& opts) {
  auto [scene, preroll_seconds] = lstsc::read_scene(scene_dir);
  if (preroll_override >= 0.0) preroll_seconds = preroll_override;

  const int fs = scene.spec.sample_rate;
  lstsc::ExtractOptions eo = make_extract_options(opts, fs);
  const lstsc::ExtractResult result = lstsc::extract_features(scene.mixture, eo);
  const lstsc::ErbFilterbank fb = lstsc::build_erb_filterbank(eo.stft, eo.n_bands);
  const lstsc::OracleLabels labels = lstsc::oracle_labels(scene, fb, eo.stft);

  const int preroll_frames =
      static_cast<int>(preroll_seconds * fs / eo.stft.hop);
  const lstsc::DiscriminationReport report = lstsc::score_discrimination(
      lstsc::erb_global_stream(result), labels, preroll_frames);

  std::cout << "scene=" << scene_dir << " snr_db=" << scene.spec.snr_db
            << " mics=" << scene.spec.geometry.num_mics() << " auc=" << report.auc
            << " n_pos=" << report.n_positive << " n_neg=" << report.n_negative << "\n";

  std::ofstream csv;
  if (!out_csv.empty()) {
    csv.open(out_csv);
    if (!csv) throw lstsc::IoError("evaluate: cannot open '" + out_csv + "' for writing");
    csv << "metric,band,value\n";
    csv << "auc,all," << report.auc << "\n";
    for (std::size_t b = 0; b < report.band_auc.size(); ++b) {
      csv << "auc," << b << "," << report.band_auc[b] << "\n";
    }
  }

  if (mask_sweep) {
    std::size_t target_idx = scene.spec.sources.size();
    for (std::size_t j = 0; j < scene.spec.sources.size(); ++j) {
      if (scene.spec.sources[j].role == lstsc::SourceRole::Target) target_idx = j;
    }
    if (target_idx == scene.spec.sources.size()) {
      throw lstsc::ContractError("evaluate: mask sweep needs a target stem");
    }
    std::vector<double> thresholds;
    for (int i = -9; i <= 9; ++i) thresholds.push_back(0.1 * i);
    for (double th : {0.95, 0.97, 0.99, 0.995, 0.999}) thresholds.push_back(th);
    const auto sweep = lstsc::mask_threshold_sweep(
        scene.mixture[scene.spec.reference_mic], scene.stems[target_idx][scene.spec.reference_mic],
        result.gamma_global, eo.stft, thresholds);
    std::cout << "mask sweep: unprocessed si-snr=" << sweep.si_snr_unprocessed_db
              << " dB, best gain=" << sweep.best_gain_db << " dB at threshold "
              << sweep.best_threshold << "\n";
    if (csv.is_open()) {
      csv << "si_snr_unprocessed,all," << sweep.si_snr_unprocessed_db << "\n";
      for (const auto& pt : sweep.points) {
        csv << "si_snr_threshold_" << pt.threshold << ",all," << pt.si_snr_db << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ERB-scaled long-short-term spatial coherence feature toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;

  // extract
  auto* extract = app.add_subcommand("extract", "Compute ERB features from a multichannel WAV");
  std::string ex_input, ex_out = "features.lstsc", ex_csv;
  int ex_rate = 16000;
  bool ex_require_spatial = false;
  extract->add_option("input", ex_input, "Input WAV path")->required();
  extract->add_option("--out", ex_out, "Output feature file");
  extract->add_option("--csv", ex_csv, "Optional CSV dump of the features");
  extract->add_option("--sample-rate", ex_rate, "Expected sample rate");
  extract->add_flag("--require-spatial", ex_require_spatial,
                    "Fail on mono input instead of dropping spatial streams");
  add_common(extract, opts);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Render a labeled synthetic scene");
  std::string sim_config, sim_preset, sim_out = "scene_out";
  auto* cfg_opt = simulate->add_option("--config", sim_config, "Scene config JSON");
  simulate->add_option("--preset", sim_preset, "Built-in scene preset, e.g. uca4-anechoic-snr5")
      ->excludes(cfg_opt);
  simulate->add_option("--out", sim_out, "Output directory");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score features against a rendered scene");
  std::string eval_dir, eval_csv;
  bool eval_mask_sweep = false;
  double eval_preroll = -1.0;
  evaluate->add_option("scene_dir", eval_dir, "Directory produced by simulate")->required();
  evaluate->add_option("--csv", eval_csv, "Report CSV path");
  evaluate->add_flag("--mask-sweep", eval_mask_sweep, "Also sweep coherence mask thresholds");
  evaluate->add_option("--preroll-seconds", eval_preroll,
                       "Override the scored preroll (default: manifest value)");
  add_common(evaluate, opts);

  // filterbank
  auto* filterbank = app.add_subcommand("filterbank", "Dump ERB filterbank weights as CSV");
  std::string fb_csv = "filterbank.csv";
  int fb_bands = 16, fb_rate = 16000;
  filterbank->add_option("--csv", fb_csv, "Output CSV path");
  filterbank->add_option("--bands", fb_bands, "Number of ERB bands");
  filterbank->add_option("--sample-rate", fb_rate, "Sample rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed()) {
      return run_extract(ex_input, ex_out, ex_csv, opts, ex_rate, ex_require_spatial);
    }
    if (simulate->parsed()) {
      if (sim_config.empty() && sim_preset.empty()) {
        std::cerr << "simulate: need --config or --preset\n";
        return 2;
      }
      return run_simulate(sim_config, sim_preset, sim_out);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_dir, eval_csv, eval_mask_sweep, eval_preroll, opts);
    }
    if (filterbank->parsed()) {
      lstsc::StftConfig cfg;
      cfg.sample_rate = fb_rate;
      lstsc::write_filterbank_csv(lstsc::build_erb_filterbank(cfg, fb_bands), cfg, fb_csv);
      std::cout << "wrote " << fb_bands << "-band filterbank -> " << fb_csv << "\n";
      return 0;
    }
  } catch (const lstsc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
