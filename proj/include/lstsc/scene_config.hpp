#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lstsc/errors.hpp"
#include "lstsc/scene.hpp"
#include "lstsc/synth.hpp"
#include "lstsc/wav.hpp"

namespace lstsc {

// A scene plus the bookkeeping the evaluator needs.
struct ResolvedScene {
  SceneSpec spec;
  double preroll_seconds = 0.0;  // interference-only lead-in inside the target signal
  std::string name;
};

namespace detail {

inline Vec3 parse_vec3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw UsageError("scene config: " + what + " must be a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

// Declarative scene config:
//   sample_rate, snr_db, seed, speed_of_sound?, max_order?, reference_mic?,
//   sensor_noise_snr_db?,
//   geometry: {"preset": "ucaN", "radius"?, "center"?} | {"positions": [[x,y,z],...]},
//   room?: {"dimensions": [x,y,z], "t60": s},
//   sources: [{"wav": path, "position": [x,y,z], "role": "target"|"interference",
//              "lead_silence_seconds"?: s}]
// Source WAV paths resolve relative to the config file's directory.
inline ResolvedScene load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("scene config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("scene config: '" + path + "' is not valid JSON: " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();

  ResolvedScene scene;
  scene.name = std::filesystem::path(path).stem().string();
  SceneSpec& spec = scene.spec;
  spec.sample_rate = j.value("sample_rate", 16000);
  spec.snr_db = j.value("snr_db", 0.0);
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.speed_of_sound = j.value("speed_of_sound", 343.0);
  spec.max_order = j.value("max_order", -1);
  spec.reference_mic = j.value("reference_mic", 0);
  if (j.contains("sensor_noise_snr_db")) {
    spec.sensor_noise_snr_db = j["sensor_noise_snr_db"].get<double>();
  }

  if (!j.contains("geometry")) throw UsageError("scene config: missing geometry");
  const auto& g = j["geometry"];
  if (g.contains("preset")) {
    const std::string preset = g["preset"].get<std::string>();
    if (preset.rfind("uca", 0) != 0 || preset.size() < 4) {
      throw UsageError("scene config: unknown geometry preset '" + preset + "'");
    }
    const int m = std::stoi(preset.substr(3));
    const double radius = g.value("radius", 0.04);
    Vec3 center = {0.0, 0.0, 0.0};
    if (g.contains("center")) center = detail::parse_vec3(g["center"], "geometry center");
    spec.geometry = ArrayGeometry::uca(m, radius, center);
  } else if (g.contains("positions")) {
    for (const auto& p : g["positions"]) {
      spec.geometry.mic_positions.push_back(detail::parse_vec3(p, "mic position"));
    }
  } else {
    throw UsageError("scene config: geometry needs 'preset' or 'positions'");
  }

  if (j.contains("room") && !j["room"].is_null()) {
    RoomSpec room;
    room.dimensions = detail::parse_vec3(j["room"]["dimensions"], "room dimensions");
    room.t60 = j["room"]["t60"].get<double>();
    spec.room = room;
  }

  if (!j.contains("sources") || j["sources"].empty()) {
    throw UsageError("scene config: needs at least one source");
  }
  for (const auto& s : j["sources"]) {
    SourceSpec src;
    src.position = detail::parse_vec3(s["position"], "source position");
    const std::string role = s.value("role", "interference");
    if (role == "target") {
      src.role = SourceRole::Target;
    } else if (role == "interference") {
      src.role = SourceRole::Interference;
    } else {
      throw UsageError("scene config: unknown source role '" + role + "'");
    }
    const std::string wav_rel = s["wav"].get<std::string>();
    const auto wav_path = (base / wav_rel).string();
    if (!std::filesystem::exists(wav_path)) {
      throw IoError("scene config: source wav '" + wav_path + "' does not exist");
    }
    AudioBuffer buf = read_wav(wav_path);
    if (buf.sample_rate != spec.sample_rate) {
      throw IoError("scene config: '" + wav_path + "' sample rate " +
                    std::to_string(buf.sample_rate) + " does not match scene rate " +
                    std::to_string(spec.sample_rate));
    }
    src.signal = buf.channels.at(0);
    const double lead = s.value("lead_silence_seconds", 0.0);
    if (lead > 0.0) {
      src.signal = with_leading_silence(std::move(src.signal),
                                        static_cast<std::size_t>(lead * spec.sample_rate));
      if (src.role == SourceRole::Target) {
        scene.preroll_seconds = std::max(scene.preroll_seconds, lead);
      }
    }
    spec.sources.push_back(std::move(src));
  }
  spec.validate();
  return scene;
}

// Built-in fixtures: 8-second anechoic two-source scenes on a UCA, target
// speech-like bursts behind a 1-second interference-only preroll.
// Names: "ucaM-anechoic-snrS" with M in 2..4 and integer S.
inline ResolvedScene make_preset_scene(const std::string& name) {
  int mics = 0, snr = 0;
  if (std::sscanf(name.c_str(), "uca%d-anechoic-snr%d", &mics, &snr) != 2 || mics < 2 ||
      mics > 8) {
    throw UsageError("preset: unknown scene preset '" + name + "'");
  }
  const int fs = 16000;
  const std::size_t clip = 8 * fs;
  const std::size_t preroll = fs;  // 1 s interference-only

  ResolvedScene scene;
  scene.name = name;
  scene.preroll_seconds = 1.0;
  SceneSpec& spec = scene.spec;
  spec.sample_rate = fs;
  spec.snr_db = snr;
  spec.seed = 7;
  spec.geometry = ArrayGeometry::uca(mics, 0.04);

  SourceSpec target;
  target.role = SourceRole::Target;
  target.position = {1.5 * std::cos(0.35), 1.5 * std::sin(0.35), 0.0};  // ~20 deg
  target.signal = with_leading_silence(
      burst_noise(clip - preroll, /*seed=*/11, /*burst_len=*/6400, /*gap_len=*/3200), preroll);

  SourceSpec interf;
  interf.role = SourceRole::Interference;
  interf.position = {2.0 * std::cos(2.1), 2.0 * std::sin(2.1), 0.0};  // ~120 deg, > 45 deg apart
  interf.signal = lowpass(white_noise(clip, /*seed=*/23), 0.3);

  spec.sources.push_back(std::move(target));
  spec.sources.push_back(std::move(interf));
  spec.validate();
  return scene;
}

// Writes mixture + per-source stems as WAV plus a JSON manifest into dir.
inline void write_scene(const LabeledScene& scene, const ResolvedScene& resolved,
                        const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  AudioBuffer mix;
  mix.sample_rate = scene.spec.sample_rate;
  mix.channels = scene.mixture;
  write_wav((fs::path(dir) / "mixture.wav").string(), mix);

  nlohmann::json manifest;
  manifest["name"] = resolved.name;
  manifest["sample_rate"] = scene.spec.sample_rate;
  manifest["snr_db"] = scene.spec.snr_db;
  manifest["seed"] = scene.spec.seed;
  manifest["speed_of_sound"] = scene.spec.speed_of_sound;
  manifest["reference_mic"] = scene.spec.reference_mic;
  manifest["preroll_seconds"] = resolved.preroll_seconds;
  manifest["mixture_wav"] = "mixture.wav";
  for (const auto& m : scene.spec.geometry.mic_positions) {
    manifest["geometry"].push_back({m[0], m[1], m[2]});
  }
  if (scene.spec.room) {
    manifest["room"] = {{"dimensions",
                         {scene.spec.room->dimensions[0], scene.spec.room->dimensions[1],
                          scene.spec.room->dimensions[2]}},
                        {"t60", scene.spec.room->t60}};
  } else {
    manifest["room"] = nullptr;
  }
  for (std::size_t j = 0; j < scene.spec.sources.size(); ++j) {
    const auto& src = scene.spec.sources[j];
    const std::string role = src.role == SourceRole::Target ? "target" : "interference";
    const std::string stem_name = "stem_" + std::to_string(j) + "_" + role + ".wav";
    AudioBuffer stem;
    stem.sample_rate = scene.spec.sample_rate;
    stem.channels = scene.stems[j];
    write_wav((fs::path(dir) / stem_name).string(), stem);
    manifest["sources"].push_back({{"role", role},
                                   {"position", {src.position[0], src.position[1], src.position[2]}},
                                   {"stem_wav", stem_name}});
  }

  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw IoError("scene: cannot write manifest in '" + dir + "'");
  out << manifest.dump(2) << "\n";
}

// Reads a rendered scene directory (manifest + WAVs) back for evaluation.
inline std::pair<LabeledScene, double> read_scene(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("scene: cannot open '" + manifest_path.string() + "'");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("scene: bad manifest: " + std::string(e.what()));
  }

  LabeledScene scene;
  scene.spec.sample_rate = manifest["sample_rate"].get<int>();
  scene.spec.snr_db = manifest["snr_db"].get<double>();
  scene.spec.seed = manifest["seed"].get<std::uint64_t>();
  scene.spec.reference_mic = manifest.value("reference_mic", 0);
  for (const auto& m : manifest["geometry"]) {
    scene.spec.geometry.mic_positions.push_back(detail::parse_vec3(m, "mic position"));
  }

  AudioBuffer mix = read_wav((fs::path(dir) / manifest["mixture_wav"].get<std::string>()).string());
  scene.mixture = mix.channels;

  for (const auto& s : manifest["sources"]) {
    SourceSpec src;
    src.role = s["role"].get<std::string>() == "target" ? SourceRole::Target
                                                        : SourceRole::Interference;
    src.position = detail::parse_vec3(s["position"], "source position");
    scene.spec.sources.push_back(std::move(src));
    AudioBuffer stem = read_wav((fs::path(dir) / s["stem_wav"].get<std::string>()).string());
    scene.stems.push_back(stem.channels);
  }
  return {std::move(scene), manifest.value("preroll_seconds", 0.0)};
}

}  // namespace lstsc
