#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lstsc/errors.hpp"
#include "lstsc/fft.hpp"

namespace lstsc {

using Vec3 = std::array<double, 3>;

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct ArrayGeometry {
  std::vector<Vec3> mic_positions;

  int num_mics() const { return static_cast<int>(mic_positions.size()); }

  void validate() const {
    if (mic_positions.empty()) throw ContractError("geometry: need at least one microphone");
    for (std::size_t i = 0; i < mic_positions.size(); ++i) {
      for (std::size_t j = i + 1; j < mic_positions.size(); ++j) {
        if (distance(mic_positions[i], mic_positions[j]) < 1e-9) {
          throw ContractError("geometry: microphones " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
        }
      }
    }
  }

  // Uniform circular array in the xy-plane, first element on the +x axis.
  static ArrayGeometry uca(int num_mics, double radius = 0.04, Vec3 center = {0.0, 0.0, 0.0}) {
    if (num_mics < 1) throw UsageError("geometry: uca needs at least one element");
    ArrayGeometry g;
    if (num_mics == 1) {
      g.mic_positions.push_back(center);
      return g;
    }
    for (int k = 0; k < num_mics; ++k) {
      const double ang = 2.0 * std::numbers::pi * k / num_mics;
      g.mic_positions.push_back({center[0] + radius * std::cos(ang),
                                 center[1] + radius * std::sin(ang), center[2]});
    }
    return g;
  }
};

enum class SourceRole { Target, Interference };

struct SourceSpec {
  Vec3 position{};
  std::vector<double> signal;
  SourceRole role = SourceRole::Interference;
};

struct RoomSpec {
  Vec3 dimensions{};
  double t60 = 0.0;
};

struct SceneSpec {
  ArrayGeometry geometry;
  std::vector<SourceSpec> sources;
  std::optional<RoomSpec> room;
  double snr_db = 0.0;  // target-to-interference ratio at the reference mic
  std::uint64_t seed = 0;
  double speed_of_sound = 343.0;
  int sample_rate = 16000;
  int max_order = -1;  // image-source reflection cap; -1 = time-limited only
  std::optional<double> sensor_noise_snr_db;  // off by default
  int reference_mic = 0;

  void validate() const {
    geometry.validate();
    if (sources.empty()) throw ContractError("scene: no sources");
    if (sample_rate <= 0) throw ContractError("scene: sample_rate must be positive");
    if (snr_db < -30.0 || snr_db > 30.0) {
      throw ContractError("scene: snr_db must lie in [-30, 30], got " + std::to_string(snr_db));
    }
    if (room) {
      if (room->t60 <= 0.0) throw ContractError("scene: t60 must be positive");
      auto inside = [&](const Vec3& p) {
        return p[0] > 0 && p[0] < room->dimensions[0] && p[1] > 0 && p[1] < room->dimensions[1] &&
               p[2] > 0 && p[2] < room->dimensions[2];
      };
      for (const auto& m : geometry.mic_positions) {
        if (!inside(m)) throw ContractError("scene: microphone outside room bounds");
      }
      for (const auto& s : sources) {
        if (!inside(s.position)) throw ContractError("scene: source outside room bounds");
      }
    }
  }
};

struct LabeledScene {
  std::vector<std::vector<double>> mixture;               // M channels
  std::vector<std::vector<std::vector<double>>> stems;    // source x channel
  SceneSpec spec;
};

namespace detail {

inline constexpr int kSincTaps = 32;

// Adds a Hann-windowed sinc impulse at fractional delay `delay_samples`.
inline void add_fractional_impulse(std::vector<double>& ir, double delay_samples,
                                   double amplitude) {
  const int center = static_cast<int>(std::floor(delay_samples));
  for (int k = -kSincTaps / 2 + 1; k <= kSincTaps / 2; ++k) {
    const int idx = center + k;
    if (idx < 0 || idx >= static_cast<int>(ir.size())) continue;
    const double t = idx - delay_samples;
    double sinc = (std::abs(t) < 1e-12) ? 1.0
                                        : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double wt = 0.5 + 0.5 * std::cos(std::numbers::pi * t / (kSincTaps / 2));
    ir[idx] += amplitude * sinc * wt;
  }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Anechoic propagation: fractional-delay impulse with 1/distance amplitude.
inline std::vector<std::vector<double>> free_field_rir(const ArrayGeometry& geometry,
                                                       const Vec3& source_position,
                                                       int sample_rate,
                                                       double speed_of_sound = 343.0) {
  geometry.validate();
  double max_delay = 0.0;
  for (const auto& mic : geometry.mic_positions) {
    const double d = distance(mic, source_position);
    if (d < 1e-6) throw ContractError("rir: source coincides with a microphone");
    max_delay = std::max(max_delay, d / speed_of_sound * sample_rate);
  }
  const std::size_t len = static_cast<std::size_t>(std::ceil(max_delay)) + detail::kSincTaps;
  std::vector<std::vector<double>> rirs;
  rirs.reserve(geometry.mic_positions.size());
  for (const auto& mic : geometry.mic_positions) {
    const double d = distance(mic, source_position);
    std::vector<double> ir(len, 0.0);
    detail::add_fractional_impulse(ir, d / speed_of_sound * sample_rate, 1.0 / d);
    rirs.push_back(std::move(ir));
  }
  return rirs;
}

// Image-source RIR for a rectangular room with uniform wall absorption
// derived from t60 via Sabine's formula, with an Eyring fallback when the
// Sabine absorption would exceed 1. Images are truncated at max_order
// reflections (when >= 0) and at the time where the ideal energy envelope
// falls 60 dB below the direct path. Reflections of order >= 2 get a
// sub-sample delay dither keyed on (seed, image indices).
inline std::vector<std::vector<double>> image_source_rir(const RoomSpec& room,
                                                         const ArrayGeometry& geometry,
                                                         const Vec3& source_position,
                                                         int sample_rate, int max_order = -1,
                                                         std::uint64_t seed = 0,
                                                         double speed_of_sound = 343.0) {
  geometry.validate();
  if (room.t60 <= 0.0) throw ContractError("rir: t60 must be positive");
  const Vec3& L = room.dimensions;
  auto inside = [&](const Vec3& p) {
    return p[0] > 0 && p[0] < L[0] && p[1] > 0 && p[1] < L[1] && p[2] > 0 && p[2] < L[2];
  };
  if (!inside(source_position)) throw ContractError("rir: source outside room");
  for (const auto& m : geometry.mic_positions) {
    if (!inside(m)) throw ContractError("rir: microphone outside room");
  }

  const double volume = L[0] * L[1] * L[2];
  const double surface = 2.0 * (L[0] * L[1] + L[0] * L[2] + L[1] * L[2]);
  double alpha = 0.161 * volume / (surface * room.t60);
  if (alpha >= 1.0) alpha = 1.0 - std::exp(-alpha);  // Eyring fallback for dead rooms
  const double beta = std::sqrt(1.0 - alpha);

  double min_direct = 1e30;
  for (const auto& m : geometry.mic_positions) {
    const double d = distance(m, source_position);
    if (d < 1e-6) throw ContractError("rir: source coincides with a microphone");
    min_direct = std::min(min_direct, d);
  }
  const double t_max = min_direct / speed_of_sound + room.t60;
  const double r_max = t_max * speed_of_sound;

  const std::size_t len =
      static_cast<std::size_t>(std::ceil(t_max * sample_rate)) + detail::kSincTaps;
  std::vector<std::vector<double>> rirs(geometry.mic_positions.size(),
                                        std::vector<double>(len, 0.0));

  const int nx = static_cast<int>(std::ceil(r_max / (2.0 * L[0]))) + 1;
  const int ny = static_cast<int>(std::ceil(r_max / (2.0 * L[1]))) + 1;
  const int nz = static_cast<int>(std::ceil(r_max / (2.0 * L[2]))) + 1;

  for (int qx = -nx; qx <= nx; ++qx) {
    for (int qy = -ny; qy <= ny; ++qy) {
      for (int qz = -nz; qz <= nz; ++qz) {
        for (int p = 0; p < 8; ++p) {
          const int px = p & 1, py = (p >> 1) & 1, pz = (p >> 2) & 1;
          const int order = std::abs(qx - px) + std::abs(qx) + std::abs(qy - py) + std::abs(qy) +
                            std::abs(qz - pz) + std::abs(qz);
          if (max_order >= 0 && order > max_order) continue;
          const Vec3 img = {(1 - 2 * px) * source_position[0] + 2.0 * qx * L[0],
                            (1 - 2 * py) * source_position[1] + 2.0 * qy * L[1],
                            (1 - 2 * pz) * source_position[2] + 2.0 * qz * L[2]};
          const double gain = std::pow(beta, order);
          double dither = 0.0;
          if (order >= 2) {
            const std::uint64_t h = detail::splitmix64(
                seed ^ detail::splitmix64(static_cast<std::uint64_t>(qx + 1000) * 2097593 +
                                          static_cast<std::uint64_t>(qy + 1000) * 1299709 +
                                          static_cast<std::uint64_t>(qz + 1000) * 15485863 + p));
            dither = (static_cast<double>(h >> 11) / 9007199254740992.0) - 0.5;
          }
          for (std::size_t m = 0; m < geometry.mic_positions.size(); ++m) {
            const double d = distance(geometry.mic_positions[m], img);
            if (d > r_max || d < 1e-6) continue;
            detail::add_fractional_impulse(rirs[m], d / speed_of_sound * sample_rate + dither,
                                           gain / d);
          }
        }
      }
    }
  }
  return rirs;
}

// Mixes per-source per-mic images with interference scaled so the
// reference-mic target-to-interference power ratio equals snr_db.
inline LabeledScene render_scene(const SceneSpec& spec) {
  spec.validate();

  LabeledScene scene;
  scene.spec = spec;
  const int m_count = spec.geometry.num_mics();

  std::size_t max_len = 0;
  for (const auto& src : spec.sources) {
    if (src.signal.empty()) throw ContractError("scene: source has an empty signal");
    std::vector<std::vector<double>> rirs;
    if (spec.room) {
      rirs = image_source_rir(*spec.room, spec.geometry, src.position, spec.sample_rate,
                              spec.max_order, spec.seed, spec.speed_of_sound);
    } else {
      rirs = free_field_rir(spec.geometry, src.position, spec.sample_rate, spec.speed_of_sound);
    }
    std::vector<std::vector<double>> stem;
    stem.reserve(m_count);
    for (int m = 0; m < m_count; ++m) {
      stem.push_back(fft_convolve(src.signal, rirs[m]));
      max_len = std::max(max_len, stem.back().size());
    }
    scene.stems.push_back(std::move(stem));
  }
  for (auto& stem : scene.stems) {
    for (auto& ch : stem) ch.resize(max_len, 0.0);
  }

  // interference gain from reference-mic powers
  const int ref = spec.reference_mic;
  double p_target = 0.0, p_interf = 0.0;
  bool has_target = false, has_interf = false;
  for (std::size_t j = 0; j < spec.sources.size(); ++j) {
    double p = 0.0;
    for (double v : scene.stems[j][ref]) p += v * v;
    if (spec.sources[j].role == SourceRole::Target) {
      p_target += p;
      has_target = true;
    } else {
      p_interf += p;
      has_interf = true;
    }
  }
  if (has_target && has_interf && p_target > 0.0 && p_interf > 0.0) {
    const double gain = std::sqrt(p_target / (p_interf * std::pow(10.0, spec.snr_db / 10.0)));
    for (std::size_t j = 0; j < spec.sources.size(); ++j) {
      if (spec.sources[j].role != SourceRole::Interference) continue;
      for (auto& ch : scene.stems[j]) {
        for (double& v : ch) v *= gain;
      }
    }
  }

  scene.mixture.assign(m_count, std::vector<double>(max_len, 0.0));
  for (const auto& stem : scene.stems) {
    for (int m = 0; m < m_count; ++m) {
      for (std::size_t i = 0; i < max_len; ++i) scene.mixture[m][i] += stem[m][i];
    }
  }

  if (spec.sensor_noise_snr_db) {
    double p_mix = 0.0;
    for (double v : scene.mixture[ref]) p_mix += v * v;
    p_mix /= static_cast<double>(max_len);
    const double sigma = std::sqrt(p_mix / std::pow(10.0, *spec.sensor_noise_snr_db / 10.0));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (auto& ch : scene.mixture) {
      for (double& v : ch) v += dist(rng);
    }
  }
  return scene;
}

}  // namespace lstsc
