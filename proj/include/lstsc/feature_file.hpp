#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lstsc/errors.hpp"
#include "lstsc/stft.hpp"

namespace lstsc {

// Self-describing binary feature container. Layout, all little-endian:
//   magic[8] = "LSTSCFT\0", version u32, n_frames u32, n_bands u32,
//   n_streams u32, per stream a 16-byte zero-padded label,
//   sample_rate u32, window_len u32, hop u32, fft_len u32,
//   lambda_global f64, lambda_local f64,
//   payload: n_frames * n_streams * n_bands float32, frame-major,
//   streams in header order within each frame.
struct FeatureFile {
  static constexpr std::array<char, 8> kMagic = {'L', 'S', 'T', 'S', 'C', 'F', 'T', '\0'};
  static constexpr uint32_t kVersion = 1;
  static constexpr std::size_t kLabelLen = 16;

  uint32_t n_frames = 0;
  uint32_t n_bands = 0;
  std::vector<std::string> stream_labels;  // "erb-spectral", "erb-g-lstsc", "erb-l-lstsc"
  uint32_t sample_rate = 0;
  uint32_t window_len = 0;
  uint32_t hop = 0;
  uint32_t fft_len = 0;
  double lambda_global = 0.0;
  double lambda_local = 0.0;
  std::vector<float> payload;

  uint32_t n_streams() const { return static_cast<uint32_t>(stream_labels.size()); }

  float at(uint32_t frame, uint32_t stream, uint32_t band) const {
    return payload[(static_cast<std::size_t>(frame) * n_streams() + stream) * n_bands + band];
  }

  void validate() const {
    if (payload.size() != static_cast<std::size_t>(n_frames) * n_streams() * n_bands) {
      throw ContractError("feature file: payload length does not match header dimensions");
    }
    for (const auto& label : stream_labels) {
      if (label.empty() || label.size() >= kLabelLen) {
        throw ContractError("feature file: stream label must be 1..15 bytes");
      }
    }
  }
};

namespace detail {

template <typename T>
void write_le(std::ofstream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_feature_file(const FeatureFile& ff, const std::string& path) {
  ff.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("feature file: cannot open '" + path + "' for writing");
  out.write(FeatureFile::kMagic.data(), FeatureFile::kMagic.size());
  detail::write_le(out, FeatureFile::kVersion);
  detail::write_le(out, ff.n_frames);
  detail::write_le(out, ff.n_bands);
  detail::write_le(out, ff.n_streams());
  for (const auto& label : ff.stream_labels) {
    char buf[FeatureFile::kLabelLen] = {};
    std::memcpy(buf, label.data(), label.size());
    out.write(buf, FeatureFile::kLabelLen);
  }
  detail::write_le(out, ff.sample_rate);
  detail::write_le(out, ff.window_len);
  detail::write_le(out, ff.hop);
  detail::write_le(out, ff.fft_len);
  detail::write_le(out, ff.lambda_global);
  detail::write_le(out, ff.lambda_local);
  out.write(reinterpret_cast<const char*>(ff.payload.data()),
            static_cast<std::streamsize>(ff.payload.size() * sizeof(float)));
  if (!out) throw IoError("feature file: write failed for '" + path + "'");
}

inline FeatureFile read_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("feature file: cannot open '" + path + "'");
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != FeatureFile::kMagic) {
    throw IoError("feature file: '" + path + "' has a bad magic tag");
  }
  const uint32_t version = detail::read_le<uint32_t>(in);
  if (version != FeatureFile::kVersion) {
    throw IoError("feature file: unsupported version " + std::to_string(version));
  }
  FeatureFile ff;
  ff.n_frames = detail::read_le<uint32_t>(in);
  ff.n_bands = detail::read_le<uint32_t>(in);
  const uint32_t n_streams = detail::read_le<uint32_t>(in);
  for (uint32_t s = 0; s < n_streams; ++s) {
    char buf[FeatureFile::kLabelLen];
    in.read(buf, FeatureFile::kLabelLen);
    ff.stream_labels.emplace_back(buf, strnlen(buf, FeatureFile::kLabelLen));
  }
  ff.sample_rate = detail::read_le<uint32_t>(in);
  ff.window_len = detail::read_le<uint32_t>(in);
  ff.hop = detail::read_le<uint32_t>(in);
  ff.fft_len = detail::read_le<uint32_t>(in);
  ff.lambda_global = detail::read_le<double>(in);
  ff.lambda_local = detail::read_le<double>(in);
  const std::size_t count =
      static_cast<std::size_t>(ff.n_frames) * n_streams * ff.n_bands;
  ff.payload.resize(count);
  in.read(reinterpret_cast<char*>(ff.payload.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw IoError("feature file: '" + path + "' is truncated");
  ff.validate();
  return ff;
}

}  // namespace lstsc
