#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lstsc/errors.hpp"

namespace lstsc {

// Channel-separated audio buffer.
struct AudioBuffer {
  int sample_rate = 0;
  std::vector<std::vector<double>> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

namespace detail {

inline uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
inline uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
  v.push_back((x >> 16) & 0xff);
  v.push_back((x >> 24) & 0xff);
}
inline void put_u16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
}

}  // namespace detail

// RIFF/WAVE reader for PCM 16-bit and IEEE float 32-bit.
inline AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("wav: cannot open '" + path + "'");
  std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
    throw IoError("wav: '" + path + "' is not a RIFF/WAVE file");
  }

  uint16_t format = 0, num_channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data_ptr = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = reinterpret_cast<const char*>(raw.data() + pos);
    const uint32_t chunk_len = detail::read_u32(raw.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > raw.size()) {
      throw IoError("wav: '" + path + "' has a truncated chunk");
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw IoError("wav: '" + path + "' has a malformed fmt chunk");
      format = detail::read_u16(raw.data() + body);
      num_channels = detail::read_u16(raw.data() + body + 2);
      sample_rate = detail::read_u32(raw.data() + body + 4);
      bits = detail::read_u16(raw.data() + body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_ptr = raw.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);
  }
  if (num_channels == 0 || data_ptr == nullptr) {
    throw IoError("wav: '" + path + "' is missing fmt or data chunk");
  }
  if (format != 1 && format != 3) {
    throw IoError("wav: '" + path + "' uses unsupported format tag " + std::to_string(format) +
                  " (PCM 16-bit and IEEE float 32-bit only)");
  }
  if ((format == 1 && bits != 16) || (format == 3 && bits != 32)) {
    throw IoError("wav: '" + path + "' has unsupported bit depth " + std::to_string(bits));
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * num_channels;
  const std::size_t frames = data_len / frame_bytes;

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(sample_rate);
  buf.channels.assign(num_channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (uint16_t c = 0; c < num_channels; ++c) {
      const uint8_t* p = data_ptr + i * frame_bytes + c * bytes_per_sample;
      if (format == 1) {
        const int16_t s = static_cast<int16_t>(p[0] | (p[1] << 8));
        buf.channels[c][i] = s / 32768.0;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        buf.channels[c][i] = f;
      }
    }
  }
  return buf;
}

// Writes IEEE float 32-bit WAV (lossless for our purposes up to f32).
inline void write_wav(const std::string& path, const AudioBuffer& buf) {
  if (buf.channels.empty()) throw ContractError("wav: no channels to write");
  const std::size_t frames = buf.num_samples();
  for (const auto& ch : buf.channels) {
    if (ch.size() != frames) throw ContractError("wav: channel length mismatch on write");
  }
  const uint16_t num_channels = static_cast<uint16_t>(buf.channels.size());
  const uint32_t data_len = static_cast<uint32_t>(frames * num_channels * 4);

  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32(out, 16);
  detail::put_u16(out, 3);  // IEEE float
  detail::put_u16(out, num_channels);
  detail::put_u32(out, static_cast<uint32_t>(buf.sample_rate));
  detail::put_u32(out, static_cast<uint32_t>(buf.sample_rate) * num_channels * 4);
  detail::put_u16(out, num_channels * 4);
  detail::put_u16(out, 32);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(out, data_len);
  for (std::size_t i = 0; i < frames; ++i) {
    for (uint16_t c = 0; c < num_channels; ++c) {
      const float f = static_cast<float>(buf.channels[c][i]);
      uint8_t b[4];
      std::memcpy(b, &f, 4);
      out.insert(out.end(), b, b + 4);
    }
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("wav: cannot open '" + path + "' for writing");
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("wav: write failed for '" + path + "'");
}

}  // namespace lstsc
