/*
Copyright 2026 The hapnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HAPNAV_DSP_WAV_HPP
#define HAPNAV_DSP_WAV_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "hapnav/dsp/audio_buffer.hpp"

namespace hapnav::dsp {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SampleFormat { Int16, Int24, Float32 };

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

}  // namespace detail

/// Decodes a RIFF/WAVE image: PCM 16/24-bit integer or 32-bit float,
/// including WAVE_FORMAT_EXTENSIBLE wrappers of those.
inline AudioBuffer decode_wav(const std::vector<unsigned char>& bytes) {
  using detail::read_u16;
  using detail::read_u32;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size() && std::memcmp(chunk, "data", 4) != 0) {
      throw FormatError("truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("short fmt chunk");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == 0xFFFE) {
        if (len < 40) throw FormatError("short extensible fmt chunk");
        format = read_u16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
    }
    pos = body + len + (len & 1u);
  }
  if (channels == 0 || rate == 0) throw FormatError("missing fmt chunk");
  if (!data) throw FormatError("missing data chunk");

  SampleFormat sf;
  if (format == 1 && bits == 16) {
    sf = SampleFormat::Int16;
  } else if (format == 1 && bits == 24) {
    sf = SampleFormat::Int24;
  } else if (format == 3 && bits == 32) {
    sf = SampleFormat::Float32;
  } else {
    throw FormatError("unsupported encoding: format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits");
  }
  const std::size_t width = bits / 8;
  const std::size_t count = data_len / width;
  AudioBuffer buf;
  buf.sample_rate = rate;
  buf.channels = channels;
  buf.samples.resize(count - count % channels);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    const unsigned char* s = data + i * width;
    switch (sf) {
      case SampleFormat::Int16: {
        const auto v = static_cast<std::int16_t>(read_u16(s));
        buf.samples[i] = static_cast<float>(v / 32768.0);
        break;
      }
      case SampleFormat::Int24: {
        std::int32_t v = s[0] | (s[1] << 8) | (s[2] << 16);
        if (v & 0x800000) v |= ~0xffffff;
        buf.samples[i] = static_cast<float>(v / 8388608.0);
        break;
      }
      case SampleFormat::Float32: {
        float f;
        std::memcpy(&f, s, 4);
        buf.samples[i] = f;
        break;
      }
    }
  }
  return buf;
}

inline std::vector<unsigned char> encode_wav(const AudioBuffer& buf, SampleFormat fmt) {
  const std::uint16_t bits = fmt == SampleFormat::Int16 ? 16 : fmt == SampleFormat::Int24 ? 24 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(buf.channels * bits / 8);
  const auto data_len = static_cast<std::uint32_t>(buf.samples.size() * (bits / 8));
  std::vector<unsigned char> out;
  out.reserve(44 + data_len + 1);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(out, 36 + data_len + (data_len & 1u));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32(out, 16);
  detail::put_u16(out, fmt == SampleFormat::Float32 ? 3 : 1);
  detail::put_u16(out, static_cast<std::uint16_t>(buf.channels));
  detail::put_u32(out, static_cast<std::uint32_t>(std::lround(buf.sample_rate)));
  detail::put_u32(out, static_cast<std::uint32_t>(std::lround(buf.sample_rate)) * block);
  detail::put_u16(out, block);
  detail::put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(out, data_len);
  for (float s : buf.samples) {
    switch (fmt) {
      case SampleFormat::Int16: {
        const auto v = std::clamp<long>(std::lround(s * 32768.0), -32768, 32767);
        detail::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
        break;
      }
      case SampleFormat::Int24: {
        const auto v = std::clamp<long>(std::lround(s * 8388608.0), -8388608, 8388607);
        out.push_back(static_cast<unsigned char>(v & 0xff));
        out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
        out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
        break;
      }
      case SampleFormat::Float32: {
        unsigned char b[4];
        std::memcpy(b, &s, 4);
        out.insert(out.end(), b, b + 4);
        break;
      }
    }
  }
  if (data_len & 1u) out.push_back(0);
  return out;
}

inline AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& buf,
                      SampleFormat fmt = SampleFormat::Float32) {
  const auto bytes = encode_wav(buf, fmt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_WAV_HPP
