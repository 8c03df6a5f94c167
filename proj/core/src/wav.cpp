// Copyright 2026 The soundnet-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "soundnet/wav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "soundnet/error.hpp"

namespace soundnet {

namespace {

// Minimal cursor over the raw RIFF bytes; WAV containers have their own
// framing, so the checksummed ByteReader does not apply here.
struct Cursor {
  const std::vector<unsigned char>& data;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > data.size()) {
      throw FormatError(FormatError::Code::kTruncated, path + ": truncated WAV");
    }
  }
  std::string tag() {
    need(4);
    std::string s(reinterpret_cast<const char*>(data.data() + pos), 4);
    pos += 4;
    return s;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8));
    pos += 2;
    return v;
  }
};

}  // namespace

WavData decode_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path);

  Cursor c{raw, 0, path};
  if (c.tag() != "RIFF") {
    throw FormatError(FormatError::Code::kBadMagic, path + ": not a RIFF file");
  }
  c.u32();  // RIFF payload size; chunk sizes below are authoritative
  if (c.tag() != "WAVE") {
    throw FormatError(FormatError::Code::kBadMagic, path + ": not a WAVE file");
  }

  bool have_fmt = false;
  bool have_data = false;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::vector<Real> samples;

  while (c.pos + 8 <= raw.size()) {
    const std::string id = c.tag();
    const std::uint32_t size = c.u32();
    c.need(size);
    const std::size_t chunk_start = c.pos;
    if (id == "fmt ") {
      if (size < 16) {
        throw FormatError(FormatError::Code::kCorrupt, path + ": fmt chunk too small");
      }
      const std::uint16_t audio_format = c.u16();
      channels = c.u16();
      sample_rate = c.u32();
      c.u32();  // byte rate
      c.u16();  // block align
      const std::uint16_t bits = c.u16();
      if (audio_format != 1 || bits != 16) {
        throw FormatError(FormatError::Code::kCorrupt,
                          path + ": only 16-bit PCM is supported (format=" +
                              std::to_string(audio_format) + " bits=" +
                              std::to_string(bits) + ")");
      }
      if (channels != 1 && channels != 2) {
        throw FormatError(FormatError::Code::kCorrupt,
                          path + ": unsupported channel count " + std::to_string(channels));
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) {
        throw FormatError(FormatError::Code::kCorrupt, path + ": data chunk before fmt");
      }
      const std::size_t count = size / 2;
      samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint16_t lo = raw[chunk_start + 2 * i];
        const std::uint16_t hi = raw[chunk_start + 2 * i + 1];
        const std::int16_t s = static_cast<std::int16_t>(lo | (hi << 8));
        samples[i] = static_cast<Real>(s) / Real(32768);
      }
      have_data = true;
    }
    // Chunks are word-aligned: odd sizes carry one pad byte.
    c.pos = chunk_start + size + (size % 2);
  }

  if (!have_fmt || !have_data) {
    throw FormatError(FormatError::Code::kCorrupt, path + ": missing fmt or data chunk");
  }
  if (channels > 0 && samples.size() % channels != 0) {
    throw FormatError(FormatError::Code::kCorrupt,
                      path + ": sample count not divisible by channel count");
  }
  WavData out;
  out.sample_rate = sample_rate;
  out.channels = channels;
  out.samples = std::move(samples);
  return out;
}

void write_wav(const std::string& path, std::int64_t sample_rate, std::int64_t channels,
               const std::vector<Real>& samples) {
  if (channels != 1 && channels != 2) {
    throw Error("write_wav: unsupported channel count " + std::to_string(channels));
  }
  if (samples.size() % static_cast<std::size_t>(channels) != 0) {
    throw Error("write_wav: sample count not divisible by channel count");
  }
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);

  std::vector<unsigned char> out;
  auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
  };
  auto put_u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
  };

  put_tag("RIFF");
  put_u32(4 + 24 + 8 + data_bytes);  // WAVE + fmt chunk + data header + data
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(static_cast<std::uint16_t>(channels));
  put_u32(static_cast<std::uint32_t>(sample_rate));
  put_u32(static_cast<std::uint32_t>(sample_rate * channels * 2));  // byte rate
  put_u16(static_cast<std::uint16_t>(channels * 2));                // block align
  put_u16(16);
  put_tag("data");
  put_u32(data_bytes);
  for (const Real x : samples) {
    const Real clamped = std::clamp(x, Real(-1), Real(1));
    const std::int16_t s =
        static_cast<std::int16_t>(std::llround(clamped * Real(32767)));
    put_u16(static_cast<std::uint16_t>(s));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing " + path);
}

}  // namespace soundnet
