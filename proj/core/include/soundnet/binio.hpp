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

#ifndef SOUNDNET_BINIO_HPP_
#define SOUNDNET_BINIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace soundnet {

// CRC-32 (reflected polynomial 0xEDB88320, as used by zip/png).
std::uint32_t crc32(const unsigned char* data, std::size_t size);

// Accumulates a little-endian byte stream in memory; write_file appends the
// CRC-32 of everything written so far and flushes to disk.
class ByteWriter {
 public:
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void bytes(const void* data, std::size_t size);
  // u32 length prefix followed by the raw bytes.
  void str(const std::string& s);

  const std::vector<unsigned char>& data() const { return buffer_; }
  void write_file(const std::string& path) const;

 private:
  std::vector<unsigned char> buffer_;
};

// Reads a whole file up front, verifies the 4-byte magic and the trailing
// CRC-32, then serves little-endian fields. Short reads throw FormatError
// (kTruncated), magic/CRC mismatches kBadMagic/kBadCrc.
class ByteReader {
 public:
  // `magic` is the expected 4-byte tag, e.g. "SNDC".
  static ByteReader open(const std::string& path, const std::string& magic);
  // For in-memory round trips; `data` must include magic and CRC.
  static ByteReader from_bytes(std::vector<unsigned char> data, const std::string& magic,
                               const std::string& what);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::string str();

  std::size_t remaining() const { return end_ - pos_; }
  // Throws kCorrupt when trailing bytes remain.
  void require_end() const;
  const std::string& what() const { return what_; }

 private:
  ByteReader(std::vector<unsigned char> data, const std::string& magic, std::string what);
  void need(std::size_t n) const;

  std::vector<unsigned char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;  // payload end (CRC excluded)
  std::string what_;
};

}  // namespace soundnet

#endif  // SOUNDNET_BINIO_HPP_
