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

#include "soundnet/binio.hpp"

#include <array>
#include <bit>
#include <filesystem>
#include <fstream>

#include "soundnet/error.hpp"

namespace soundnet {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t size) {
  static const std::array<std::uint32_t, 256> table = make_crc_table();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) {
    c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

void ByteWriter::u8(std::uint8_t v) { buffer_.push_back(v); }

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buffer_.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(const void* data, std::size_t size) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  buffer_.insert(buffer_.end(), p, p + size);
}

void ByteWriter::str(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s.data(), s.size());
}

void ByteWriter::write_file(const std::string& path) const {
  // Write to a sibling temp file and rename into place, so an interrupted
  // write never leaves a partially written file at the destination.
  const std::string tmp = path + ".tmp";
  {
    const std::uint32_t crc = crc32(buffer_.data(), buffer_.size());
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(reinterpret_cast<const char*>(buffer_.data()),
              static_cast<std::streamsize>(buffer_.size()));
    unsigned char tail[4];
    for (int i = 0; i < 4; ++i) tail[i] = static_cast<unsigned char>(crc >> (8 * i));
    out.write(reinterpret_cast<const char*>(tail), 4);
    out.flush();
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

ByteReader ByteReader::open(const std::string& path, const std::string& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path);
  return ByteReader(std::move(data), magic, path);
}

ByteReader ByteReader::from_bytes(std::vector<unsigned char> data, const std::string& magic,
                                  const std::string& what) {
  return ByteReader(std::move(data), magic, what);
}

ByteReader::ByteReader(std::vector<unsigned char> data, const std::string& magic,
                       std::string what)
    : buffer_(std::move(data)), what_(std::move(what)) {
  if (magic.size() != 4) throw Error("ByteReader: magic must be 4 bytes");
  if (buffer_.size() < 8) {
    throw FormatError(FormatError::Code::kTruncated, what_ + ": file too short");
  }
  // Check the magic before the CRC so a wrong file type reports as such
  // rather than as corruption.
  for (std::size_t i = 0; i < 4; ++i) {
    if (buffer_[i] != static_cast<unsigned char>(magic[i])) {
      throw FormatError(FormatError::Code::kBadMagic,
                        what_ + ": bad magic, expected " + magic);
    }
  }
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) {
    stored |= static_cast<std::uint32_t>(buffer_[buffer_.size() - 4 + i]) << (8 * i);
  }
  end_ = buffer_.size() - 4;
  if (crc32(buffer_.data(), end_) != stored) {
    throw FormatError(FormatError::Code::kBadCrc, what_ + ": CRC-32 mismatch");
  }
  pos_ = 4;
}

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > end_) {
    throw FormatError(FormatError::Code::kTruncated, what_ + ": truncated record");
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return buffer_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buffer_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buffer_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
  const std::uint32_t len = u32();
  need(len);
  std::string s(reinterpret_cast<const char*>(buffer_.data() + pos_), len);
  pos_ += len;
  return s;
}

void ByteReader::require_end() const {
  if (pos_ != end_) {
    throw FormatError(FormatError::Code::kCorrupt, what_ + ": trailing bytes");
  }
}

}  // namespace soundnet
