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

#ifndef SOUNDNET_ERROR_HPP_
#define SOUNDNET_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace soundnet {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer dimension disagreements. The message names the offending
// dimension so callers can report it verbatim.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// File and OS level failures (missing file, short read, ...).
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed on-disk data. The code distinguishes the rejection reason so
// tests and tools can tell a bad checksum from a bad header.
class FormatError : public Error {
 public:
  enum class Code {
    kBadMagic,
    kBadVersion,
    kBadCrc,
    kTruncated,
    kCorrupt,
  };

  FormatError(Code code, const std::string& msg) : Error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Invalid run configuration (unknown key, unparsable value).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace soundnet

#endif  // SOUNDNET_ERROR_HPP_
