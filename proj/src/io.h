// Copyright 2026 The sfns Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File helpers, little-endian byte streams and CRC32C.

#ifndef SFNS_IO_H_
#define SFNS_IO_H_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "error.h"

namespace sfns {

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

// Calls `fn(line_number, line)` for every non-blank line (1-based numbers).
void ForEachLine(const std::string& path,
                 const std::function<void(size_t, std::string_view)>& fn);

uint32_t Crc32c(std::span<const uint8_t> bytes);

class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void Put(T value) {
    uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
  }

  void PutString(std::string_view s) {
    Put<uint32_t>(static_cast<uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }

  void PutBytes(std::span<const uint8_t> raw) {
    bytes_.insert(bytes_.end(), raw.begin(), raw.end());
  }

  std::vector<uint8_t>& bytes() { return bytes_; }
  size_t size() const { return bytes_.size(); }

 private:
  std::vector<uint8_t> bytes_;
};

// Every read past the end throws a kTruncated error.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T Get() {
    Require(sizeof(T));
    uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string GetString() {
    const uint32_t n = Get<uint32_t>();
    Require(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::span<const uint8_t> GetBytes(size_t n) {
    Require(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Require(size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncated, "unexpected end of data");
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace sfns

#endif  // SFNS_IO_H_
