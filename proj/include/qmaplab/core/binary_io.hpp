// Copyright 2026 The QMapLab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMAPLAB_CORE_BINARY_IO_HPP_
#define QMAPLAB_CORE_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>

#include "qmaplab/core/errors.hpp"

namespace qmaplab::io {

// Little-endian encoding of integral and IEEE-754 values, independent of the
// host byte order.

template <typename T>
  requires std::is_arithmetic_v<T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
  if (!out) throw IoError("write failed");
}

template <typename T>
  requires std::is_arithmetic_v<T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw IoError("unexpected end of stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<U>(bytes[i]) << (8 * i));
  }
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) throw IoError("write failed");
}

inline std::string read_string(std::istream& in, std::size_t max_len = 1 << 20) {
  const auto n = read_le<std::uint32_t>(in);
  if (n > max_len) throw IoError("string record too long");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw IoError("unexpected end of stream");
  return s;
}

template <typename T>
void write_floats(std::ostream& out, std::span<const T> values) {
  write_le<std::uint64_t>(out, values.size());
  for (T v : values) write_le<float>(out, static_cast<float>(v));
}

/// Reads a length-prefixed float32 blob into `values`, which must already
/// have the expected size.
template <typename T>
void read_floats(std::istream& in, std::span<T> values) {
  const auto n = read_le<std::uint64_t>(in);
  if (n != values.size()) {
    throw IoError("blob size " + std::to_string(n) + " does not match " +
                  std::to_string(values.size()));
  }
  for (auto& v : values) v = static_cast<T>(read_le<float>(in));
}

inline void expect_magic(std::istream& in, const std::string& magic,
                         std::uint32_t version) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (!in || got != magic) throw IoError("bad magic, expected " + magic);
  const auto v = read_le<std::uint32_t>(in);
  if (v != version) {
    throw IoError("unsupported " + magic + " version " + std::to_string(v));
  }
}

inline void write_magic(std::ostream& out, const std::string& magic,
                        std::uint32_t version) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  write_le<std::uint32_t>(out, version);
}

}  // namespace qmaplab::io

#endif  // QMAPLAB_CORE_BINARY_IO_HPP_
