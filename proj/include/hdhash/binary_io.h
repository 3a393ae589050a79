/*
 * Copyright 2026 The hdhash Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HDHASH_BINARY_IO_H_
#define HDHASH_BINARY_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace hdhash {

// 64-bit FNV-1a. Used as file checksum and as model fingerprint.
std::uint64_t Fnv1a64(std::string_view bytes);

// Append-only little-endian encoder. Finish() appends the FNV-1a checksum
// of everything written so far as a trailing u64.
class ByteWriter {
 public:
  void Bytes(std::string_view bytes) { buffer_.append(bytes); }
  void U8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }
  void U16(std::uint16_t v) { Le(v, 2); }
  void U32(std::uint32_t v) { Le(v, 4); }
  void U64(std::uint64_t v) { Le(v, 8); }
  void F32(float v);
  void F64(double v);

  std::size_t size() const { return buffer_.size(); }
  const std::string& data() const { return buffer_; }
  std::string Finish() &&;

 private:
  void Le(std::uint64_t v, int width);

  std::string buffer_;
};

// Bounds-checked little-endian decoder over an in-memory file image. Every
// read names the field being decoded so corruption errors point at it.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  // Checks magic and version, then verifies and strips the trailing
  // checksum. Call once, before any other read.
  void OpenContainer(std::string_view magic, std::uint16_t version);

  std::string_view Bytes(std::size_t n, std::string_view field);
  std::uint8_t U8(std::string_view field);
  std::uint16_t U16(std::string_view field);
  std::uint32_t U32(std::string_view field);
  std::uint64_t U64(std::string_view field);
  float F32(std::string_view field);
  double F64(std::string_view field);

  std::size_t remaining() const { return data_.size() - pos_; }
  // Fails with a corrupt-file error if unread payload remains.
  void ExpectEnd() const;

 private:
  std::uint64_t Le(int width, std::string_view field);

  std::string_view data_;
  std::size_t pos_ = 0;
};

// Writes an encoded file image to disk atomically enough for batch use
// (write then rename).
void WriteFile(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace hdhash

#endif  // HDHASH_BINARY_IO_H_
