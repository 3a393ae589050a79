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

#include "hdhash/binary_io.h"

#include <bit>
#include <fstream>
#include <iterator>

#include "hdhash/errors.h"

namespace hdhash {

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ByteWriter::Le(std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) {
    buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void ByteWriter::F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

std::string ByteWriter::Finish() && {
  const std::uint64_t checksum = Fnv1a64(buffer_);
  U64(checksum);
  return std::move(buffer_);
}

void ByteReader::OpenContainer(std::string_view magic,
                               std::uint16_t version) {
  if (data_.size() < magic.size() + 2 + 8) {
    throw CorruptFile("header", "file truncated (" +
                                    std::to_string(data_.size()) + " bytes)");
  }
  if (data_.substr(0, magic.size()) != magic) {
    throw CorruptFile("magic", "expected '" + std::string(magic) + "'");
  }
  pos_ = magic.size();
  const std::uint16_t found = U16("version");
  if (found != version) {
    throw CorruptFile("version", "expected " + std::to_string(version) +
                                     ", found " + std::to_string(found));
  }
  const std::string_view body = data_.substr(0, data_.size() - 8);
  ByteReader tail(data_.substr(data_.size() - 8));
  if (tail.U64("checksum") != Fnv1a64(body)) {
    throw CorruptFile("checksum", "checksum mismatch");
  }
  data_ = body;
}

std::string_view ByteReader::Bytes(std::size_t n, std::string_view field) {
  if (remaining() < n) {
    throw CorruptFile(std::string(field), "truncated");
  }
  const std::string_view out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint64_t ByteReader::Le(int width, std::string_view field) {
  const std::string_view raw = Bytes(static_cast<std::size_t>(width), field);
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i]))
         << (8 * i);
  }
  return v;
}

std::uint8_t ByteReader::U8(std::string_view field) {
  return static_cast<std::uint8_t>(Le(1, field));
}
std::uint16_t ByteReader::U16(std::string_view field) {
  return static_cast<std::uint16_t>(Le(2, field));
}
std::uint32_t ByteReader::U32(std::string_view field) {
  return static_cast<std::uint32_t>(Le(4, field));
}
std::uint64_t ByteReader::U64(std::string_view field) { return Le(8, field); }
float ByteReader::F32(std::string_view field) {
  return std::bit_cast<float>(U32(field));
}
double ByteReader::F64(std::string_view field) {
  return std::bit_cast<double>(U64(field));
}

void ByteReader::ExpectEnd() const {
  if (remaining() != 0) {
    throw CorruptFile("payload", std::to_string(remaining()) +
                                     " trailing bytes after last record");
  }
}

void WriteFile(const std::filesystem::path& path, std::string_view bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace hdhash
