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

// Bit-packed bipolar codes and exact top-K Hamming search.
//
// Packing: code position j lives in word j / 64, bit j % 64; bit set means
// +1, clear means -1. Unused high bits of the last word are zero.
//
// Index file layout (all integers little-endian):
//   magic            4 bytes  "NHIX"
//   version          u16      kIndexFormatVersion
//   bit_order        u8       0 = little-endian words, bit 0 first
//   reserved         u8       0
//   num_bits (L)     u32
//   hyper_dim (D)    u32
//   count            u64
//   basis_seed       u64
//   length_scale w   f64
//   encoder_fp       u64
//   hash_fp          u64
//   entries          count x (id u64, ceil(L/64) x u64 words)
//   checksum         u64      FNV-1a of every preceding byte

#ifndef HDHASH_HAMMING_INDEX_H_
#define HDHASH_HAMMING_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hdhash {

using ItemId = std::uint64_t;

inline constexpr std::uint16_t kIndexFormatVersion = 1;

inline int WordsForBits(int num_bits) { return (num_bits + 63) / 64; }

class PackedCode {
 public:
  PackedCode() = default;
  // All -1 code of the given width.
  explicit PackedCode(int num_bits);
  PackedCode(int num_bits, std::vector<std::uint64_t> words);

  // Entries must be exactly +1 or -1.
  static PackedCode Pack(std::span<const std::int8_t> bipolar);
  std::vector<std::int8_t> Unpack() const;

  int num_bits() const { return num_bits_; }
  std::span<const std::uint64_t> words() const { return words_; }
  bool bit(int j) const { return (words_[j / 64] >> (j % 64)) & 1u; }

  bool operator==(const PackedCode&) const = default;

 private:
  int num_bits_ = 0;
  std::vector<std::uint64_t> words_;
};

int Hamming(const PackedCode& a, const PackedCode& b);

// Configuration the codes were produced under. Queries must match it.
struct IndexMetadata {
  std::uint64_t basis_seed = 0;
  double length_scale = 1.0;
  std::uint32_t hyper_dim = 0;
  std::uint64_t encoder_fingerprint = 0;
  std::uint64_t hash_fingerprint = 0;

  bool operator==(const IndexMetadata&) const = default;
};

struct SearchHit {
  ItemId id;
  int distance;

  bool operator==(const SearchHit&) const = default;
};

class RetrievalIndex {
 public:
  RetrievalIndex() = default;

  // Ids must be unique; entries are stored sorted by id.
  static RetrievalIndex Build(std::vector<std::pair<ItemId, PackedCode>> items,
                              int num_bits, const IndexMetadata& metadata);

  // min(k, size()) hits by ascending distance, ties by ascending id.
  std::vector<SearchHit> QueryTopK(const PackedCode& query,
                                   std::size_t k) const;

  std::string Serialize() const;
  static RetrievalIndex Deserialize(std::string_view bytes);
  void Save(const std::filesystem::path& path) const;
  static RetrievalIndex Load(const std::filesystem::path& path);

  std::size_t size() const { return ids_.size(); }
  int num_bits() const { return num_bits_; }
  const IndexMetadata& metadata() const { return metadata_; }
  std::span<const ItemId> ids() const { return ids_; }
  PackedCode code(std::size_t i) const;

  bool operator==(const RetrievalIndex&) const = default;

 private:
  int num_bits_ = 0;
  int words_per_code_ = 0;
  IndexMetadata metadata_;
  std::vector<ItemId> ids_;
  std::vector<std::uint64_t> words_;  // size() x words_per_code_
};

}  // namespace hdhash

#endif  // HDHASH_HAMMING_INDEX_H_
