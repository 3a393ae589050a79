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

#include "hdhash/hamming_index.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "hdhash/binary_io.h"
#include "hdhash/errors.h"

namespace hdhash {
namespace {

constexpr std::string_view kIndexMagic = "NHIX";

std::uint64_t LastWordMask(int num_bits) {
  const int rem = num_bits % 64;
  return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

}  // namespace

PackedCode::PackedCode(int num_bits)
    : num_bits_(num_bits),
      words_(static_cast<std::size_t>(WordsForBits(num_bits)), 0) {
  if (num_bits < 1) throw InvalidArgument("PackedCode: need >= 1 bit");
}

PackedCode::PackedCode(int num_bits, std::vector<std::uint64_t> words)
    : num_bits_(num_bits), words_(std::move(words)) {
  if (num_bits < 1) throw InvalidArgument("PackedCode: need >= 1 bit");
  if (words_.size() != static_cast<std::size_t>(WordsForBits(num_bits))) {
    throw InvalidArgument("PackedCode: word count does not match width");
  }
  if ((words_.back() & ~LastWordMask(num_bits)) != 0) {
    throw InvalidArgument("PackedCode: unused high bits set");
  }
}

PackedCode PackedCode::Pack(std::span<const std::int8_t> bipolar) {
  PackedCode code(static_cast<int>(bipolar.size()));
  for (std::size_t j = 0; j < bipolar.size(); ++j) {
    if (bipolar[j] == 1) {
      code.words_[j / 64] |= std::uint64_t{1} << (j % 64);
    } else if (bipolar[j] != -1) {
      throw InvalidArgument("PackedCode::Pack: entry " + std::to_string(j) +
                            " is not +1/-1");
    }
  }
  return code;
}

std::vector<std::int8_t> PackedCode::Unpack() const {
  std::vector<std::int8_t> out(static_cast<std::size_t>(num_bits_));
  for (int j = 0; j < num_bits_; ++j) out[j] = bit(j) ? 1 : -1;
  return out;
}

int Hamming(const PackedCode& a, const PackedCode& b) {
  if (a.num_bits() != b.num_bits()) {
    throw InvalidArgument("Hamming: width mismatch (" +
                          std::to_string(a.num_bits()) + " vs " +
                          std::to_string(b.num_bits()) + ")");
  }
  int d = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    d += std::popcount(a.words()[w] ^ b.words()[w]);
  }
  return d;
}

RetrievalIndex RetrievalIndex::Build(
    std::vector<std::pair<ItemId, PackedCode>> items, int num_bits,
    const IndexMetadata& metadata) {
  if (num_bits < 1) throw InvalidArgument("index: need >= 1 bit");
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  RetrievalIndex index;
  index.num_bits_ = num_bits;
  index.words_per_code_ = WordsForBits(num_bits);
  index.metadata_ = metadata;
  index.ids_.reserve(items.size());
  index.words_.reserve(items.size() *
                       static_cast<std::size_t>(index.words_per_code_));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& [id, code] = items[i];
    if (i > 0 && items[i - 1].first == id) {
      throw InvalidArgument("index: duplicate id " + std::to_string(id));
    }
    if (code.num_bits() != num_bits) {
      throw InvalidArgument("index: code for id " + std::to_string(id) +
                            " has " + std::to_string(code.num_bits()) +
                            " bits, expected " + std::to_string(num_bits));
    }
    index.ids_.push_back(id);
    index.words_.insert(index.words_.end(), code.words().begin(),
                        code.words().end());
  }
  return index;
}

PackedCode RetrievalIndex::code(std::size_t i) const {
  const auto begin = words_.begin() + static_cast<std::ptrdiff_t>(
                                          i * words_per_code_);
  return PackedCode(num_bits_,
                    std::vector<std::uint64_t>(begin, begin + words_per_code_));
}

std::vector<SearchHit> RetrievalIndex::QueryTopK(const PackedCode& query,
                                                 std::size_t k) const {
  if (k < 1) throw InvalidArgument("QueryTopK: k must be >= 1");
  if (query.num_bits() != num_bits_) {
    throw InvalidArgument("QueryTopK: query has " +
                          std::to_string(query.num_bits()) +
                          " bits, index has " + std::to_string(num_bits_));
  }
  const auto q = query.words();
  std::vector<SearchHit> hits(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const std::uint64_t* w = words_.data() + i * words_per_code_;
    int d = 0;
    for (int t = 0; t < words_per_code_; ++t) d += std::popcount(w[t] ^ q[t]);
    hits[i] = {ids_[i], d};
  }
  const std::size_t n = std::min(k, hits.size());
  const auto by_rank = [](const SearchHit& a, const SearchHit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  };
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n),
                    hits.end(), by_rank);
  hits.resize(n);
  return hits;
}

std::string RetrievalIndex::Serialize() const {
  ByteWriter out;
  out.Bytes(kIndexMagic);
  out.U16(kIndexFormatVersion);
  out.U8(0);  // bit order
  out.U8(0);  // reserved
  out.U32(static_cast<std::uint32_t>(num_bits_));
  out.U32(metadata_.hyper_dim);
  out.U64(ids_.size());
  out.U64(metadata_.basis_seed);
  out.F64(metadata_.length_scale);
  out.U64(metadata_.encoder_fingerprint);
  out.U64(metadata_.hash_fingerprint);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out.U64(ids_[i]);
    for (int t = 0; t < words_per_code_; ++t) {
      out.U64(words_[i * words_per_code_ + t]);
    }
  }
  return std::move(out).Finish();
}

RetrievalIndex RetrievalIndex::Deserialize(std::string_view bytes) {
  ByteReader in(bytes);
  in.OpenContainer(kIndexMagic, kIndexFormatVersion);
  if (in.U8("bit_order") != 0) {
    throw CorruptFile("bit_order", "unsupported bit order");
  }
  in.U8("reserved");
  const std::uint32_t num_bits = in.U32("num_bits");
  if (num_bits < 1 || num_bits > (1u << 20)) {
    throw CorruptFile("num_bits", "out of range");
  }
  IndexMetadata meta;
  meta.hyper_dim = in.U32("hyper_dim");
  const std::uint64_t count = in.U64("count");
  meta.basis_seed = in.U64("basis_seed");
  meta.length_scale = in.F64("length_scale");
  meta.encoder_fingerprint = in.U64("encoder_fingerprint");
  meta.hash_fingerprint = in.U64("hash_fingerprint");

  const int words = WordsForBits(static_cast<int>(num_bits));
  const std::uint64_t entry_bytes = 8 + 8ull * words;
  if (count > in.remaining() / entry_bytes ||
      count * entry_bytes != in.remaining()) {
    throw CorruptFile("count", "entry count does not match payload size");
  }
  RetrievalIndex index;
  index.num_bits_ = static_cast<int>(num_bits);
  index.words_per_code_ = words;
  index.metadata_ = meta;
  index.ids_.reserve(count);
  index.words_.reserve(count * words);
  const std::uint64_t mask = LastWordMask(static_cast<int>(num_bits));
  for (std::uint64_t i = 0; i < count; ++i) {
    const ItemId id = in.U64("entry.id");
    if (i > 0 && id <= index.ids_.back()) {
      throw CorruptFile("entry.id", "ids not strictly increasing");
    }
    index.ids_.push_back(id);
    for (int t = 0; t < words; ++t) {
      const std::uint64_t w = in.U64("entry.code");
      if (t == words - 1 && (w & ~mask) != 0) {
        throw CorruptFile("entry.code", "unused high bits set");
      }
      index.words_.push_back(w);
    }
  }
  in.ExpectEnd();
  return index;
}

void RetrievalIndex::Save(const std::filesystem::path& path) const {
  WriteFile(path, Serialize());
}

RetrievalIndex RetrievalIndex::Load(const std::filesystem::path& path) {
  return Deserialize(ReadFile(path));
}

}  // namespace hdhash
