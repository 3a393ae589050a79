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

// Persisted pipeline artifacts. Every file is a container: 4-byte magic,
// u16 version, payload, u64 FNV-1a checksum; integers little-endian,
// matrices row-major float64.
//
//   NHEC encoder checkpoint: u32 z, z', D, c, then ext_weight, ext_bias,
//        gen_weight, gen_bias, rec_weight, rec_bias, classes
//   NHHM hash model: u32 L, u32 2D, hyperplanes, bias
//   NHSC scenes: u64 basis_seed, f64 w, u32 D, u64 encoder_fp, u64 M,
//        M ids, then the M x 2D flattened scene matrix
//   NHCS codes: u32 L, u32 D, u64 basis_seed, f64 w, u64 encoder_fp,
//        u64 hash_fp, u64 M, then M x (id, ceil(L/64) words)
//
// A model fingerprint is the FNV-1a hash of its serialized file.

#ifndef HDHASH_PIPELINE_ARTIFACTS_H_
#define HDHASH_PIPELINE_ARTIFACTS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hdhash/context_encoder.h"
#include "hdhash/hamming_index.h"
#include "hdhash/hyperplane_hash.h"

namespace hdhash {

inline constexpr std::uint16_t kArtifactFormatVersion = 1;

std::string SerializeEncoder(const EncoderParams& params);
EncoderParams DeserializeEncoder(std::string_view bytes);
std::uint64_t EncoderFingerprint(const EncoderParams& params);

std::string SerializeHashModel(const HashModel& model);
HashModel DeserializeHashModel(std::string_view bytes);
std::uint64_t HashFingerprint(const HashModel& model);

// Flattened scene representations of a set of images.
struct SceneSet {
  std::uint64_t basis_seed = 0;
  double length_scale = 1;
  std::uint32_t hyper_dim = 0;
  std::uint64_t encoder_fingerprint = 0;
  std::vector<ItemId> ids;
  Eigen::MatrixXd flat;  // ids.size() x 2D

  bool operator==(const SceneSet& o) const {
    return basis_seed == o.basis_seed && length_scale == o.length_scale &&
           hyper_dim == o.hyper_dim &&
           encoder_fingerprint == o.encoder_fingerprint && ids == o.ids &&
           flat == o.flat;
  }
};

std::string SerializeScenes(const SceneSet& scenes);
SceneSet DeserializeScenes(std::string_view bytes);

// Binarized codes of a set of images with their provenance.
struct CodeSet {
  int num_bits = 0;
  IndexMetadata metadata;
  std::vector<ItemId> ids;
  std::vector<PackedCode> codes;

  bool operator==(const CodeSet&) const = default;
};

std::string SerializeCodes(const CodeSet& codes);
CodeSet DeserializeCodes(std::string_view bytes);

// File helpers.
void SaveEncoder(const std::filesystem::path& path, const EncoderParams& p);
EncoderParams LoadEncoder(const std::filesystem::path& path);
void SaveHashModel(const std::filesystem::path& path, const HashModel& m);
HashModel LoadHashModel(const std::filesystem::path& path);
void SaveScenes(const std::filesystem::path& path, const SceneSet& s);
SceneSet LoadScenes(const std::filesystem::path& path);
void SaveCodes(const std::filesystem::path& path, const CodeSet& c);
CodeSet LoadCodes(const std::filesystem::path& path);

}  // namespace hdhash

#endif  // HDHASH_PIPELINE_ARTIFACTS_H_
