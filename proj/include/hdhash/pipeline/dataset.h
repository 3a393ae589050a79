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

// Feature datasets: per-image records in a line-oriented text manifest plus
// a binary blob of float32 feature vectors.
//
// Manifest ("<stem>.manifest"):
//   NHFD 1
//   feature_dim <z>
//   vectors <count>
//   blob_checksum <16 hex digits>
//   images <n>
//   image <id> <width> <height> <global_vector> <num_objects>
//   object <x> <y> <w> <h> <label> <feature_vector>     (num_objects lines)
//   ...
// Boxes are in pixels; labels are 0-based; vector fields index the blob.
//
// Blob ("<stem>.blob"), little-endian:
//   "NHFB", u16 version, u32 z, u64 count, count * z float32, u64 checksum
//
// Ground truth ("truth.txt"):
//   NHGT 1
//   images <n>
//   image <id> <width> <height> <num_objects>
//   object <label> <center_x> <center_y>

#ifndef HDHASH_PIPELINE_DATASET_H_
#define HDHASH_PIPELINE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdhash/hamming_index.h"
#include "hdhash/metrics.h"

namespace hdhash {

inline constexpr std::uint16_t kDatasetFormatVersion = 1;

struct BoundingBox {
  double x = 0, y = 0, w = 0, h = 0;
  double center_x() const { return x + w / 2; }
  double center_y() const { return y + h / 2; }
};

struct ObjectRecord {
  BoundingBox box;
  int label = 0;
  std::uint64_t feature = 0;
};

struct ImageRecord {
  ItemId id = 0;
  double width = 1;
  double height = 1;
  std::uint64_t global_feature = 0;
  std::vector<ObjectRecord> objects;
};

class FeatureDataset {
 public:
  FeatureDataset() = default;
  // Validates ids (strictly increasing), offsets, boxes and blob size.
  FeatureDataset(int feature_dim, std::vector<ImageRecord> images,
                 std::vector<float> blob);

  int feature_dim() const { return feature_dim_; }
  std::span<const ImageRecord> images() const { return images_; }
  std::size_t vector_count() const;
  std::span<const float> Vector(std::uint64_t index) const;
  std::vector<double> VectorAsDouble(std::uint64_t index) const;
  // Throws InvalidArgument if absent.
  const ImageRecord& Find(ItemId id) const;

  std::string ManifestText() const;
  std::string BlobBytes() const;
  static FeatureDataset Parse(std::string_view manifest, std::string_view blob);

  void Save(const std::filesystem::path& stem) const;
  static FeatureDataset Load(const std::filesystem::path& stem);

  bool operator==(const FeatureDataset&) const;

 private:
  int feature_dim_ = 0;
  std::vector<ImageRecord> images_;
  std::vector<float> blob_;
};

// Evaluation labels and object centers, keyed by image id.
class GroundTruth {
 public:
  GroundTruth() = default;
  explicit GroundTruth(AnnotationMap annotations);

  const AnnotationMap& annotations() const { return annotations_; }
  // Throws InvalidArgument if absent.
  const SpatialAnnotation& Get(ItemId id) const;
  LabeledItem Labels(ItemId id) const;
  void Merge(const GroundTruth& other);

  std::string Text() const;
  static GroundTruth Parse(std::string_view text);
  void Save(const std::filesystem::path& path) const;
  static GroundTruth Load(const std::filesystem::path& path);

 private:
  AnnotationMap annotations_;
};

// Ground truth read off a dataset's own boxes and labels.
GroundTruth TruthFromDataset(const FeatureDataset& dataset);

}  // namespace hdhash

#endif  // HDHASH_PIPELINE_DATASET_H_
