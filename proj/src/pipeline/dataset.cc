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

#include "hdhash/pipeline/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "hdhash/binary_io.h"
#include "hdhash/errors.h"

namespace hdhash {
namespace {

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Whitespace tokenizer over lines; errors name the manifest field.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-empty line split into tokens. Throws if exhausted.
  std::vector<std::string_view> Next(std::string_view field) {
    while (!text_.empty()) {
      const auto nl = text_.find('\n');
      std::string_view line = text_.substr(0, nl);
      text_.remove_prefix(nl == std::string_view::npos ? text_.size() : nl + 1);
      ++line_no_;
      std::vector<std::string_view> tokens;
      std::size_t pos = 0;
      while (pos < line.size()) {
        const auto start = line.find_first_not_of(" \t\r", pos);
        if (start == std::string_view::npos) break;
        const auto end = line.find_first_of(" \t\r", start);
        tokens.push_back(line.substr(start, end == std::string_view::npos
                                                ? std::string_view::npos
                                                : end - start));
        pos = end == std::string_view::npos ? line.size() : end;
      }
      if (!tokens.empty()) return tokens;
    }
    throw CorruptFile(std::string(field), "unexpected end of text");
  }

  std::vector<std::string_view> Expect(std::string_view keyword,
                                       std::size_t arity) {
    auto t = Next(keyword);
    if (t[0] != keyword || t.size() != arity + 1) {
      throw CorruptFile(std::string(keyword),
                        "line " + std::to_string(line_no_) + ": expected '" +
                            std::string(keyword) + "' with " +
                            std::to_string(arity) + " values");
    }
    return t;
  }

  bool AtEnd() {
    return text_.find_first_not_of(" \t\r\n") == std::string_view::npos;
  }

 private:
  std::string_view text_;
  int line_no_ = 0;
};

template <typename T>
T Num(std::string_view token, std::string_view field) {
  T out{};
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>) {
    r = std::from_chars(token.data(), token.data() + token.size(), out);
  } else {
    r = std::from_chars(token.data(), token.data() + token.size(), out, 10);
  }
  if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
    throw CorruptFile(std::string(field), "bad number '" + std::string(token) + "'");
  }
  return out;
}

void Check(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("dataset: " + what);
}

}  // namespace

FeatureDataset::FeatureDataset(int feature_dim, std::vector<ImageRecord> images,
                               std::vector<float> blob)
    : feature_dim_(feature_dim), images_(std::move(images)), blob_(std::move(blob)) {
  Check(feature_dim_ >= 1, "feature_dim must be >= 1");
  Check(blob_.size() % static_cast<std::size_t>(feature_dim_) == 0,
        "blob size is not a multiple of feature_dim");
  for (const float v : blob_) Check(std::isfinite(v), "non-finite feature value");
  const std::size_t count = vector_count();
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const ImageRecord& im = images_[i];
    const std::string where = "image " + std::to_string(im.id) + ": ";
    if (i > 0) Check(images_[i - 1].id < im.id, where + "ids must be strictly increasing");
    Check(im.width > 0 && im.height > 0, where + "non-positive image size");
    Check(im.global_feature < count, where + "global feature offset out of range");
    for (const ObjectRecord& o : im.objects) {
      Check(o.feature < count, where + "object feature offset out of range");
      Check(o.label >= 0, where + "negative label");
      const BoundingBox& b = o.box;
      Check(b.w >= 0 && b.h >= 0 && b.x >= 0 && b.y >= 0 &&
                b.x + b.w <= im.width && b.y + b.h <= im.height,
            where + "bounding box outside the image");
    }
  }
}

std::size_t FeatureDataset::vector_count() const {
  return feature_dim_ == 0 ? 0 : blob_.size() / static_cast<std::size_t>(feature_dim_);
}

std::span<const float> FeatureDataset::Vector(std::uint64_t index) const {
  if (index >= vector_count()) throw InvalidArgument("dataset: vector index out of range");
  return std::span<const float>(blob_).subspan(
      static_cast<std::size_t>(index) * static_cast<std::size_t>(feature_dim_),
      static_cast<std::size_t>(feature_dim_));
}

std::vector<double> FeatureDataset::VectorAsDouble(std::uint64_t index) const {
  const auto v = Vector(index);
  return {v.begin(), v.end()};
}

const ImageRecord& FeatureDataset::Find(ItemId id) const {
  const auto it = std::lower_bound(
      images_.begin(), images_.end(), id,
      [](const ImageRecord& im, ItemId key) { return im.id < key; });
  if (it == images_.end() || it->id != id) {
    throw InvalidArgument("dataset: no image with id " + std::to_string(id));
  }
  return *it;
}

std::string FeatureDataset::BlobBytes() const {
  ByteWriter w;
  w.Bytes("NHFB");
  w.U16(kDatasetFormatVersion);
  w.U32(static_cast<std::uint32_t>(feature_dim_));
  w.U64(vector_count());
  for (const float v : blob_) w.F32(v);
  return std::move(w).Finish();
}

std::string FeatureDataset::ManifestText() const {
  char checksum[24];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(BlobBytes())));
  std::string out = "NHFD " + std::to_string(kDatasetFormatVersion) + "\n";
  out += "feature_dim " + std::to_string(feature_dim_) + "\n";
  out += "vectors " + std::to_string(vector_count()) + "\n";
  out += std::string("blob_checksum ") + checksum + "\n";
  out += "images " + std::to_string(images_.size()) + "\n";
  for (const ImageRecord& im : images_) {
    out += "image " + std::to_string(im.id) + " " + Fmt(im.width) + " " +
           Fmt(im.height) + " " + std::to_string(im.global_feature) + " " +
           std::to_string(im.objects.size()) + "\n";
    for (const ObjectRecord& o : im.objects) {
      out += "object " + Fmt(o.box.x) + " " + Fmt(o.box.y) + " " + Fmt(o.box.w) +
             " " + Fmt(o.box.h) + " " + std::to_string(o.label) + " " +
             std::to_string(o.feature) + "\n";
    }
  }
  return out;
}

FeatureDataset FeatureDataset::Parse(std::string_view manifest,
                                     std::string_view blob) {
  LineReader lines(manifest);
  const auto header = lines.Expect("NHFD", 1);
  if (Num<int>(header[1], "version") != kDatasetFormatVersion) {
    throw CorruptFile("version", "unsupported manifest version");
  }
  const int z = Num<int>(lines.Expect("feature_dim", 1)[1], "feature_dim");
  const auto vectors = Num<std::uint64_t>(lines.Expect("vectors", 1)[1], "vectors");
  const auto checksum =
      lines.Expect("blob_checksum", 1)[1];
  std::uint64_t want_checksum = 0;
  {
    const auto r = std::from_chars(checksum.data(), checksum.data() + checksum.size(),
                                   want_checksum, 16);
    if (r.ec != std::errc() || r.ptr != checksum.data() + checksum.size()) {
      throw CorruptFile("blob_checksum", "bad hex value");
    }
  }
  const auto n = Num<std::uint64_t>(lines.Expect("images", 1)[1], "images");
  std::vector<ImageRecord> images;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto t = lines.Expect("image", 5);
    ImageRecord im;
    im.id = Num<std::uint64_t>(t[1], "image");
    im.width = Num<double>(t[2], "image");
    im.height = Num<double>(t[3], "image");
    im.global_feature = Num<std::uint64_t>(t[4], "image");
    const auto objects = Num<std::uint64_t>(t[5], "image");
    for (std::uint64_t k = 0; k < objects; ++k) {
      const auto o = lines.Expect("object", 6);
      im.objects.push_back({.box = {Num<double>(o[1], "object"), Num<double>(o[2], "object"),
                                    Num<double>(o[3], "object"), Num<double>(o[4], "object")},
                            .label = Num<int>(o[5], "object"),
                            .feature = Num<std::uint64_t>(o[6], "object")});
    }
    images.push_back(std::move(im));
  }
  if (!lines.AtEnd()) throw CorruptFile("images", "trailing content after last image");

  if (Fnv1a64(blob) != want_checksum) {
    throw CorruptFile("blob_checksum", "blob does not match the manifest");
  }
  ByteReader r(blob);
  r.OpenContainer("NHFB", kDatasetFormatVersion);
  const auto blob_z = r.U32("feature_dim");
  const auto count = r.U64("count");
  if (blob_z != static_cast<std::uint32_t>(z)) {
    throw CorruptFile("feature_dim", "blob and manifest disagree");
  }
  if (count != vectors) throw CorruptFile("vectors", "blob and manifest disagree");
  if (r.remaining() != count * blob_z * 4) {
    throw CorruptFile("count", "payload size does not match the vector count");
  }
  std::vector<float> values(static_cast<std::size_t>(count * blob_z));
  for (float& v : values) v = r.F32("vectors");
  r.ExpectEnd();
  return FeatureDataset(z, std::move(images), std::move(values));
}

void FeatureDataset::Save(const std::filesystem::path& stem) const {
  WriteFile(stem.string() + ".blob", BlobBytes());
  WriteFile(stem.string() + ".manifest", ManifestText());
}

FeatureDataset FeatureDataset::Load(const std::filesystem::path& stem) {
  const std::string manifest = ReadFile(stem.string() + ".manifest");
  const std::string blob = ReadFile(stem.string() + ".blob");
  return Parse(manifest, blob);
}

bool FeatureDataset::operator==(const FeatureDataset& o) const {
  return ManifestText() == o.ManifestText() && blob_ == o.blob_;
}

GroundTruth::GroundTruth(AnnotationMap annotations)
    : annotations_(std::move(annotations)) {
  for (const auto& [id, a] : annotations_) {
    if (id != a.id) throw InvalidArgument("ground truth: key/id mismatch");
    if (!(a.image_w > 0 && a.image_h > 0)) {
      throw InvalidArgument("ground truth: non-positive image size for id " +
                            std::to_string(id));
    }
  }
}

const SpatialAnnotation& GroundTruth::Get(ItemId id) const {
  const auto it = annotations_.find(id);
  if (it == annotations_.end()) {
    throw InvalidArgument("ground truth: no entry for id " + std::to_string(id));
  }
  return it->second;
}

LabeledItem GroundTruth::Labels(ItemId id) const {
  LabeledItem item{id, {}};
  for (const AnnotatedObject& o : Get(id).objects) item.labels.push_back(o.label);
  std::sort(item.labels.begin(), item.labels.end());
  item.labels.erase(std::unique(item.labels.begin(), item.labels.end()),
                    item.labels.end());
  return item;
}

void GroundTruth::Merge(const GroundTruth& other) {
  for (const auto& [id, a] : other.annotations_) {
    if (!annotations_.emplace(id, a).second) {
      throw InvalidArgument("ground truth: duplicate id " + std::to_string(id));
    }
  }
}

std::string GroundTruth::Text() const {
  const std::map<ItemId, const SpatialAnnotation*> sorted = [&] {
    std::map<ItemId, const SpatialAnnotation*> m;
    for (const auto& [id, a] : annotations_) m.emplace(id, &a);
    return m;
  }();
  std::string out = "NHGT 1\nimages " + std::to_string(sorted.size()) + "\n";
  for (const auto& [id, a] : sorted) {
    out += "image " + std::to_string(id) + " " + Fmt(a->image_w) + " " +
           Fmt(a->image_h) + " " + std::to_string(a->objects.size()) + "\n";
    for (const AnnotatedObject& o : a->objects) {
      out += "object " + std::to_string(o.label) + " " + Fmt(o.x) + " " + Fmt(o.y) + "\n";
    }
  }
  return out;
}

GroundTruth GroundTruth::Parse(std::string_view text) {
  LineReader lines(text);
  const auto header = lines.Expect("NHGT", 1);
  if (Num<int>(header[1], "version") != 1) {
    throw CorruptFile("version", "unsupported ground-truth version");
  }
  const auto n = Num<std::uint64_t>(lines.Expect("images", 1)[1], "images");
  AnnotationMap map;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto t = lines.Expect("image", 4);
    SpatialAnnotation a;
    a.id = Num<std::uint64_t>(t[1], "image");
    a.image_w = Num<double>(t[2], "image");
    a.image_h = Num<double>(t[3], "image");
    const auto objects = Num<std::uint64_t>(t[4], "image");
    for (std::uint64_t k = 0; k < objects; ++k) {
      const auto o = lines.Expect("object", 3);
      a.objects.push_back({Num<int>(o[1], "object"), Num<double>(o[2], "object"),
                           Num<double>(o[3], "object")});
    }
    if (!map.emplace(a.id, a).second) {
      throw CorruptFile("image", "duplicate id " + std::to_string(a.id));
    }
  }
  if (!lines.AtEnd()) throw CorruptFile("images", "trailing content after last image");
  return GroundTruth(std::move(map));
}

void GroundTruth::Save(const std::filesystem::path& path) const {
  WriteFile(path, Text());
}

GroundTruth GroundTruth::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

GroundTruth TruthFromDataset(const FeatureDataset& dataset) {
  AnnotationMap map;
  for (const ImageRecord& im : dataset.images()) {
    SpatialAnnotation a{im.id, {}, im.width, im.height};
    for (const ObjectRecord& o : im.objects) {
      a.objects.push_back({o.label, o.box.center_x(), o.box.center_y()});
    }
    map.emplace(im.id, std::move(a));
  }
  return GroundTruth(std::move(map));
}

}  // namespace hdhash
