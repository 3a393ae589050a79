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

#include "hdhash/pipeline/artifacts.h"

#include <cmath>

#include "hdhash/binary_io.h"
#include "hdhash/errors.h"

namespace hdhash {
namespace {

void WriteMatrix(ByteWriter& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.F64(m(i, j));
  }
}

void WriteVector(ByteWriter& w, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) w.F64(v(i));
}

// Refuses to allocate more than the file can hold.
void NeedBytes(const ByteReader& r, std::uint64_t rows, std::uint64_t cols,
               std::string_view field) {
  if (cols != 0 && rows > r.remaining() / 8 / cols) {
    throw CorruptFile(std::string(field), "truncated");
  }
}

double Finite(double v, std::string_view field) {
  if (!std::isfinite(v)) throw CorruptFile(std::string(field), "non-finite value");
  return v;
}

Eigen::MatrixXd ReadMatrix(ByteReader& r, std::uint64_t rows,
                           std::uint64_t cols, std::string_view field) {
  NeedBytes(r, rows, cols, field);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Finite(r.F64(field), field);
  }
  return m;
}

Eigen::VectorXd ReadVector(ByteReader& r, std::uint64_t n, std::string_view field) {
  NeedBytes(r, n, 1, field);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Finite(r.F64(field), field);
  return v;
}

ByteWriter Container(std::string_view magic) {
  ByteWriter w;
  w.Bytes(magic);
  w.U16(kArtifactFormatVersion);
  return w;
}

}  // namespace

std::string SerializeEncoder(const EncoderParams& p) {
  ByteWriter w = Container("NHEC");
  w.U32(static_cast<std::uint32_t>(p.input_dim()));
  w.U32(static_cast<std::uint32_t>(p.bottleneck_dim()));
  w.U32(static_cast<std::uint32_t>(p.hyper_dim()));
  w.U32(static_cast<std::uint32_t>(p.num_classes()));
  WriteMatrix(w, p.ext_weight);
  WriteVector(w, p.ext_bias);
  WriteMatrix(w, p.gen_weight);
  WriteVector(w, p.gen_bias);
  WriteMatrix(w, p.rec_weight);
  WriteVector(w, p.rec_bias);
  WriteMatrix(w, p.classes);
  return std::move(w).Finish();
}

EncoderParams DeserializeEncoder(std::string_view bytes) {
  ByteReader r(bytes);
  r.OpenContainer("NHEC", kArtifactFormatVersion);
  const std::uint64_t z = r.U32("feature_dim");
  const std::uint64_t zp = r.U32("bottleneck_dim");
  const std::uint64_t d = r.U32("hyper_dim");
  const std::uint64_t c = r.U32("num_classes");
  if (!(z > zp && zp >= 1 && d >= z && c >= 2)) {
    throw CorruptFile("shape", "invalid encoder dimensions");
  }
  EncoderParams p;
  p.ext_weight = ReadMatrix(r, zp, z, "ext_weight");
  p.ext_bias = ReadVector(r, zp, "ext_bias");
  p.gen_weight = ReadMatrix(r, d, zp, "gen_weight");
  p.gen_bias = ReadVector(r, d, "gen_bias");
  p.rec_weight = ReadMatrix(r, z, d, "rec_weight");
  p.rec_bias = ReadVector(r, z, "rec_bias");
  p.classes = ReadMatrix(r, d, c, "classes");
  r.ExpectEnd();
  return p;
}

std::uint64_t EncoderFingerprint(const EncoderParams& params) {
  return Fnv1a64(SerializeEncoder(params));
}

std::string SerializeHashModel(const HashModel& m) {
  ByteWriter w = Container("NHHM");
  w.U32(static_cast<std::uint32_t>(m.num_bits()));
  w.U32(static_cast<std::uint32_t>(m.input_dim()));
  WriteMatrix(w, m.hyperplanes);
  WriteVector(w, m.bias);
  return std::move(w).Finish();
}

HashModel DeserializeHashModel(std::string_view bytes) {
  ByteReader r(bytes);
  r.OpenContainer("NHHM", kArtifactFormatVersion);
  const std::uint64_t l = r.U32("num_bits");
  const std::uint64_t dim = r.U32("input_dim");
  if (l < 1 || dim < 2) throw CorruptFile("shape", "invalid hash model dimensions");
  HashModel m;
  m.hyperplanes = ReadMatrix(r, l, dim, "hyperplanes");
  m.bias = ReadVector(r, l, "bias");
  r.ExpectEnd();
  return m;
}

std::uint64_t HashFingerprint(const HashModel& model) {
  return Fnv1a64(SerializeHashModel(model));
}

std::string SerializeScenes(const SceneSet& s) {
  if (s.flat.rows() != static_cast<Eigen::Index>(s.ids.size()) ||
      s.flat.cols() != 2 * static_cast<Eigen::Index>(s.hyper_dim)) {
    throw InvalidArgument("scene set: matrix shape does not match ids / hyper_dim");
  }
  ByteWriter w = Container("NHSC");
  w.U64(s.basis_seed);
  w.F64(s.length_scale);
  w.U32(s.hyper_dim);
  w.U64(s.encoder_fingerprint);
  w.U64(s.ids.size());
  for (const ItemId id : s.ids) w.U64(id);
  WriteMatrix(w, s.flat);
  return std::move(w).Finish();
}

SceneSet DeserializeScenes(std::string_view bytes) {
  ByteReader r(bytes);
  r.OpenContainer("NHSC", kArtifactFormatVersion);
  SceneSet s;
  s.basis_seed = r.U64("basis_seed");
  s.length_scale = r.F64("length_scale");
  s.hyper_dim = r.U32("hyper_dim");
  s.encoder_fingerprint = r.U64("encoder_fingerprint");
  const std::uint64_t m = r.U64("count");
  if (!(s.length_scale > 0) || s.hyper_dim == 0) {
    throw CorruptFile("header", "invalid length scale or dimension");
  }
  NeedBytes(r, m, 1, "ids");
  s.ids.resize(static_cast<std::size_t>(m));
  for (ItemId& id : s.ids) id = r.U64("ids");
  s.flat = ReadMatrix(r, m, 2ull * s.hyper_dim, "scenes");
  r.ExpectEnd();
  return s;
}

std::string SerializeCodes(const CodeSet& c) {
  if (c.ids.size() != c.codes.size()) {
    throw InvalidArgument("code set: ids and codes differ in length");
  }
  ByteWriter w = Container("NHCS");
  w.U32(static_cast<std::uint32_t>(c.num_bits));
  w.U32(c.metadata.hyper_dim);
  w.U64(c.metadata.basis_seed);
  w.F64(c.metadata.length_scale);
  w.U64(c.metadata.encoder_fingerprint);
  w.U64(c.metadata.hash_fingerprint);
  w.U64(c.ids.size());
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    if (c.codes[i].num_bits() != c.num_bits) {
      throw InvalidArgument("code set: code width mismatch");
    }
    w.U64(c.ids[i]);
    for (const std::uint64_t word : c.codes[i].words()) w.U64(word);
  }
  return std::move(w).Finish();
}

CodeSet DeserializeCodes(std::string_view bytes) {
  ByteReader r(bytes);
  r.OpenContainer("NHCS", kArtifactFormatVersion);
  CodeSet c;
  c.num_bits = static_cast<int>(r.U32("num_bits"));
  c.metadata.hyper_dim = r.U32("hyper_dim");
  c.metadata.basis_seed = r.U64("basis_seed");
  c.metadata.length_scale = r.F64("length_scale");
  c.metadata.encoder_fingerprint = r.U64("encoder_fingerprint");
  c.metadata.hash_fingerprint = r.U64("hash_fingerprint");
  const std::uint64_t m = r.U64("count");
  if (c.num_bits < 1) throw CorruptFile("num_bits", "must be >= 1");
  const auto words = static_cast<std::uint64_t>(WordsForBits(c.num_bits));
  NeedBytes(r, m, 1 + words, "codes");
  for (std::uint64_t i = 0; i < m; ++i) {
    c.ids.push_back(r.U64("ids"));
    std::vector<std::uint64_t> w(static_cast<std::size_t>(words));
    for (auto& word : w) word = r.U64("codes");
    try {
      c.codes.emplace_back(c.num_bits, std::move(w));
    } catch (const InvalidArgument& e) {
      throw CorruptFile("codes", e.what());
    }
  }
  r.ExpectEnd();
  return c;
}

void SaveEncoder(const std::filesystem::path& path, const EncoderParams& p) {
  WriteFile(path, SerializeEncoder(p));
}
EncoderParams LoadEncoder(const std::filesystem::path& path) {
  return DeserializeEncoder(ReadFile(path));
}
void SaveHashModel(const std::filesystem::path& path, const HashModel& m) {
  WriteFile(path, SerializeHashModel(m));
}
HashModel LoadHashModel(const std::filesystem::path& path) {
  return DeserializeHashModel(ReadFile(path));
}
void SaveScenes(const std::filesystem::path& path, const SceneSet& s) {
  WriteFile(path, SerializeScenes(s));
}
SceneSet LoadScenes(const std::filesystem::path& path) {
  return DeserializeScenes(ReadFile(path));
}
void SaveCodes(const std::filesystem::path& path, const CodeSet& c) {
  WriteFile(path, SerializeCodes(c));
}
CodeSet LoadCodes(const std::filesystem::path& path) {
  return DeserializeCodes(ReadFile(path));
}

}  // namespace hdhash
