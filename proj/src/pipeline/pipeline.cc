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

#include "hdhash/pipeline/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "hdhash/errors.h"
#include "hdhash/metrics.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

using ordered_json = nlohmann::ordered_json;

Hypervector Encode(const EncoderParams& encoder, std::span<const double> f) {
  if (static_cast<int>(f.size()) != encoder.input_dim()) {
    throw InvalidArgument("feature_dim: feature has length " + std::to_string(f.size()) +
                          ", encoder expects " + std::to_string(encoder.input_dim()));
  }
  return EncoderForward(encoder, f);
}

PackedCode PackRow(const BipolarCodes& codes, Eigen::Index row) {
  const auto* begin = codes.values.row(row).data();
  return PackedCode::Pack(
      std::span<const std::int8_t>(begin, static_cast<std::size_t>(codes.values.cols())));
}

std::vector<double> ReadNumbers(const ordered_json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string("query json: '") + what + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidArgument(std::string("query json: '") + what + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

ordered_json ReportToJson(const EvalReport& r) {
  ordered_json j;
  j["k"] = r.k;
  j["num_queries"] = r.num_queries;
  j["num_items"] = r.num_items;
  j["map_at_k"] = r.map_at_k;
  j["map_at_k_r"] = ordered_json::array();
  for (const RadiusScore& s : r.map_at_k_r) {
    ordered_json e;
    e["r"] = s.r;
    e["value"] = s.value;
    j["map_at_k_r"].push_back(e);
  }
  return j;
}

}  // namespace

std::uint64_t BasisSeed(const PipelineConfig& config) {
  return StreamSeed(config, "basis");
}

PositionalBasis PipelineBasis(const PipelineConfig& config, int hyper_dim) {
  return NewBasis(BasisSeed(config), hyper_dim);
}

EncoderStage TrainEncoderStage(const FeatureDataset& dataset,
                               const PipelineConfig& config) {
  if (dataset.feature_dim() != config.feature_dim) {
    throw InvalidArgument("feature_dim: dataset has " + std::to_string(dataset.feature_dim()) +
                          ", config has " + std::to_string(config.feature_dim));
  }
  std::vector<std::uint64_t> offsets;
  std::vector<int> labels;
  for (const ImageRecord& im : dataset.images()) {
    for (const ObjectRecord& o : im.objects) {
      if (o.label >= config.num_classes) {
        throw InvalidArgument("num_classes: label " + std::to_string(o.label) +
                              " in image " + std::to_string(im.id) + " is out of range");
      }
      offsets.push_back(o.feature);
      labels.push_back(o.label);
    }
  }
  if (offsets.empty()) throw InvalidArgument("dataset: no objects to train the encoder on");
  Eigen::MatrixXd features(config.feature_dim, static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t n = 0; n < offsets.size(); ++n) {
    const auto v = dataset.Vector(offsets[n]);
    for (int i = 0; i < config.feature_dim; ++i) {
      features(i, static_cast<Eigen::Index>(n)) = v[static_cast<std::size_t>(i)];
    }
  }
  const EncoderParams init =
      EncoderInit(StreamSeed(config, "encoder/init"), config.feature_dim,
                  config.bottleneck_dim, config.hyper_dim, config.num_classes);
  const EncoderTrainConfig train{.lambda_rec = config.lambda_rec,
                                 .learning_rate = config.encoder_learning_rate,
                                 .epochs = config.encoder_epochs,
                                 .batch_size = config.encoder_batch_size,
                                 .seed = StreamSeed(config, "encoder/train")};
  EncoderTrainResult result = EncoderTrain(init, features, labels, train);
  return {std::move(result.params), std::move(result.trace)};
}

SceneRep EncodeImage(const FeatureDataset& dataset, const ImageRecord& image,
                     const EncoderParams& encoder, const PositionalBasis& basis,
                     double w, double eta_glob, std::span<const double> etas) {
  if (!etas.empty() && etas.size() != image.objects.size()) {
    throw InvalidArgument("eta: " + std::to_string(etas.size()) + " values for " +
                          std::to_string(image.objects.size()) + " objects");
  }
  const Hypervector global = Encode(encoder, dataset.VectorAsDouble(image.global_feature));
  std::vector<ObjectPlacement> placements;
  for (std::size_t k = 0; k < image.objects.size(); ++k) {
    const ObjectRecord& o = image.objects[k];
    placements.push_back({Encode(encoder, dataset.VectorAsDouble(o.feature)),
                          std::clamp(o.box.center_x() / image.width, 0.0, 1.0),
                          std::clamp(o.box.center_y() / image.height, 0.0, 1.0),
                          etas.empty() ? 1.0 : etas[k]});
  }
  return ComposeScene(global, placements, eta_glob, basis, w);
}

SceneSet EncodeDataset(const FeatureDataset& dataset,
                       const EncoderParams& encoder,
                       const PositionalBasis& basis, double w,
                       double eta_glob) {
  if (static_cast<int>(basis.dimension()) != encoder.hyper_dim()) {
    throw IncompatibleArtifact({"hyper_dim"});
  }
  if (dataset.feature_dim() != encoder.input_dim()) {
    throw InvalidArgument("feature_dim: dataset has " + std::to_string(dataset.feature_dim()) +
                          ", encoder expects " + std::to_string(encoder.input_dim()));
  }
  SceneSet out;
  out.basis_seed = basis.seed;
  out.length_scale = w;
  out.hyper_dim = static_cast<std::uint32_t>(encoder.hyper_dim());
  out.encoder_fingerprint = EncoderFingerprint(encoder);
  out.flat.resize(static_cast<Eigen::Index>(dataset.images().size()), 2 * encoder.hyper_dim());
  Eigen::Index row = 0;
  for (const ImageRecord& im : dataset.images()) {
    const SceneRep rep = EncodeImage(dataset, im, encoder, basis, w, eta_glob);
    const auto flat = rep.flat();
    for (std::size_t j = 0; j < flat.size(); ++j) out.flat(row, static_cast<Eigen::Index>(j)) = flat[j];
    out.ids.push_back(im.id);
    ++row;
  }
  return out;
}

Eigen::MatrixXd HashInputs(const Eigen::MatrixXd& flat) {
  Eigen::MatrixXd out = flat;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n > 0) out.row(i) /= n;
  }
  return out;
}

HashModel InitialHashModel(const PipelineConfig& config, int input_dim) {
  return HashInit(StreamSeed(config, "hash/init"), config.num_bits, input_dim);
}

HashStage TrainHashStage(const SceneSet& scenes, const PipelineConfig& config,
                         const HashLossWeights& weights) {
  if (scenes.ids.empty()) throw InvalidArgument("scenes: empty scene set");
  const HashTrainConfig train{.weights = weights,
                              .learning_rate = config.hash_learning_rate,
                              .epochs = config.hash_epochs,
                              .batch_size = config.hash_batch_size,
                              .seed = StreamSeed(config, "hash/train")};
  HashTrainResult result =
      HashTrain(InitialHashModel(config, static_cast<int>(scenes.flat.cols())),
                HashInputs(scenes.flat), train);
  return {std::move(result.model), std::move(result.trace)};
}

CodeSet HashScenes(const HashModel& model, const SceneSet& scenes) {
  if (model.input_dim() != scenes.flat.cols()) throw IncompatibleArtifact({"hyper_dim"});
  CodeSet out;
  out.num_bits = model.num_bits();
  out.metadata = {.basis_seed = scenes.basis_seed,
                  .length_scale = scenes.length_scale,
                  .hyper_dim = scenes.hyper_dim,
                  .encoder_fingerprint = scenes.encoder_fingerprint,
                  .hash_fingerprint = HashFingerprint(model)};
  out.ids = scenes.ids;
  if (scenes.ids.empty()) return out;
  const BipolarCodes codes = Binarize(HashForward(model, HashInputs(scenes.flat)));
  for (Eigen::Index i = 0; i < codes.values.rows(); ++i) out.codes.push_back(PackRow(codes, i));
  return out;
}

RetrievalIndex BuildIndex(const CodeSet& codes) {
  std::vector<std::pair<ItemId, PackedCode>> items;
  for (std::size_t i = 0; i < codes.ids.size(); ++i) items.emplace_back(codes.ids[i], codes.codes[i]);
  return RetrievalIndex::Build(std::move(items), codes.num_bits, codes.metadata);
}

void CheckCompatible(const IndexMetadata& expected, int expected_bits,
                     const IndexMetadata& actual, int actual_bits) {
  std::vector<std::string> fields;
  if (expected_bits != actual_bits) fields.push_back("num_bits");
  if (expected.basis_seed != actual.basis_seed) fields.push_back("basis_seed");
  if (expected.length_scale != actual.length_scale) fields.push_back("length_scale");
  if (expected.hyper_dim != actual.hyper_dim) fields.push_back("hyper_dim");
  if (expected.encoder_fingerprint != actual.encoder_fingerprint) {
    fields.push_back("encoder_fingerprint");
  }
  if (expected.hash_fingerprint != actual.hash_fingerprint) fields.push_back("hash_fingerprint");
  if (!fields.empty()) throw IncompatibleArtifact(std::move(fields));
}

QueryScene QuerySceneFromImage(const FeatureDataset& dataset, ItemId id) {
  const ImageRecord& im = dataset.Find(id);
  QueryScene scene;
  scene.global = dataset.VectorAsDouble(im.global_feature);
  for (const ObjectRecord& o : im.objects) {
    scene.objects.push_back({dataset.VectorAsDouble(o.feature),
                             std::clamp(o.box.center_x() / im.width, 0.0, 1.0),
                             std::clamp(o.box.center_y() / im.height, 0.0, 1.0)});
  }
  return scene;
}

QueryScene QuerySceneFromJson(std::string_view json) {
  const ordered_json j = ordered_json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidArgument("query json: not a JSON object");
  if (!j.contains("global")) throw InvalidArgument("query json: missing 'global'");
  QueryScene scene;
  scene.global = ReadNumbers(j["global"], "global");
  if (j.contains("objects")) {
    if (!j["objects"].is_array()) throw InvalidArgument("query json: 'objects' must be an array");
    for (const auto& o : j["objects"]) {
      if (!o.is_object() || !o.contains("feature") || !o.contains("x") || !o.contains("y") ||
          !o["x"].is_number() || !o["y"].is_number()) {
        throw InvalidArgument("query json: each object needs 'feature', 'x' and 'y'");
      }
      scene.objects.push_back({ReadNumbers(o["feature"], "feature"), o["x"].get<double>(),
                               o["y"].get<double>()});
    }
  }
  return scene;
}

std::vector<double> ResolveEtas(const QuerySpec& spec) {
  const std::size_t n = spec.scene.objects.size();
  if (!spec.object_etas.empty()) {
    if (spec.object_etas.size() != n) {
      throw InvalidArgument("eta: " + std::to_string(spec.object_etas.size()) +
                            " values for " + std::to_string(n) + " objects");
    }
    for (const double e : spec.object_etas) {
      if (!(e > 0)) throw InvalidArgument("eta: values must be > 0");
    }
    return spec.object_etas;
  }
  std::vector<double> etas(n, 1.0);
  if (spec.focus) {
    const FocusRegion& f = *spec.focus;
    if (!(f.multiplier > 0)) throw InvalidArgument("focus: multiplier must be > 0");
    for (std::size_t k = 0; k < n; ++k) {
      const QueryObject& o = spec.scene.objects[k];
      if (o.x >= f.x0 && o.x <= f.x1 && o.y >= f.y0 && o.y <= f.y1) etas[k] *= f.multiplier;
    }
  }
  return etas;
}

std::vector<SearchHit> RunQuery(const QueryContext& ctx, const QuerySpec& spec,
                                std::size_t k) {
  if (!ctx.index || !ctx.encoder || !ctx.model || !ctx.basis) {
    throw InvalidArgument("query: incomplete context");
  }
  const EncoderParams& encoder = *ctx.encoder;
  const IndexMetadata expected{.basis_seed = ctx.basis->seed,
                               .length_scale = spec.w,
                               .hyper_dim = static_cast<std::uint32_t>(encoder.hyper_dim()),
                               .encoder_fingerprint = EncoderFingerprint(encoder),
                               .hash_fingerprint = HashFingerprint(*ctx.model)};
  CheckCompatible(expected, ctx.model->num_bits(), ctx.index->metadata(), ctx.index->num_bits());
  if (static_cast<int>(ctx.basis->dimension()) != encoder.hyper_dim() ||
      ctx.model->input_dim() != 2 * encoder.hyper_dim()) {
    throw IncompatibleArtifact({"hyper_dim"});
  }
  if (!(spec.eta_glob > 0)) throw InvalidArgument("eta_glob: must be > 0");

  const std::vector<double> etas = ResolveEtas(spec);
  std::vector<ObjectPlacement> placements;
  for (std::size_t i = 0; i < spec.scene.objects.size(); ++i) {
    const QueryObject& o = spec.scene.objects[i];
    placements.push_back({Encode(encoder, o.feature), o.x, o.y, etas[i]});
  }
  const SceneRep rep = ComposeScene(Encode(encoder, spec.scene.global), placements,
                                    spec.eta_glob, *ctx.basis, spec.w);
  const auto flat = rep.flat();
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(flat.size()));
  for (std::size_t j = 0; j < flat.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = flat[j];
  const BipolarCodes code = Binarize(HashForward(*ctx.model, HashInputs(row)));
  return ctx.index->QueryTopK(PackRow(code, 0), k);
}

EvalReport Evaluate(const RetrievalIndex& index, const CodeSet& queries,
                    const GroundTruth& truth, std::size_t k,
                    std::span<const double> radii) {
  CheckCompatible(index.metadata(), index.num_bits(), queries.metadata, queries.num_bits);
  if (queries.ids.empty()) throw InvalidArgument("eval: no queries");
  if (k < 1) throw InvalidArgument("eval: k must be >= 1");

  AnnotationMap corpus;
  std::vector<LabeledItem> corpus_labels;
  for (const ItemId id : index.ids()) {
    corpus.emplace(id, truth.Get(id));
    corpus_labels.push_back(truth.Labels(id));
  }

  std::vector<RankedQuery> ranked;
  std::vector<SpatialQuery> spatial;
  for (std::size_t q = 0; q < queries.ids.size(); ++q) {
    const ItemId qid = queries.ids[q];
    const LabeledItem qlabels = truth.Labels(qid);
    std::vector<ItemId> ranking;
    for (const SearchHit& hit : index.QueryTopK(queries.codes[q], k)) ranking.push_back(hit.id);
    std::size_t total = 0;
    for (const LabeledItem& item : corpus_labels) total += LabelsOverlap(qlabels, item);
    ranked.push_back({ranking,
                      [&truth, qlabels](ItemId id) { return LabelsOverlap(qlabels, truth.Labels(id)); },
                      total});
    spatial.push_back({std::move(ranking), truth.Get(qid)});
  }

  EvalReport report;
  report.k = k;
  report.num_queries = queries.ids.size();
  report.num_items = index.size();
  report.map_at_k = MapAtK(ranked, k);
  for (const double r : radii) {
    report.map_at_k_r.push_back({r, MapAtKr(spatial, corpus, k, r)});
  }
  return report;
}

std::string EvalReportJson(const EvalReport& report) {
  return ReportToJson(report).dump(2) + "\n";
}

std::string EvalReportTable(const EvalReport& report) {
  std::string out = "queries " + std::to_string(report.num_queries) + ", items " +
                    std::to_string(report.num_items) + "\n";
  out += "metric            value\n";
  char line[64];
  std::snprintf(line, sizeof(line), "mAP@%-13zu %s\n", report.k, Fixed(report.map_at_k).c_str());
  out += line;
  for (const RadiusScore& s : report.map_at_k_r) {
    char name[32];
    std::snprintf(name, sizeof(name), "mAP@%zu_r=%g", report.k, s.r);
    std::snprintf(line, sizeof(line), "%-17s %s\n", name, Fixed(s.value).c_str());
    out += line;
  }
  return out;
}

PreparedCorpus PrepareSynthetic(const PipelineConfig& config) {
  config.Validate();
  PreparedCorpus p;
  p.data = SynthGenerate(SynthConfigFrom(config));
  p.encoder = TrainEncoderStage(p.data.corpus, config).params;
  p.basis = PipelineBasis(config, config.hyper_dim);
  p.corpus = EncodeDataset(p.data.corpus, p.encoder, p.basis, config.length_scale, config.eta_glob);
  p.queries = EncodeDataset(p.data.queries, p.encoder, p.basis, config.length_scale, config.eta_glob);
  return p;
}

EvalReport EvaluateModel(const PreparedCorpus& prepared, const HashModel& model,
                         const PipelineConfig& config) {
  const RetrievalIndex index = BuildIndex(HashScenes(model, prepared.corpus));
  return Evaluate(index, HashScenes(model, prepared.queries), prepared.data.truth,
                  static_cast<std::size_t>(config.eval_k), config.eval_radii);
}

AblationReport Ablate(const PipelineConfig& config,
                      std::span<const std::string> exclusions) {
  for (const std::string& term : exclusions) {
    if (std::find(std::begin(kLossTerms), std::end(kLossTerms), term) == std::end(kLossTerms)) {
      throw InvalidArgument("ablate: unknown loss term '" + term + "'");
    }
  }
  const PreparedCorpus prepared = PrepareSynthetic(config);
  AblationReport report;
  report.rows.push_back(
      {"random hyperplanes",
       EvaluateModel(prepared,
                     InitialHashModel(config, static_cast<int>(prepared.corpus.flat.cols())),
                     config)});
  const HashLossWeights full = config.hash_weights;
  report.rows.push_back(
      {"full", EvaluateModel(prepared, TrainHashStage(prepared.corpus, config, full).model, config)});
  for (const std::string& term : exclusions) {
    HashLossWeights weights = full;
    if (term == "mse") weights.mse = 0;
    if (term == "w") weights.w = 0;
    if (term == "q") weights.q = 0;
    if (term == "u") weights.u = 0;
    if (term == "o") weights.o = 0;
    report.rows.push_back(
        {"without " + term,
         EvaluateModel(prepared, TrainHashStage(prepared.corpus, config, weights).model, config)});
  }
  return report;
}

std::string AblationJson(const AblationReport& report) {
  ordered_json rows = ordered_json::array();
  for (const AblationRow& row : report.rows) {
    ordered_json j;
    j["variant"] = row.name;
    j["report"] = ReportToJson(row.report);
    rows.push_back(j);
  }
  ordered_json j;
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string AblationTable(const AblationReport& report) {
  std::string out;
  if (report.rows.empty()) return out;
  const EvalReport& first = report.rows.front().report;
  char cell[64];
  std::snprintf(cell, sizeof(cell), "%-20s mAP@%-6zu", "variant", first.k);
  out += cell;
  for (const RadiusScore& s : first.map_at_k_r) {
    std::snprintf(cell, sizeof(cell), " r=%-7g", s.r);
    out += cell;
  }
  out += "\n";
  for (const AblationRow& row : report.rows) {
    std::snprintf(cell, sizeof(cell), "%-20s %-10s", row.name.c_str(), Fixed(row.report.map_at_k).c_str());
    out += cell;
    for (const RadiusScore& s : row.report.map_at_k_r) {
      std::snprintf(cell, sizeof(cell), " %-9s", Fixed(s.value).c_str());
      out += cell;
    }
    out += "\n";
  }
  return out;
}

}  // namespace hdhash
