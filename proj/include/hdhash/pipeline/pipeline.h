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

// End-to-end stages: encoder training, scene encoding, hashing, indexing,
// conditional queries, evaluation and the loss-term ablation.

#ifndef HDHASH_PIPELINE_PIPELINE_H_
#define HDHASH_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hdhash/context_encoder.h"
#include "hdhash/hamming_index.h"
#include "hdhash/hyperplane_hash.h"
#include "hdhash/pipeline/artifacts.h"
#include "hdhash/pipeline/config.h"
#include "hdhash/pipeline/dataset.h"
#include "hdhash/pipeline/synth.h"
#include "hdhash/spatial.h"

namespace hdhash {

std::uint64_t BasisSeed(const PipelineConfig& config);
PositionalBasis PipelineBasis(const PipelineConfig& config, int hyper_dim);

struct EncoderStage {
  EncoderParams params;
  std::vector<EncoderLoss> trace;
};

// Trains on every object feature of the dataset with its pseudo-label.
EncoderStage TrainEncoderStage(const FeatureDataset& dataset,
                               const PipelineConfig& config);

// One image's scene. `etas` empty means 1 for every object.
SceneRep EncodeImage(const FeatureDataset& dataset, const ImageRecord& image,
                     const EncoderParams& encoder, const PositionalBasis& basis,
                     double w, double eta_glob, std::span<const double> etas = {});

SceneSet EncodeDataset(const FeatureDataset& dataset,
                       const EncoderParams& encoder,
                       const PositionalBasis& basis, double w,
                       double eta_glob = 1.0);

// Flattened scenes scaled to unit row norm before hashing.
Eigen::MatrixXd HashInputs(const Eigen::MatrixXd& flat);

HashModel InitialHashModel(const PipelineConfig& config, int input_dim);

struct HashStage {
  HashModel model;
  std::vector<HashLossBreakdown> trace;
};

HashStage TrainHashStage(const SceneSet& scenes, const PipelineConfig& config,
                         const HashLossWeights& weights);

// Throws IncompatibleArtifact if the model width does not match the scenes.
CodeSet HashScenes(const HashModel& model, const SceneSet& scenes);
RetrievalIndex BuildIndex(const CodeSet& codes);

// Lists every differing metadata field ("num_bits", "basis_seed",
// "length_scale", "hyper_dim", "encoder_fingerprint", "hash_fingerprint")
// and throws IncompatibleArtifact if any.
void CheckCompatible(const IndexMetadata& expected, int expected_bits,
                     const IndexMetadata& actual, int actual_bits);

struct QueryObject {
  std::vector<double> feature;
  double x = 0;  // normalized center
  double y = 0;
};

struct QueryScene {
  std::vector<double> global;
  std::vector<QueryObject> objects;
};

struct FocusRegion {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;  // normalized, inclusive
  double multiplier = 1;
};

struct QuerySpec {
  QueryScene scene;
  double eta_glob = 1;
  std::vector<double> object_etas;  // overrides the focus region if nonempty
  std::optional<FocusRegion> focus;
  double w = 1;
};

QueryScene QuerySceneFromImage(const FeatureDataset& dataset, ItemId id);
// {"global": [...], "objects": [{"feature": [...], "x": 0.2, "y": 0.7}]}
QueryScene QuerySceneFromJson(std::string_view json);

std::vector<double> ResolveEtas(const QuerySpec& spec);

struct QueryContext {
  const RetrievalIndex* index = nullptr;
  const EncoderParams* encoder = nullptr;
  const HashModel* model = nullptr;
  const PositionalBasis* basis = nullptr;
};

std::vector<SearchHit> RunQuery(const QueryContext& context,
                                const QuerySpec& spec, std::size_t k);

struct RadiusScore {
  double r = 0;
  double value = 0;
};

struct EvalReport {
  std::size_t k = 0;
  std::size_t num_queries = 0;
  std::size_t num_items = 0;
  double map_at_k = 0;
  std::vector<RadiusScore> map_at_k_r;
};

// Class relevance is label-set overlap; spatial relevance is any matching
// object pair within r. Ground truth must cover every query and item.
EvalReport Evaluate(const RetrievalIndex& index, const CodeSet& queries,
                    const GroundTruth& truth, std::size_t k,
                    std::span<const double> radii);

std::string EvalReportJson(const EvalReport& report);
std::string EvalReportTable(const EvalReport& report);

// Synthetic corpus taken through encoder training and scene encoding.
struct PreparedCorpus {
  SynthOutput data;
  EncoderParams encoder;
  PositionalBasis basis;
  SceneSet corpus;
  SceneSet queries;
};

PreparedCorpus PrepareSynthetic(const PipelineConfig& config);

// Hashes, indexes and evaluates a prepared corpus with `model`.
EvalReport EvaluateModel(const PreparedCorpus& prepared, const HashModel& model,
                         const PipelineConfig& config);

struct AblationRow {
  std::string name;
  EvalReport report;
};

struct AblationReport {
  std::vector<AblationRow> rows;
};

// Loss-term names accepted in `exclusions`: mse, w, q, u, o.
inline constexpr std::string_view kLossTerms[] = {"mse", "w", "q", "u", "o"};

// Rows: untrained random hyperplanes, the full loss, then one retrained
// variant per excluded term.
AblationReport Ablate(const PipelineConfig& config,
                      std::span<const std::string> exclusions);

std::string AblationJson(const AblationReport& report);
std::string AblationTable(const AblationReport& report);

}  // namespace hdhash

#endif  // HDHASH_PIPELINE_PIPELINE_H_
