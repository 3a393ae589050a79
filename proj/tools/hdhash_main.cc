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

// hdhash command-line driver.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdhash/binary_io.h"
#include "hdhash/errors.h"
#include "hdhash/pipeline/artifacts.h"
#include "hdhash/pipeline/config.h"
#include "hdhash/pipeline/dataset.h"
#include "hdhash/pipeline/pipeline.h"
#include "hdhash/pipeline/synth.h"

namespace fs = std::filesystem;

namespace hdhash {
namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIncompatible = 3;
constexpr int kExitCorrupt = 4;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::vector<std::string> overrides;

  PipelineConfig Config() const {
    PipelineConfig c;
    if (!config_path.empty()) c = LoadConfig(config_path);
    for (const std::string& o : overrides) SetConfigValue(c, o);
    if (seed) c.seed = *seed;
    c.Validate();
    return c;
  }

  fs::path Out(const std::string& name) const { return fs::path(out_dir) / name; }

  // `value` if given, else out_dir/fallback.
  fs::path Or(const std::string& value, const std::string& fallback) const {
    return value.empty() ? Out(fallback) : fs::path(value);
  }
};

std::string StemName(const fs::path& p) { return p.filename().replace_extension().string(); }

void Print(const std::string& s) { std::fwrite(s.data(), 1, s.size(), stdout); }

FocusRegion ParseFocus(const std::string& text, double multiplier) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("focus: bad number '" + item + "'");
    }
  }
  if (v.size() != 4 || !(v[0] <= v[2] && v[1] <= v[3])) {
    throw InvalidArgument("focus: expected x0,y0,x1,y1 with x0 <= x1 and y0 <= y1");
  }
  return {v[0], v[1], v[2], v[3], multiplier};
}

int Run(int argc, char** argv) {
  CLI::App app{"hdhash: hyperdimensional scene hashing for spatially aware image retrieval"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Config file (key = value lines)");
  app.add_option("--seed", g.seed, "Root seed; overrides the config");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and default inputs");
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus, queries and ground truth");
  synth->callback([&] {
    const PipelineConfig c = g.Config();
    fs::create_directories(g.out_dir);
    const SynthOutput out = SynthGenerate(SynthConfigFrom(c));
    out.corpus.Save(g.Out("corpus"));
    out.queries.Save(g.Out("queries"));
    out.truth.Save(g.Out("truth.txt"));
    WriteFile(g.Out("config.txt"), c.ToText());
    std::printf("corpus %zu images, queries %zu images\n", out.corpus.images().size(),
                out.queries.images().size());
  });

  std::string dataset, encoder_path, output;
  auto* train_enc = app.add_subcommand("train-encoder", "Train the context encoder on object features");
  train_enc->add_option("--dataset", dataset, "Dataset stem (default <out>/corpus)");
  train_enc->add_option("--output", output, "Checkpoint (default <out>/encoder.nhec)");
  train_enc->callback([&] {
    const PipelineConfig c = g.Config();
    const EncoderStage stage = TrainEncoderStage(FeatureDataset::Load(g.Or(dataset, "corpus")), c);
    SaveEncoder(g.Or(output, "encoder.nhec"), stage.params);
    for (std::size_t e = 0; e < stage.trace.size(); ++e) {
      std::printf("epoch %zu loss %.6f class %.6f rec %.6f\n", e + 1, stage.trace[e].total,
                  stage.trace[e].classification, stage.trace[e].reconstruction);
    }
  });

  auto* encode = app.add_subcommand("encode", "Compose scene hypervectors for a dataset");
  encode->add_option("--dataset", dataset, "Dataset stem (default <out>/corpus)");
  encode->add_option("--encoder", encoder_path, "Checkpoint (default <out>/encoder.nhec)");
  encode->add_option("--output", output, "Scene file (default <out>/<dataset name>.scenes)");
  encode->callback([&] {
    const PipelineConfig c = g.Config();
    const fs::path stem = g.Or(dataset, "corpus");
    const EncoderParams enc = LoadEncoder(g.Or(encoder_path, "encoder.nhec"));
    if (enc.hyper_dim() != c.hyper_dim) throw IncompatibleArtifact({"hyper_dim"});
    const SceneSet scenes = EncodeDataset(FeatureDataset::Load(stem), enc,
                                          PipelineBasis(c, enc.hyper_dim()), c.length_scale, c.eta_glob);
    SaveScenes(g.Or(output, StemName(stem) + ".scenes"), scenes);
    std::printf("encoded %zu scenes\n", scenes.ids.size());
  });

  std::string scenes_path, model_path;
  auto* train_hash = app.add_subcommand("train-hash", "Train the hyperplane hash on scenes");
  train_hash->add_option("--scenes", scenes_path, "Scene file (default <out>/corpus.scenes)");
  train_hash->add_option("--output", output, "Model (default <out>/hash.nhhm)");
  train_hash->callback([&] {
    const PipelineConfig c = g.Config();
    const HashStage stage = TrainHashStage(LoadScenes(g.Or(scenes_path, "corpus.scenes")), c, c.hash_weights);
    SaveHashModel(g.Or(output, "hash.nhhm"), stage.model);
    for (std::size_t e = 0; e < stage.trace.size(); ++e) {
      const HashLossBreakdown& l = stage.trace[e];
      std::printf("epoch %zu loss %.6f mse %.6f w %.6f q %.6f u %.6f o %.6f\n", e + 1, l.total,
                  l.mse, l.w, l.q, l.u, l.o);
    }
  });

  auto* hash = app.add_subcommand("hash", "Binarize scenes with a hash model");
  hash->add_option("--scenes", scenes_path, "Scene file (default <out>/corpus.scenes)");
  hash->add_option("--model", model_path, "Model (default <out>/hash.nhhm)");
  hash->add_option("--output", output, "Code file (default <out>/<scenes name>.codes)");
  hash->callback([&] {
    const fs::path in = g.Or(scenes_path, "corpus.scenes");
    const CodeSet codes = HashScenes(LoadHashModel(g.Or(model_path, "hash.nhhm")), LoadScenes(in));
    SaveCodes(g.Or(output, StemName(in) + ".codes"), codes);
    std::printf("hashed %zu scenes to %d bits\n", codes.ids.size(), codes.num_bits);
  });

  std::string codes_path;
  auto* build = app.add_subcommand("build-index", "Pack codes into a search index");
  build->add_option("--codes", codes_path, "Code file (default <out>/corpus.codes)");
  build->add_option("--output", output, "Index (default <out>/index.nhix)");
  build->callback([&] {
    const RetrievalIndex index = BuildIndex(LoadCodes(g.Or(codes_path, "corpus.codes")));
    index.Save(g.Or(output, "index.nhix"));
    std::printf("indexed %zu items\n", index.size());
  });

  std::string index_path, features_json, focus;
  std::optional<std::uint64_t> image_id;
  std::optional<double> eta_glob, w;
  std::vector<double> etas;
  double focus_multiplier = 10.0;
  std::optional<std::size_t> k;
  bool json_out = false;
  auto* query = app.add_subcommand("query", "Conditional retrieval for one query scene");
  query->add_option("--index", index_path, "Index (default <out>/index.nhix)");
  query->add_option("--encoder", encoder_path, "Checkpoint (default <out>/encoder.nhec)");
  query->add_option("--model", model_path, "Hash model (default <out>/hash.nhhm)");
  query->add_option("--dataset", dataset, "Dataset holding --image-id (default <out>/queries)");
  auto* id_opt = query->add_option("--image-id", image_id, "Query with this image's features");
  auto* json_opt = query->add_option("--features", features_json,
                                     "Inline JSON scene, or @path to a JSON file");
  id_opt->excludes(json_opt);
  query->add_option("--eta-glob", eta_glob, "Global weight (default from config)");
  query->add_option("--eta", etas, "Per-object weights; override --focus");
  query->add_option("--focus", focus, "Focus region x0,y0,x1,y1 in normalized coordinates");
  query->add_option("--focus-multiplier", focus_multiplier, "Weight multiplier inside the focus region");
  query->add_option("--w", w, "Length scale (default from config)");
  query->add_option("--k", k, "Results to return (default eval_k)");
  query->add_flag("--json", json_out, "Print JSON instead of text");
  query->callback([&] {
    const PipelineConfig c = g.Config();
    QuerySpec spec;
    if (image_id) {
      spec.scene = QuerySceneFromImage(FeatureDataset::Load(g.Or(dataset, "queries")), *image_id);
    } else if (!features_json.empty()) {
      spec.scene = QuerySceneFromJson(features_json[0] == '@' ? ReadFile(features_json.substr(1))
                                                              : features_json);
    } else {
      throw InvalidArgument("query: need --image-id or --features");
    }
    spec.eta_glob = eta_glob.value_or(c.eta_glob);
    spec.object_etas = etas;
    if (!focus.empty()) spec.focus = ParseFocus(focus, focus_multiplier);
    spec.w = w.value_or(c.length_scale);
    const RetrievalIndex index = RetrievalIndex::Load(g.Or(index_path, "index.nhix"));
    const EncoderParams enc = LoadEncoder(g.Or(encoder_path, "encoder.nhec"));
    const HashModel model = LoadHashModel(g.Or(model_path, "hash.nhhm"));
    const PositionalBasis basis = PipelineBasis(c, enc.hyper_dim());
    const auto hits = RunQuery({&index, &enc, &model, &basis}, spec,
                               k.value_or(static_cast<std::size_t>(c.eval_k)));
    if (json_out) {
      std::string out = "[";
      for (std::size_t i = 0; i < hits.size(); ++i) {
        out += (i ? ",{\"id\":" : "{\"id\":") + std::to_string(hits[i].id) +
               ",\"distance\":" + std::to_string(hits[i].distance) + "}";
      }
      Print(out + "]\n");
    } else {
      for (std::size_t i = 0; i < hits.size(); ++i) {
        std::printf("%zu %llu %d\n", i + 1, static_cast<unsigned long long>(hits[i].id),
                    hits[i].distance);
      }
    }
  });

  std::string queries_path, truth_path;
  std::vector<double> radii;
  auto* eval = app.add_subcommand("eval", "mAP@K and mAP@K_r over a query code set");
  eval->add_option("--index", index_path, "Index (default <out>/index.nhix)");
  eval->add_option("--queries", queries_path, "Query codes (default <out>/queries.codes)");
  eval->add_option("--truth", truth_path, "Ground truth (default <out>/truth.txt)");
  eval->add_option("--k", k, "Cutoff K (default eval_k)");
  eval->add_option("--radius", radii, "Radii r for mAP@K_r (default eval_radii)");
  eval->callback([&] {
    const PipelineConfig c = g.Config();
    const fs::path truth_file = g.Or(truth_path, "truth.txt");
    if (!fs::exists(truth_file)) {
      throw InvalidArgument("eval: missing ground truth " + truth_file.string());
    }
    const EvalReport report = Evaluate(
        RetrievalIndex::Load(g.Or(index_path, "index.nhix")),
        LoadCodes(g.Or(queries_path, "queries.codes")), GroundTruth::Load(truth_file),
        k.value_or(static_cast<std::size_t>(c.eval_k)), radii.empty() ? c.eval_radii : radii);
    WriteFile(g.Out("report.json"), EvalReportJson(report));
    WriteFile(g.Out("report.txt"), EvalReportTable(report));
    Print(EvalReportTable(report));
  });

  std::vector<std::string> exclusions;
  auto* ablate = app.add_subcommand("ablate", "Retrain without each loss term and report mAP");
  ablate->add_option("--exclude", exclusions, "Loss terms to drop one at a time (default all: mse w q u o)");
  ablate->callback([&] {
    const PipelineConfig c = g.Config();
    if (exclusions.empty()) exclusions.assign(std::begin(kLossTerms), std::end(kLossTerms));
    const AblationReport report = Ablate(c, exclusions);
    fs::create_directories(g.out_dir);
    WriteFile(g.Out("ablation.json"), AblationJson(report));
    WriteFile(g.Out("ablation.txt"), AblationTable(report));
    Print(AblationTable(report));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const IncompatibleArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const CorruptFile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace hdhash

int main(int argc, char** argv) { return hdhash::Run(argc, argv); }
