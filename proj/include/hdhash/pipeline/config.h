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

// Pipeline configuration. Text format, one "key = value" per line, '#'
// starts a comment. Unknown keys are rejected. Lists are comma separated.
//
//   hyper_dim = 2000
//   eval_radii = 0.1, 0.2, 0.3, 0.4

#ifndef HDHASH_PIPELINE_CONFIG_H_
#define HDHASH_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hdhash/hyperplane_hash.h"

namespace hdhash {

struct PipelineConfig {
  std::uint64_t seed = 0;

  int hyper_dim = 10000;  // D
  int feature_dim = 64;   // z
  int bottleneck_dim = 16;  // z'
  int num_classes = 8;    // c
  int num_bits = 32;      // L
  double length_scale = 1.0;  // w
  double eta_glob = 1.0;

  double lambda_rec = 1.0;
  double encoder_learning_rate = 1e-3;
  int encoder_epochs = 10;
  int encoder_batch_size = 64;

  HashLossWeights hash_weights;
  double hash_learning_rate = 10.0;
  int hash_epochs = 30;
  int hash_batch_size = 64;

  int synth_images = 512;
  int synth_queries = 64;
  int synth_objects_min = 1;
  int synth_objects_max = 3;
  double synth_feature_noise = 1.0;
  double synth_global_noise = 0.5;
  double synth_image_width = 640;
  double synth_image_height = 480;
  std::string synth_layout = "random";  // or "permuted-duplicates"
  int synth_aligned_copies = 4;
  int synth_permuted_copies = 4;
  double synth_jitter = 0.01;

  int eval_k = 50;
  std::vector<double> eval_radii{0.1, 0.2, 0.3, 0.4};

  // Throws InvalidArgument naming the offending key.
  void Validate() const;
  // Full text form; ParseConfig(ToText()) reproduces the config.
  std::string ToText() const;
};

// Applies the assignments in `text` on top of `base`.
PipelineConfig ParseConfig(std::string_view text, PipelineConfig base = {});
PipelineConfig LoadConfig(const std::filesystem::path& path,
                          PipelineConfig base = {});
// Single "key=value" override, as given on the command line.
void SetConfigValue(PipelineConfig& config, std::string_view assignment);

// Seed of a named random stream under the config's root seed.
std::uint64_t StreamSeed(const PipelineConfig& config, std::string_view name);

}  // namespace hdhash

#endif  // HDHASH_PIPELINE_CONFIG_H_
