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

// Synthetic scene corpora standing in for detector + backbone output.
//
// Each class has a Gaussian prototype in R^z. An object's feature is its
// prototype plus isotropic noise, its box is centered uniformly in the
// image, and the global feature is the mean object feature plus noise.
//
// The permuted-duplicates layout groups the corpus into copies of base
// scenes whose objects have distinct classes: aligned copies keep every
// object near its base position, permuted copies rotate positions among
// the objects. Queries are fresh aligned copies. Class content cannot
// separate the two kinds of copy; only position can.

#ifndef HDHASH_PIPELINE_SYNTH_H_
#define HDHASH_PIPELINE_SYNTH_H_

#include <cstdint>

#include <Eigen/Dense>

#include "hdhash/pipeline/config.h"
#include "hdhash/pipeline/dataset.h"

namespace hdhash {

enum class SynthLayout { kRandom, kPermutedDuplicates };

struct SynthConfig {
  std::uint64_t seed = 0;
  int images = 512;
  int queries = 64;
  int classes = 8;
  int feature_dim = 64;
  int objects_min = 1;
  int objects_max = 3;
  double feature_noise = 1.0;
  double global_noise = 0.5;
  double image_width = 640;
  double image_height = 480;
  SynthLayout layout = SynthLayout::kRandom;
  int aligned_copies = 4;
  int permuted_copies = 4;
  double jitter = 0.01;  // normalized units
};

// Query image ids start here; corpus ids run from 0.
inline constexpr ItemId kQueryIdBase = 1000000;

struct SynthOutput {
  FeatureDataset corpus;
  FeatureDataset queries;
  GroundTruth truth;          // corpus and queries
  Eigen::MatrixXd prototypes;  // classes x z
};

SynthConfig SynthConfigFrom(const PipelineConfig& config);

// In the permuted layout the corpus holds
// max(1, images / (aligned + permuted)) * (aligned + permuted) images.
SynthOutput SynthGenerate(const SynthConfig& config);

// Objects whose feature is nearer another class prototype than its own.
int SynthLabelDisagreements(const SynthOutput& out);

}  // namespace hdhash

#endif  // HDHASH_PIPELINE_SYNTH_H_
