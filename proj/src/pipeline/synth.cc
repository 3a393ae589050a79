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

#include "hdhash/pipeline/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hdhash/errors.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

struct PlannedObject {
  int label;
  double cx, cy;  // normalized
};

using ScenePlan = std::vector<PlannedObject>;

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

class Builder {
 public:
  Builder(const SynthConfig& c, const Eigen::MatrixXd& protos, Rng& rng)
      : c_(c), protos_(protos), rng_(rng) {}

  void Add(ItemId id, const ScenePlan& plan) {
    ImageRecord im;
    im.id = id;
    im.width = c_.image_width;
    im.height = c_.image_height;
    std::vector<double> mean(static_cast<std::size_t>(c_.feature_dim), 0.0);
    for (const PlannedObject& o : plan) {
      ObjectRecord rec;
      rec.label = o.label;
      const double cx = o.cx * im.width, cy = o.cy * im.height;
      const double size = 0.05 + 0.2 * rng_.Uniform();
      const double hw = std::min({size * im.width / 2, cx, im.width - cx});
      const double hh = std::min({size * im.height / 2, cy, im.height - cy});
      rec.box = {cx - hw, cy - hh, 2 * hw, 2 * hh};
      rec.feature = vectors_;
      for (int i = 0; i < c_.feature_dim; ++i) {
        const double v = protos_(o.label, i) + c_.feature_noise * rng_.Normal();
        blob_.push_back(static_cast<float>(v));
        mean[static_cast<std::size_t>(i)] += v / static_cast<double>(plan.size());
      }
      ++vectors_;
      im.objects.push_back(rec);
    }
    im.global_feature = vectors_;
    for (int i = 0; i < c_.feature_dim; ++i) {
      blob_.push_back(static_cast<float>(mean[static_cast<std::size_t>(i)] +
                                         c_.global_noise * rng_.Normal()));
    }
    ++vectors_;

    SpatialAnnotation a{id, {}, im.width, im.height};
    for (const PlannedObject& o : plan) {
      a.objects.push_back({o.label, o.cx * im.width, o.cy * im.height});
    }
    truth_.emplace(id, std::move(a));
    images_.push_back(std::move(im));
  }

  FeatureDataset Finish() {
    FeatureDataset ds(c_.feature_dim, std::move(images_), std::move(blob_));
    images_.clear();
    blob_.clear();
    vectors_ = 0;
    return ds;
  }

  AnnotationMap& truth() { return truth_; }

 private:
  const SynthConfig& c_;
  const Eigen::MatrixXd& protos_;
  Rng& rng_;
  std::vector<ImageRecord> images_;
  std::vector<float> blob_;
  std::uint64_t vectors_ = 0;
  AnnotationMap truth_;
};

int UniformIn(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(hi - lo + 1)));
}

ScenePlan RandomPlan(const SynthConfig& c, Rng& rng) {
  ScenePlan plan(static_cast<std::size_t>(UniformIn(rng, c.objects_min, c.objects_max)));
  for (PlannedObject& o : plan) {
    o.label = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(c.classes)));
    o.cx = rng.Uniform();
    o.cy = rng.Uniform();
  }
  return plan;
}

// Distinct classes, centers kept apart so a permutation moves every object.
ScenePlan BasePlan(const SynthConfig& c, Rng& rng) {
  const int hi = std::min(std::max(2, c.objects_max), c.classes);
  const int lo = std::min(std::max(2, c.objects_min), hi);
  const int n = UniformIn(rng, lo, hi);
  std::vector<int> labels(static_cast<std::size_t>(c.classes));
  std::iota(labels.begin(), labels.end(), 0);
  Shuffle(std::span<int>(labels), rng);
  ScenePlan plan;
  constexpr double kMinSeparation = 0.3;
  for (int k = 0; k < n; ++k) {
    PlannedObject o{labels[static_cast<std::size_t>(k)], 0, 0};
    for (int attempt = 0; attempt < 1000; ++attempt) {
      o.cx = rng.Uniform();
      o.cy = rng.Uniform();
      const bool clear = std::all_of(plan.begin(), plan.end(), [&](const PlannedObject& p) {
        return std::hypot(p.cx - o.cx, p.cy - o.cy) >= kMinSeparation;
      });
      if (clear) break;
    }
    plan.push_back(o);
  }
  return plan;
}

ScenePlan Copy(const ScenePlan& base, int shift, double jitter, Rng& rng) {
  ScenePlan out = base;
  const std::size_t n = base.size();
  for (std::size_t k = 0; k < n; ++k) {
    const PlannedObject& at = base[(k + static_cast<std::size_t>(shift)) % n];
    out[k].cx = Clamp01(at.cx + jitter * rng.Normal());
    out[k].cy = Clamp01(at.cy + jitter * rng.Normal());
  }
  return out;
}

}  // namespace

SynthConfig SynthConfigFrom(const PipelineConfig& p) {
  SynthConfig c;
  c.seed = StreamSeed(p, "synth");
  c.images = p.synth_images;
  c.queries = p.synth_queries;
  c.classes = p.num_classes;
  c.feature_dim = p.feature_dim;
  c.objects_min = p.synth_objects_min;
  c.objects_max = p.synth_objects_max;
  c.feature_noise = p.synth_feature_noise;
  c.global_noise = p.synth_global_noise;
  c.image_width = p.synth_image_width;
  c.image_height = p.synth_image_height;
  c.layout = p.synth_layout == "permuted-duplicates" ? SynthLayout::kPermutedDuplicates
                                                     : SynthLayout::kRandom;
  c.aligned_copies = p.synth_aligned_copies;
  c.permuted_copies = p.synth_permuted_copies;
  c.jitter = p.synth_jitter;
  return c;
}

SynthOutput SynthGenerate(const SynthConfig& c) {
  if (c.classes < 2) throw InvalidArgument("synth: need at least 2 classes");
  if (c.feature_dim < 8) throw InvalidArgument("synth: need feature_dim >= 8");
  if (c.images < 1 || c.queries < 1) throw InvalidArgument("synth: need images, queries >= 1");
  if (c.objects_min < 0 || c.objects_max < c.objects_min) {
    throw InvalidArgument("synth: need 0 <= objects_min <= objects_max");
  }
  if (!(c.feature_noise >= 0 && c.global_noise >= 0 && c.jitter >= 0)) {
    throw InvalidArgument("synth: noise scales must be >= 0");
  }
  if (!(c.image_width > 0 && c.image_height > 0)) {
    throw InvalidArgument("synth: image size must be positive");
  }
  if (c.layout == SynthLayout::kPermutedDuplicates &&
      (c.aligned_copies < 1 || c.permuted_copies < 0)) {
    throw InvalidArgument("synth: need aligned_copies >= 1, permuted_copies >= 0");
  }

  Rng rng(c.seed);
  SynthOutput out;
  out.prototypes.resize(c.classes, c.feature_dim);
  for (Eigen::Index i = 0; i < out.prototypes.size(); ++i) {
    out.prototypes.data()[i] = rng.Normal();
  }

  std::vector<ScenePlan> corpus, queries;
  if (c.layout == SynthLayout::kRandom) {
    for (int i = 0; i < c.images; ++i) corpus.push_back(RandomPlan(c, rng));
    for (int i = 0; i < c.queries; ++i) queries.push_back(RandomPlan(c, rng));
  } else {
    const int per_base = c.aligned_copies + c.permuted_copies;
    const int bases = std::max(1, c.images / per_base);
    std::vector<ScenePlan> base_plans;
    for (int b = 0; b < bases; ++b) {
      base_plans.push_back(BasePlan(c, rng));
      for (int k = 0; k < c.aligned_copies; ++k) {
        corpus.push_back(Copy(base_plans.back(), 0, c.jitter, rng));
      }
      for (int k = 0; k < c.permuted_copies; ++k) {
        corpus.push_back(Copy(base_plans.back(), 1 + k % (static_cast<int>(base_plans.back().size()) - 1),
                              c.jitter, rng));
      }
    }
    for (int q = 0; q < c.queries; ++q) {
      queries.push_back(Copy(base_plans[static_cast<std::size_t>(q % bases)], 0, c.jitter, rng));
    }
  }
  // Ids carry no information about how a scene was made.
  Shuffle(std::span<ScenePlan>(corpus), rng);

  Builder builder(c, out.prototypes, rng);
  for (std::size_t i = 0; i < corpus.size(); ++i) builder.Add(i, corpus[i]);
  out.corpus = builder.Finish();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    builder.Add(kQueryIdBase + i, queries[i]);
  }
  out.queries = builder.Finish();
  out.truth = GroundTruth(std::move(builder.truth()));
  return out;
}

int SynthLabelDisagreements(const SynthOutput& out) {
  int bad = 0;
  for (const FeatureDataset* ds : {&out.corpus, &out.queries}) {
    for (const ImageRecord& im : ds->images()) {
      for (const ObjectRecord& o : im.objects) {
        const auto f = ds->Vector(o.feature);
        Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
        for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
        Eigen::Index nearest = 0;
        (out.prototypes.rowwise() - v.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
        bad += nearest != o.label;
      }
    }
  }
  return bad;
}

}  // namespace hdhash
