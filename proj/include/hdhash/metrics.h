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

// Retrieval metrics: AP@K / mAP@K and the spatial-aware variant mAP@K_r,
// where a retrieved image counts as relevant only if it holds an object of
// a query object's class within normalized distance r of it.

#ifndef HDHASH_METRICS_H_
#define HDHASH_METRICS_H_

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hdhash/hamming_index.h"

namespace hdhash {

using RelevanceFn = std::function<bool(ItemId)>;

// AP@k = sum over relevant ranks i <= k of precision@i, divided by
// min(k, total_relevant). Returns 0 when total_relevant is 0. Throws
// InvalidArgument on duplicate ids in `ranking` or k < 1.
double AveragePrecision(std::span<const ItemId> ranking,
                        const RelevanceFn& relevant, std::size_t k,
                        std::size_t total_relevant);

struct RankedQuery {
  std::vector<ItemId> ranking;
  RelevanceFn relevant;
  std::size_t total_relevant = 0;
};

double MapAtK(std::span<const RankedQuery> queries, std::size_t k);

struct LabeledItem {
  ItemId id = 0;
  std::vector<int> labels;  // sorted, unique, nonempty
};

// CIFAR-style: the (single) labels are equal.
bool SameLabel(const LabeledItem& a, const LabeledItem& b);
// COCO-style: the label sets intersect.
bool LabelsOverlap(const LabeledItem& a, const LabeledItem& b);

struct AnnotatedObject {
  int label = 0;
  double x = 0;  // pixels
  double y = 0;
};

struct SpatialAnnotation {
  ItemId id = 0;
  std::vector<AnnotatedObject> objects;
  double image_w = 1;
  double image_h = 1;
};

// Same class and (x_a/w_a - x_b/w_b)^2 + (y_a/h_a - y_b/h_b)^2 <= r^2.
bool SpatialMatch(const AnnotatedObject& a, double a_w, double a_h,
                  const AnnotatedObject& b, double b_w, double b_h, double r);

// How object-level matches aggregate into image relevance.
enum class SpatialAggregation {
  kAnyPair,  // at least one (query object, retrieved object) match
};

bool SpatiallyRelevant(const SpatialAnnotation& query,
                       const SpatialAnnotation& candidate, double r,
                       SpatialAggregation policy = SpatialAggregation::kAnyPair);

struct SpatialQuery {
  std::vector<ItemId> ranking;
  SpatialAnnotation query;
};

using AnnotationMap = std::unordered_map<ItemId, SpatialAnnotation>;

// mAP@K_r. The relevant total of each query counts every item of `corpus`.
// Throws InvalidArgument if a ranked id has no annotation.
double MapAtKr(std::span<const SpatialQuery> queries,
               const AnnotationMap& corpus, std::size_t k, double r,
               SpatialAggregation policy = SpatialAggregation::kAnyPair);

}  // namespace hdhash

#endif  // HDHASH_METRICS_H_
