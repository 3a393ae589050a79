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

#include "hdhash/metrics.h"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "hdhash/errors.h"

namespace hdhash {

double AveragePrecision(std::span<const ItemId> ranking,
                        const RelevanceFn& relevant, std::size_t k,
                        std::size_t total_relevant) {
  if (k < 1) throw InvalidArgument("AveragePrecision: k must be >= 1");
  std::unordered_set<ItemId> seen;
  seen.reserve(ranking.size());
  for (const ItemId id : ranking) {
    if (!seen.insert(id).second) {
      throw InvalidArgument("AveragePrecision: duplicate id " +
                            std::to_string(id) + " in ranking");
    }
  }
  if (total_relevant == 0) return 0.0;
  const std::size_t depth = std::min(k, ranking.size());
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant(ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(std::min(k, total_relevant));
}

double MapAtK(std::span<const RankedQuery> queries, std::size_t k) {
  if (queries.empty()) throw InvalidArgument("MapAtK: no queries");
  double sum = 0;
  for (const auto& q : queries) {
    sum += AveragePrecision(q.ranking, q.relevant, k, q.total_relevant);
  }
  return sum / static_cast<double>(queries.size());
}

bool SameLabel(const LabeledItem& a, const LabeledItem& b) {
  return !a.labels.empty() && !b.labels.empty() &&
         a.labels.front() == b.labels.front();
}

bool LabelsOverlap(const LabeledItem& a, const LabeledItem& b) {
  auto i = a.labels.begin();
  auto j = b.labels.begin();
  while (i != a.labels.end() && j != b.labels.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

bool SpatialMatch(const AnnotatedObject& a, double a_w, double a_h,
                  const AnnotatedObject& b, double b_w, double b_h, double r) {
  if (!(a_w > 0 && a_h > 0 && b_w > 0 && b_h > 0)) {
    throw InvalidArgument("SpatialMatch: image dimensions must be positive");
  }
  if (!(r > 0)) throw InvalidArgument("SpatialMatch: r must be > 0");
  if (a.label != b.label) return false;
  const double dx = a.x / a_w - b.x / b_w;
  const double dy = a.y / a_h - b.y / b_h;
  return dx * dx + dy * dy <= r * r;
}

bool SpatiallyRelevant(const SpatialAnnotation& query,
                       const SpatialAnnotation& candidate, double r,
                       SpatialAggregation policy) {
  switch (policy) {
    case SpatialAggregation::kAnyPair:
      for (const auto& qo : query.objects) {
        for (const auto& co : candidate.objects) {
          if (SpatialMatch(qo, query.image_w, query.image_h, co,
                           candidate.image_w, candidate.image_h, r)) {
            return true;
          }
        }
      }
      return false;
  }
  return false;
}

double MapAtKr(std::span<const SpatialQuery> queries,
               const AnnotationMap& corpus, std::size_t k, double r,
               SpatialAggregation policy) {
  if (queries.empty()) throw InvalidArgument("MapAtKr: no queries");
  double sum = 0;
  for (const auto& q : queries) {
    for (const ItemId id : q.ranking) {
      if (!corpus.contains(id)) {
        throw InvalidArgument("MapAtKr: ranked id " + std::to_string(id) +
                              " has no annotation");
      }
    }
    std::size_t total = 0;
    for (const auto& [id, ann] : corpus) {
      if (SpatiallyRelevant(q.query, ann, r, policy)) ++total;
    }
    const RelevanceFn relevant = [&](ItemId id) {
      return SpatiallyRelevant(q.query, corpus.at(id), r, policy);
    };
    sum += AveragePrecision(q.ranking, relevant, k, total);
  }
  return sum / static_cast<double>(queries.size());
}

}  // namespace hdhash
