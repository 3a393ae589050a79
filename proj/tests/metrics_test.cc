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
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "hdhash/errors.h"
#include "hdhash/random.h"
#include "oracles.h"

namespace hdhash {
namespace {

using oracle::Ap;

RelevanceFn FromVector(const std::vector<int>& rel) {
  return [rel](ItemId id) { return rel[static_cast<std::size_t>(id)] != 0; };
}

std::vector<ItemId> Iota(std::size_t n) {
  std::vector<ItemId> v(n);
  std::iota(v.begin(), v.end(), ItemId{0});
  return v;
}

TEST(AveragePrecision, SpotValues) {
  const auto ranking = Iota(3);
  EXPECT_NEAR(AveragePrecision(ranking, FromVector({1, 0, 1}), 3, 2),
              (1.0 + 2.0 / 3) / 2, 1e-15);
  EXPECT_EQ(AveragePrecision(ranking, FromVector({1, 1, 1}), 3, 3), 1.0);
  EXPECT_EQ(AveragePrecision(ranking, FromVector({0, 0, 0}), 3, 0), 0.0);
  EXPECT_THROW(AveragePrecision(std::vector<ItemId>{1, 1}, FromVector({0, 1}), 2, 1),
               InvalidArgument);
  EXPECT_THROW(AveragePrecision(ranking, FromVector({1, 0, 1}), 0, 2),
               InvalidArgument);
}

TEST(AveragePrecision, ExhaustiveRelevancePatterns) {
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto ranking = Iota(n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> rel(n);
      for (std::size_t i = 0; i < n; ++i) rel[i] = (mask >> i) & 1u;
      const std::size_t present = static_cast<std::size_t>(std::popcount(mask));
      for (std::size_t k = 1; k <= n + 1; ++k) {
        for (const std::size_t total : {present, present + 3}) {
          const double ap = AveragePrecision(ranking, FromVector(rel), k, total);
          ASSERT_NEAR(ap, Ap(rel, k, total), 1e-12);
          ASSERT_GE(ap, 0.0);
          ASSERT_LE(ap, 1.0);
        }
      }
    }
  }
}

TEST(AveragePrecision, PromotingRelevantNeverHurts) {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    std::vector<int> rel(20);
    for (auto& r : rel) r = static_cast<int>(rng.UniformInt(2));
    const std::size_t total = static_cast<std::size_t>(std::count(rel.begin(), rel.end(), 1));
    for (std::size_t i = 1; i < rel.size(); ++i) {
      if (!rel[i] || rel[i - 1]) continue;
      std::vector<int> promoted = rel;
      std::swap(promoted[i], promoted[i - 1]);
      EXPECT_GE(Ap(promoted, 10, total) + 1e-15, Ap(rel, 10, total));
      EXPECT_GE(AveragePrecision(Iota(20), FromVector(promoted), 10, total),
                AveragePrecision(Iota(20), FromVector(rel), 10, total));
    }
  }
}

TEST(MapAtK, MeanOfQueries) {
  std::vector<RankedQuery> q{{Iota(2), FromVector({1, 1}), 2},
                             {Iota(2), FromVector({0, 0}), 0}};
  EXPECT_EQ(MapAtK(q, 2), 0.5);
  EXPECT_EQ(MapAtK(std::span(q).first(1), 2), 1.0);
  EXPECT_THROW(MapAtK({}, 2), InvalidArgument);

  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<RankedQuery> queries;
    double oracle = 0;
    const int nq = 1 + static_cast<int>(rng.UniformInt(5));
    for (int i = 0; i < nq; ++i) {
      std::vector<int> rel(20);
      for (auto& r : rel) r = static_cast<int>(rng.UniformInt(3) == 0);
      const std::size_t total =
          static_cast<std::size_t>(std::count(rel.begin(), rel.end(), 1)) + rng.UniformInt(3);
      oracle += Ap(rel, 8, total);
      queries.push_back({Iota(20), FromVector(rel), total});
    }
    EXPECT_NEAR(MapAtK(queries, 8), oracle / nq, 1e-12);
  }
}

TEST(LabelPredicates, SingleAndMultiLabel) {
  EXPECT_TRUE(SameLabel({1, {3}}, {2, {3}}));
  EXPECT_FALSE(SameLabel({1, {3}}, {2, {4}}));
  EXPECT_TRUE(LabelsOverlap({1, {1, 3, 5}}, {2, {0, 5}}));
  EXPECT_FALSE(LabelsOverlap({1, {1, 3}}, {2, {0, 2}}));
}

TEST(SpatialMatch, BoundaryAndGates) {
  const AnnotatedObject a{2, 30, 40};
  // Normalized (0.3, 0.4) vs (0.0, 0.0): distance exactly 0.5.
  EXPECT_TRUE(SpatialMatch(a, 100, 100, {2, 0, 0}, 50, 80, 0.5));
  EXPECT_FALSE(SpatialMatch(a, 100, 100, {2, 0, 0}, 50, 80, 0.49));
  EXPECT_TRUE(SpatialMatch(a, 100, 100, {2, 60, 80}, 200, 200, 1e-9));
  EXPECT_FALSE(SpatialMatch(a, 100, 100, {3, 30, 40}, 100, 100, 1.0));
  EXPECT_EQ(SpatialMatch(a, 100, 100, {2, 10, 5}, 40, 20, 0.3),
            SpatialMatch({2, 10, 5}, 40, 20, a, 100, 100, 0.3));
  EXPECT_THROW(SpatialMatch(a, 0, 100, a, 100, 100, 0.1), InvalidArgument);
  EXPECT_THROW(SpatialMatch(a, 100, 100, a, 100, 100, 0.0), InvalidArgument);
}

SpatialAnnotation RandomAnnotation(Rng& rng, ItemId id, int classes) {
  SpatialAnnotation a;
  a.id = id;
  a.image_w = 50 + static_cast<double>(rng.UniformInt(200));
  a.image_h = 50 + static_cast<double>(rng.UniformInt(200));
  const int n = 1 + static_cast<int>(rng.UniformInt(3));
  for (int i = 0; i < n; ++i) {
    a.objects.push_back({static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(classes))),
                         rng.Uniform() * a.image_w, rng.Uniform() * a.image_h});
  }
  return a;
}

struct SpatialInstance {
  AnnotationMap corpus;
  std::vector<SpatialQuery> queries;
};

SpatialInstance RandomSpatialInstance(Rng& rng, int items, int classes) {
  SpatialInstance inst;
  for (int i = 0; i < items; ++i) {
    inst.corpus[static_cast<ItemId>(i)] = RandomAnnotation(rng, static_cast<ItemId>(i), classes);
  }
  for (int q = 0; q < 4; ++q) {
    SpatialQuery sq;
    sq.query = RandomAnnotation(rng, 1000 + static_cast<ItemId>(q), classes);
    sq.ranking = Iota(static_cast<std::size_t>(items));
    Shuffle(std::span<ItemId>(sq.ranking), rng);
    inst.queries.push_back(std::move(sq));
  }
  return inst;
}

double OracleMapKr(const SpatialInstance& inst, std::size_t k, double r) {
  double sum = 0;
  for (const auto& q : inst.queries) {
    std::vector<int> rel;
    for (const ItemId id : q.ranking) {
      rel.push_back(oracle::Spatial(q.query, inst.corpus.at(id), r));
    }
    std::size_t total = 0;
    for (const auto& [id, ann] : inst.corpus) total += oracle::Spatial(q.query, ann, r);
    sum += Ap(rel, k, total);
  }
  return sum / static_cast<double>(inst.queries.size());
}

TEST(MapAtKr, MatchesPairwiseOracle) {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const int items = 1 + static_cast<int>(rng.UniformInt(20));
    const SpatialInstance inst = RandomSpatialInstance(rng, items, 3);
    for (const double r : {0.05, 0.1, 0.2, 0.3, 0.4, 2.0}) {
      for (const std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{20}}) {
        ASSERT_NEAR(MapAtKr(inst.queries, inst.corpus, k, r), OracleMapKr(inst, k, r),
                    1e-12);
      }
    }
  }
}

TEST(SpatiallyRelevant, NestedInRadius) {
  Rng rng(8);
  for (int t = 0; t < 2000; ++t) {
    const SpatialAnnotation a = RandomAnnotation(rng, 0, 2);
    const SpatialAnnotation b = RandomAnnotation(rng, 1, 2);
    bool prev = false;
    for (const double r : {0.1, 0.2, 0.3, 0.4}) {
      const bool now = SpatiallyRelevant(a, b, r);
      EXPECT_TRUE(now || !prev);
      prev = now;
    }
  }
}

// With at least k relevant items at the smallest radius the normaliser is k
// for every radius, and growing relevance sets can only add precision terms.
TEST(MapAtKr, MonotoneInRadiusWhenRelevantCoversK) {
  constexpr std::size_t kK = 5;
  Rng rng(8);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    SpatialInstance inst = RandomSpatialInstance(rng, 200, 2);
    std::erase_if(inst.queries, [&](const SpatialQuery& q) {
      std::size_t total = 0;
      for (const auto& [id, ann] : inst.corpus) total += oracle::Spatial(q.query, ann, 0.1);
      return total < kK;
    });
    if (inst.queries.empty()) continue;
    ++checked;
    double prev = 0;
    for (const double r : {0.1, 0.2, 0.3, 0.4}) {
      const double v = MapAtKr(inst.queries, inst.corpus, kK, r);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
  EXPECT_GT(checked, 50);
}

// Without that precondition the min(k, total) normaliser can make the score
// drop: a relevant item that appears only at the larger radius and ranks
// beyond k raises the denominator alone.
TEST(MapAtKr, CanDropWhenRelevantBelowK) {
  SpatialAnnotation q{100, {{0, 50, 50}}, 100, 100};
  AnnotationMap corpus;
  corpus[0] = {0, {{0, 50, 50}}, 100, 100};  // distance 0
  corpus[1] = {1, {{1, 50, 50}}, 100, 100};  // wrong class
  corpus[2] = {2, {{0, 80, 50}}, 100, 100};  // distance 0.3
  const std::vector<SpatialQuery> queries{{{0, 1, 2}, q}};
  EXPECT_EQ(MapAtKr(queries, corpus, 2, 0.1), 1.0);
  EXPECT_EQ(MapAtKr(queries, corpus, 2, 0.4), 0.5);
}

TEST(MapAtKr, LargeRadiusIsClassOverlap) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const SpatialInstance inst = RandomSpatialInstance(rng, 15, 4);
    auto labels_of = [](const SpatialAnnotation& a) {
      LabeledItem item{a.id, {}};
      for (const auto& o : a.objects) item.labels.push_back(o.label);
      std::sort(item.labels.begin(), item.labels.end());
      item.labels.erase(std::unique(item.labels.begin(), item.labels.end()),
                        item.labels.end());
      return item;
    };
    std::vector<RankedQuery> class_queries;
    for (const auto& q : inst.queries) {
      const LabeledItem ql = labels_of(q.query);
      std::size_t total = 0;
      for (const auto& [id, ann] : inst.corpus) total += LabelsOverlap(ql, labels_of(ann));
      const AnnotationMap* corpus = &inst.corpus;
      class_queries.push_back(
          {q.ranking,
           [ql, corpus, labels_of](ItemId id) {
             return LabelsOverlap(ql, labels_of(corpus->at(id)));
           },
           total});
    }
    EXPECT_NEAR(MapAtKr(inst.queries, inst.corpus, 10, std::sqrt(2.0)),
                MapAtK(class_queries, 10), 1e-12);
  }
}

TEST(MapAtKr, CopiesScoreOneAndMissingAnnotationThrows) {
  Rng rng(10);
  const SpatialAnnotation q = RandomAnnotation(rng, 99, 3);
  AnnotationMap corpus;
  for (ItemId i = 0; i < 5; ++i) {
    corpus[i] = q;
    corpus[i].id = i;
  }
  const std::vector<SpatialQuery> queries{{Iota(5), q}};
  EXPECT_EQ(MapAtKr(queries, corpus, 5, 0.01), 1.0);
  const std::vector<SpatialQuery> bad{{{0, 7}, q}};
  EXPECT_THROW(MapAtKr(bad, corpus, 5, 0.1), InvalidArgument);
}

}  // namespace
}  // namespace hdhash
