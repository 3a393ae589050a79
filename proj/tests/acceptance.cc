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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. argv[1], when given, is the hdhash CLI binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "hdhash/binary_io.h"
#include "hdhash/context_encoder.h"
#include "hdhash/hamming_index.h"
#include "hdhash/hdc.h"
#include "hdhash/hyperplane_hash.h"
#include "hdhash/metrics.h"
#include "hdhash/pipeline/pipeline.h"
#include "hdhash/random.h"
#include "hdhash/spatial.h"
#include "oracles.h"

namespace hdhash {
namespace {

namespace fs = std::filesystem;
using Matrix = Eigen::MatrixXd;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double Median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Matrix RandomMatrix(Rng& rng, int rows, int cols, double scale) {
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = scale * rng.Normal();
  }
  return out;
}

RelaxedCodes Codes(std::initializer_list<std::initializer_list<double>> rows) {
  RelaxedCodes c;
  c.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.begin()->size()));
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const double v : row) c.values(i, j++) = v;
    ++i;
  }
  return c;
}

// 1
Outcome SpatialKernel() {
  constexpr int kDim = 10000;
  const double tol = 3.0 / std::sqrt(kDim);
  const PositionalBasis basis = NewBasis(101, kDim);
  const double x0 = 0.3, y0 = 0.6;
  double worst = 0;
  for (const double w : {0.1, 1.0, 10.0}) {
    const PhaseVector origin = EncodePosition(basis, x0, y0, w);
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        const double dx = a * w * 0.75, dy = b * w * 0.75;
        const double got =
            CosineSimilarity(origin, EncodePosition(basis, x0 + dx, y0 + dy, w));
        const double want = std::exp(-(dx * dx + dy * dy) / (2 * w * w));
        worst = std::max(worst, std::abs(got - want));
      }
    }
  }
  return {worst <= tol, Fmt("max |err| %.4f over 75 points, tol %.4f", worst, tol)};
}

// 2
Outcome BindingPreservesSimilarity() {
  constexpr int kDim = 1000;
  Rng rng(202);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> angles(kDim), h1(kDim), h2(kDim);
    const double mix = rng.Uniform();
    for (int j = 0; j < kDim; ++j) {
      angles[j] = 2 * std::numbers::pi * rng.Uniform();
      h1[j] = rng.Normal();
      h2[j] = mix * h1[j] + (1 - mix) * rng.Normal();
    }
    const PhaseVector p = PhaseVector::FromAngles(angles);
    const Hypervector a(h1), b(h2);
    double got, want;
    if (t % 2 == 0) {
      got = CosineSimilarity(Bind(p, a), Bind(p, b));
      want = CosineSimilarity(a, b);
    } else {
      // Complex operands: bind a second phase vector first.
      std::vector<double> more(kDim);
      for (double& v : more) v = 2 * std::numbers::pi * rng.Uniform();
      const PhaseVector q = PhaseVector::FromAngles(more);
      const ComplexHypervector ca = Bind(q, a);
      const ComplexHypervector cb = Bundle(Bind(q, b), ComplexHypervector::FromReal(a));
      got = CosineSimilarity(Bind(p, ca), Bind(p, cb));
      want = CosineSimilarity(ca, cb);
    }
    worst = std::max(worst, std::abs(got - want));
  }
  return {worst <= 1e-9, Fmt("max |delta diff| %.2e over 1000 triples", worst)};
}

// 3
Outcome HyperplaneRounding() {
  constexpr int kBits = 64, kDim = 256, kPairs = 200;
  Rng rng(303);
  double worst = 0, pair_mae = 0;
  int n = 0;
  for (const double theta : {0.2, 0.6, 1.0, 1.5, 2.2, 2.9}) {
    double sum = 0;
    for (int p = 0; p < kPairs; ++p) {
      const HashModel model = HashInit(5000 + static_cast<std::uint64_t>(n), kBits, kDim);
      Eigen::VectorXd a = RandomMatrix(rng, kDim, 1, 1.0);
      Eigen::VectorXd b = RandomMatrix(rng, kDim, 1, 1.0);
      a.normalize();
      b -= b.dot(a) * a;
      b.normalize();
      Matrix pair(2, kDim);
      pair.row(0) = a.transpose();
      pair.row(1) = (std::cos(theta) * a + std::sin(theta) * b).transpose();
      const BipolarCodes codes = Binarize(HashForward(model, pair));
      int ham = 0;
      for (int l = 0; l < kBits; ++l) ham += codes.values(0, l) != codes.values(1, l);
      const double frac = static_cast<double>(ham) / kBits;
      sum += frac;
      pair_mae += std::abs(frac - theta / std::numbers::pi);
      ++n;
    }
    worst = std::max(worst, std::abs(sum / kPairs - theta / std::numbers::pi));
  }
  return {worst <= 0.05,
          Fmt("max per-angle |mean - theta/pi| %.4f (6 angles x 200 pairs, L=64); "
              "per-pair MAE %.4f reported",
              worst, pair_mae / n)};
}

// Central differences over every parameter entry; returns the worst
// |a - n| / max(|a|, |n|, 1e-6).
double WorstRelError(const std::vector<std::pair<double*, double>>& entries,
                     const std::function<double()>& loss) {
  constexpr double kStep = 1e-5;
  double worst = 0;
  for (const auto& [param, analytic] : entries) {
    const double saved = *param;
    *param = saved + kStep;
    const double up = loss();
    *param = saved - kStep;
    const double down = loss();
    *param = saved;
    const double numeric = (up - down) / (2 * kStep);
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic) / scale);
  }
  return worst;
}

template <typename Block>
void AddEntries(std::vector<std::pair<double*, double>>& out, Block& block,
                const Block& grad) {
  for (Eigen::Index i = 0; i < block.size(); ++i) {
    out.emplace_back(block.data() + i, grad.data()[i]);
  }
}

// 4
Outcome GradientCheck() {
  double enc_worst = 0;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    Rng rng(400 + trial);
    EncoderParams p = EncoderInit(400 + trial, 6, 3, 10, 3);
    for (auto* v : {&p.ext_bias, &p.gen_bias, &p.rec_bias}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = 0.3 * rng.Normal();
    }
    const Matrix f = RandomMatrix(rng, 6, 5, 1.0);
    std::vector<int> labels;
    for (int k = 0; k < 5; ++k) labels.push_back(static_cast<int>(rng.UniformInt(3)));
    const EncoderParams g = EncoderGrad(p, f, labels, 0.7).grad;
    std::vector<std::pair<double*, double>> entries;
    AddEntries(entries, p.ext_weight, g.ext_weight);
    AddEntries(entries, p.ext_bias, g.ext_bias);
    AddEntries(entries, p.gen_weight, g.gen_weight);
    AddEntries(entries, p.gen_bias, g.gen_bias);
    AddEntries(entries, p.rec_weight, g.rec_weight);
    AddEntries(entries, p.rec_bias, g.rec_bias);
    AddEntries(entries, p.classes, g.classes);
    enc_worst = std::max(enc_worst, WorstRelError(entries, [&] {
                           return oracle::EncoderLoss(p, f, labels, 0.7);
                         }));
  }

  const char* names[] = {"mse", "w", "q", "u", "o"};
  const HashLossWeights one_hot[] = {
      {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}};
  double term_worst[5] = {};
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    Rng rng(500 + trial);
    const Matrix h = RandomMatrix(rng, 8, 20, 1.0 / std::sqrt(20.0));
    HashModel model = HashInit(600 + trial, 4, 20);
    model.bias = RandomMatrix(rng, 4, 1, 0.2);
    // The selector is a stop-gradient: freeze it at the current codes.
    const std::vector<int> raw = oracle::Selector(
        oracle::Cosines(h), oracle::CodeSim(oracle::HashForward(model, h)));
    const OrderSelector frozen = oracle::ToSelector(raw, 8);
    for (int t = 0; t < 5; ++t) {
      const HashGradient g = HashGrad(model, h, one_hot[t], frozen);
      std::vector<std::pair<double*, double>> entries;
      AddEntries(entries, model.hyperplanes, g.hyperplanes);
      AddEntries(entries, model.bias, g.bias);
      term_worst[t] = std::max(term_worst[t], WorstRelError(entries, [&] {
        return oracle::HashLoss(h, oracle::HashForward(model, h), raw).Total(one_hot[t]);
      }));
    }
  }
  bool pass = enc_worst <= 1e-4;
  std::string detail = Fmt("encoder %.1e", enc_worst);
  for (int t = 0; t < 5; ++t) {
    pass = pass && term_worst[t] <= 1e-4;
    detail += Fmt(", L_%s %.1e", names[t], term_worst[t]);
  }
  return {pass, detail + " (worst relative error, 10 instances each)"};
}

// 5
Outcome ZeroLossAndSpotValues() {
  std::vector<std::string> bad;
  auto expect = [&](const char* what, double got, double want) {
    if (!(std::abs(got - want) <= 1e-12)) bad.push_back(Fmt("%s=%.17g", what, got));
  };
  // Zero cases.
  expect("L_w(bipolar)", LossW(Codes({{1, 1, -1, 1}, {-1, -1, 1, -1}})), 0);
  expect("L_u(balanced)", LossU(Codes({{-1, -1, 1, 1}, {1, -1, 1, -1}})), 0);
  expect("L_q(bipolar)", LossQ(Codes({{1, -1}, {-1, 1}})), 0);
  Matrix h(3, 4);
  h << 1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1, 1;
  expect("L_o(codes=scenes)", LossO(h, RelaxedCodes{h}), 0);
  // s = 0.5 off the diagonal contributes (1.5 * 0.5)^2 = 0.5625 per pair.
  const RelaxedCodes half = Codes({{1, 1, 1, 1}, {1, 1, 1, -1}});
  expect("L_w(s=0.5)*M^2", 4 * LossW(half), 2 * 0.5625);
  expect("L_w(s=0)*M^2", 4 * LossW(Codes({{1, 1}, {1, -1}})), 2.0);
  expect("L_u(all ones)", LossU(Codes({{1, 1, 1, 1}})), 16.0);
  expect("L_q(0.5)", LossQ(Codes({{0.5}})), 0.25);
  expect("L_q(0)", LossQ(Codes({{0.0}})), 1.0);
  OrderSelector sel(2);
  sel.set(0, 1, OrderShift::kReduced);
  expect("L_o(reduced, s=-1)*M^2", 4 * LossO(sel, Codes({{1, 1}, {-1, -1}})), 4.0);
  sel.set(0, 1, OrderShift::kIncreased);
  expect("L_o(increased, s=-1)", LossO(sel, Codes({{1, 1}, {-1, -1}})), 0.0);
  std::string detail = "L_w, L_u, L_q, L_o zero cases and 7 spot values";
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty(), detail};
}

// 6
Outcome TrainingEfficacy() {
  std::vector<std::string> terms(std::begin(kLossTerms), std::end(kLossTerms));
  std::vector<std::vector<double>> per_row;
  std::vector<double> gaps;
  AblationReport median;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    PipelineConfig c;
    c.seed = seed;
    c.hyper_dim = 2000;
    c.feature_dim = 64;
    c.num_classes = 8;
    c.num_bits = 32;
    c.synth_images = 512;
    c.synth_queries = 64;
    c.synth_objects_min = 1;
    c.synth_objects_max = 1;
    c.eval_k = 50;
    const AblationReport a = Ablate(c, terms);
    per_row.resize(a.rows.size());
    for (std::size_t r = 0; r < a.rows.size(); ++r) per_row[r].push_back(a.rows[r].report.map_at_k);
    gaps.push_back(a.rows[1].report.map_at_k - a.rows[0].report.map_at_k);
    if (seed == 1) median = a;
    std::printf("  seed %d: random %.4f full %.4f\n", static_cast<int>(seed),
                a.rows[0].report.map_at_k, a.rows[1].report.map_at_k);
  }
  for (std::size_t r = 0; r < per_row.size(); ++r) {
    median.rows[r].report.map_at_k = Median3(per_row[r]);
    median.rows[r].report.map_at_k_r.clear();
  }
  std::printf("  ablation, median mAP@50 over seeds 1-3:\n%s", AblationTable(median).c_str());
  const double full = median.rows[1].report.map_at_k;
  const double random = median.rows[0].report.map_at_k;
  std::string dominated;
  for (std::size_t r = 2; r < median.rows.size(); ++r) {
    if (median.rows[r].report.map_at_k > full) dominated += " " + median.rows[r].name + ";";
  }
  const double gap = Median3(gaps);
  return {gap >= 0.05 && full >= random,
          Fmt("median trained-random gap %.4f (>= 0.05); full %.4f >= random %.4f; "
              "variants above full (reported):%s",
              gap, full, random, dominated.empty() ? " none" : dominated.c_str())};
}

// 7
Outcome RetrievalExactness() {
  Rng rng(707);
  int checked = 0, mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int bits = 1 + static_cast<int>(rng.UniformInt(trial % 2 ? 12 : 130));
    const int n = static_cast<int>(rng.UniformInt(30));
    std::vector<std::pair<ItemId, PackedCode>> items;
    std::vector<std::vector<std::int8_t>> raw;
    for (int i = 0; i < n; ++i) {
      std::vector<std::int8_t> code(static_cast<std::size_t>(bits));
      for (auto& b : code) b = rng.UniformInt(2) ? 1 : -1;
      raw.push_back(code);
      // Distinct ids, shuffled.
      items.emplace_back(static_cast<ItemId>(i) * 131 % 997 + 1, PackedCode::Pack(code));
    }
    std::vector<std::int8_t> query(static_cast<std::size_t>(bits));
    for (auto& b : query) b = rng.UniformInt(2) ? 1 : -1;
    const std::size_t k = 1 + rng.UniformInt(35);
    const RetrievalIndex index = RetrievalIndex::Build(items, bits, {});

    std::vector<SearchHit> scan;
    for (int i = 0; i < n; ++i) {
      int d = 0;
      for (int j = 0; j < bits; ++j) d += raw[i][j] != query[j];
      scan.push_back({items[i].first, d});
    }
    std::sort(scan.begin(), scan.end(), [](const SearchHit& a, const SearchHit& b) {
      return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
    scan.resize(std::min(k, scan.size()));
    mismatches += index.QueryTopK(PackedCode::Pack(query), k) != scan;
    ++checked;
  }

  std::vector<std::pair<ItemId, PackedCode>> items;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::int8_t> code(100);
    for (auto& b : code) b = rng.UniformInt(2) ? 1 : -1;
    items.emplace_back(static_cast<ItemId>(i * 3 + 7), PackedCode::Pack(code));
  }
  const RetrievalIndex index =
      RetrievalIndex::Build(items, 100, {7, 0.1, 2000, 0xABC, 0xDEF});
  const fs::path dir = fs::temp_directory_path() / Fmt("hdhash_accept7_%d", getpid());
  fs::create_directories(dir);
  index.Save(dir / "a.nhix");
  const RetrievalIndex loaded = RetrievalIndex::Load(dir / "a.nhix");
  loaded.Save(dir / "b.nhix");
  const bool identical = ReadFile(dir / "a.nhix") == ReadFile(dir / "b.nhix") &&
                         loaded == index;
  fs::remove_all(dir);
  return {mismatches == 0 && identical,
          Fmt("%d/%d trials equal the linear scan (ties by id); save-load-save %s",
              checked - mismatches, checked, identical ? "byte-identical" : "DIFFERS")};
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

// 8
Outcome MetricOracles() {
  Rng rng(808);
  double worst = 0;
  int instances = 0;
  for (int t = 0; t < 3000; ++t) {
    const std::size_t n = 1 + rng.UniformInt(20);
    AnnotationMap corpus;
    for (std::size_t i = 0; i < n; ++i) corpus[i] = RandomAnnotation(rng, i, 3);
    std::vector<SpatialQuery> sq;
    std::vector<RankedQuery> rq;
    std::vector<std::vector<int>> rel;
    std::vector<std::size_t> totals;
    for (int q = 0; q < 3; ++q) {
      SpatialQuery s;
      s.query = RandomAnnotation(rng, 1000 + static_cast<ItemId>(q), 3);
      for (std::size_t i = 0; i < n; ++i) s.ranking.push_back(i);
      Shuffle(std::span<ItemId>(s.ranking), rng);
      // Class relevance with an arbitrary total >= the ranked count.
      std::vector<int> r;
      for (std::size_t i = 0; i < n; ++i) r.push_back(static_cast<int>(rng.UniformInt(2)));
      std::size_t total = 0;
      for (const int v : r) total += static_cast<std::size_t>(v);
      total += rng.UniformInt(3);
      std::vector<int> by_id(n);
      for (std::size_t i = 0; i < n; ++i) by_id[s.ranking[i]] = r[i];
      rq.push_back({s.ranking, [by_id](ItemId id) { return by_id[id] != 0; }, total});
      rel.push_back(r);
      totals.push_back(total);
      sq.push_back(std::move(s));
    }
    for (const std::size_t k : {std::size_t{1}, std::size_t{3}, n, n + 2}) {
      double want = 0;
      for (int q = 0; q < 3; ++q) want += oracle::Ap(rel[q], k, totals[q]);
      worst = std::max(worst, std::abs(MapAtK(rq, k) - want / 3));
      for (const double r : {0.1, 0.2, 0.3, 0.4}) {
        double want_r = 0;
        for (const auto& s : sq) {
          std::vector<int> hits;
          for (const ItemId id : s.ranking) hits.push_back(oracle::Spatial(s.query, corpus.at(id), r));
          std::size_t total = 0;
          for (const auto& [id, ann] : corpus) total += oracle::Spatial(s.query, ann, r);
          want_r += oracle::Ap(hits, k, total);
        }
        worst = std::max(worst, std::abs(MapAtKr(sq, corpus, k, r) - want_r / 3));
      }
    }
    ++instances;
  }

  // Monotone in r once every query has >= k relevant items at r = 0.1.
  constexpr std::size_t kK = 5;
  int checked = 0, violations = 0;
  for (int t = 0; t < 100; ++t) {
    AnnotationMap corpus;
    for (ItemId i = 0; i < 200; ++i) corpus[i] = RandomAnnotation(rng, i, 2);
    std::vector<SpatialQuery> queries;
    for (int q = 0; q < 4; ++q) {
      SpatialQuery s;
      s.query = RandomAnnotation(rng, 1000 + static_cast<ItemId>(q), 2);
      std::size_t total = 0;
      for (const auto& [id, ann] : corpus) total += oracle::Spatial(s.query, ann, 0.1);
      if (total < kK) continue;
      for (ItemId i = 0; i < 200; ++i) s.ranking.push_back(i);
      Shuffle(std::span<ItemId>(s.ranking), rng);
      queries.push_back(std::move(s));
    }
    if (queries.empty()) continue;
    ++checked;
    double prev = -1;
    for (const double r : {0.1, 0.2, 0.3, 0.4}) {
      const double v = MapAtKr(queries, corpus, kK, r);
      violations += v < prev;
      prev = v;
    }
  }
  return {worst <= 1e-12 && violations == 0 && checked > 0,
          Fmt("%d instances <= 20 items, max |err| %.1e; r-monotone on %d/%d "
              "instances with >= k relevant at r=0.1",
              instances, worst, checked - violations, checked)};
}

// 9
Outcome SpatialAwareness() {
  std::vector<double> gaps;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    double score[2];
    int i = 0;
    for (const double w : {0.1, 10.0}) {
      PipelineConfig c;
      c.seed = seed;
      c.hyper_dim = 2000;
      c.num_bits = 64;
      c.synth_images = 320;
      c.synth_queries = 40;
      c.synth_layout = "permuted-duplicates";
      c.synth_objects_min = 2;
      c.synth_objects_max = 3;
      c.synth_feature_noise = 0.5;
      c.eval_k = 50;
      c.eval_radii = {0.1};
      c.length_scale = w;
      const PreparedCorpus p = PrepareSynthetic(c);
      const HashModel model = TrainHashStage(p.corpus, c, c.hash_weights).model;
      score[i++] = EvaluateModel(p, model, c).map_at_k_r[0].value;
    }
    gaps.push_back(score[0] - score[1]);
    detail += Fmt(" seed %d: %.4f vs %.4f;", static_cast<int>(seed), score[0], score[1]);
  }
  const double gap = Median3(gaps);
  return {gap >= 0.05,
          Fmt("mAP@50 r=0.1, w=0.1 vs w=10:%s median gap %.4f (>= 0.05)", detail.c_str(), gap)};
}

// 10: the query holds A, B, C. Scene 0 holds only A at A's position; the
// rest are B+C, B, C, A elsewhere, and random scenes of other classes.
int TargetRank(std::uint64_t seed, double eta_a, bool& ok) {
  constexpr int kZ = 64, kClasses = 8;
  PipelineConfig c;
  c.seed = seed;
  c.hyper_dim = 2000;
  c.feature_dim = kZ;
  c.num_classes = kClasses;
  c.num_bits = 64;
  c.length_scale = 0.3;
  Rng rng(Mix64(seed + 1010));
  const Matrix protos = RandomMatrix(rng, kClasses, kZ, 1.0);

  std::vector<float> blob;
  auto add_vector = [&](int label, double noise) {
    for (int i = 0; i < kZ; ++i) {
      const double base = label < 0 ? 0.0 : protos(label, i);
      blob.push_back(static_cast<float>(base + noise * rng.Normal()));
    }
    return static_cast<std::uint64_t>(blob.size() / kZ - 1);
  };
  auto object = [&](int label, double x, double y) {
    return ObjectRecord{{100 * x - 5, 100 * y - 5, 10, 10}, label, add_vector(label, 0.1)};
  };
  const double pa[] = {0.2, 0.25}, pb[] = {0.7, 0.3}, pc[] = {0.45, 0.8};
  std::vector<std::vector<ObjectRecord>> scenes = {
      {object(0, pa[0], pa[1])},
      {object(1, pb[0], pb[1]), object(2, pc[0], pc[1])},
      {object(1, pb[0], pb[1])},
      {object(2, pc[0], pc[1])},
      {object(0, 0.8, 0.8)},
  };
  for (int s = 0; s < 40; ++s) {
    std::vector<ObjectRecord> objs;
    const int n = 1 + static_cast<int>(rng.UniformInt(3));
    for (int k = 0; k < n; ++k) {
      objs.push_back(object(3 + static_cast<int>(rng.UniformInt(kClasses - 3)),
                            0.1 + 0.8 * rng.Uniform(), 0.1 + 0.8 * rng.Uniform()));
    }
    scenes.push_back(objs);
  }
  std::vector<ImageRecord> images;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    images.push_back({.id = s, .width = 100, .height = 100,
                      .global_feature = add_vector(-1, 1.0), .objects = scenes[s]});
  }
  const FeatureDataset ds(kZ, images, blob);
  const EncoderParams encoder = TrainEncoderStage(ds, c).params;
  const PositionalBasis basis = PipelineBasis(c, c.hyper_dim);
  const SceneSet corpus = EncodeDataset(ds, encoder, basis, c.length_scale);
  const HashModel model = TrainHashStage(corpus, c, c.hash_weights).model;
  const RetrievalIndex index = BuildIndex(HashScenes(model, corpus));

  auto query_feature = [&](int label) {
    std::vector<double> f(kZ);
    for (int i = 0; i < kZ; ++i) f[i] = protos(label, i) + 0.1 * rng.Normal();
    return f;
  };
  QuerySpec spec;
  spec.w = c.length_scale;
  spec.scene.global.resize(kZ);
  for (double& v : spec.scene.global) v = rng.Normal();
  spec.scene.objects = {{query_feature(0), pa[0], pa[1]},
                        {query_feature(1), pb[0], pb[1]},
                        {query_feature(2), pc[0], pc[1]}};
  spec.object_etas = {eta_a, 1, 1};
  const auto hits = RunQuery({&index, &encoder, &model, &basis}, spec, index.size());
  for (std::size_t r = 0; r < hits.size(); ++r) {
    if (hits[r].id == 0) return static_cast<int>(r) + 1;
  }
  ok = false;
  return -1;
}

Outcome ConditionalRetrieval() {
  bool pass = true;
  std::string detail = "target rank at eta_A 1 -> 10 among 45 scenes:";
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    bool ok = true;
    // Same seed, so both calls build the identical corpus and index.
    const int before = TargetRank(seed, 1.0, ok);
    const int after = TargetRank(seed, 10.0, ok);
    pass = pass && ok && after <= before;
    detail += Fmt(" seed %d: %d -> %d;", static_cast<int>(seed), before, after);
  }
  return {pass, detail};
}

// 11
Outcome EndToEndDeterminism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const fs::path root = fs::temp_directory_path() / Fmt("hdhash_accept11_%d", getpid());
  fs::remove_all(root);
  const std::string sets =
      " --seed 7 --set hyper_dim=1000 --set synth_images=128 --set synth_queries=16"
      " --set encoder_epochs=3 --set hash_epochs=5 --set eval_k=20";
  const char* steps[] = {
      "synth", "train-encoder", "encode", "encode --dataset {out}/queries",
      "train-hash", "hash", "hash --scenes {out}/queries.scenes", "build-index", "eval",
  };
  std::vector<std::string> files;
  for (const char* run : {"a", "b"}) {
    const fs::path out = root / run;
    for (std::string step : steps) {
      for (std::size_t at; (at = step.find("{out}")) != std::string::npos;) {
        step.replace(at, 5, out.string());
      }
      const std::string cmd = "\"" + cli + "\" --out-dir \"" + out.string() + "\"" + sets +
                              " " + step + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        fs::remove_all(root);
        return {false, "command failed: " + step};
      }
    }
  }
  int compared = 0;
  std::string differ;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const std::string name = entry.path().filename().string();
    ++compared;
    if (!fs::exists(root / "b" / name) ||
        ReadFile(entry.path()) != ReadFile(root / "b" / name)) {
      differ += " " + name;
    }
  }
  const bool have = fs::exists(root / "a" / "index.nhix") && fs::exists(root / "a" / "report.json");
  fs::remove_all(root);
  return {have && differ.empty(),
          Fmt("two CLI runs from seed 7: %d files compared incl. index.nhix and report.json; %s",
              compared, differ.empty() ? "all byte-identical" : ("differ:" + differ).c_str())};
}

}  // namespace
}  // namespace hdhash

int main(int argc, char** argv) {
  using namespace hdhash;
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    int number;
    const char* name;
    double limit_s;  // 0 means no runtime bound
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "spatial kernel fidelity", 30, SpatialKernel},
      {2, "binding preserves similarity", 0, BindingPreservesSimilarity},
      {3, "hyperplane rounding law", 0, HyperplaneRounding},
      {4, "gradient correctness", 60, GradientCheck},
      {5, "zero-loss and spot values", 0, ZeroLossAndSpotValues},
      {6, "training efficacy", 600, TrainingEfficacy},
      {7, "retrieval exactness", 0, RetrievalExactness},
      {8, "metric oracles", 0, MetricOracles},
      {9, "spatial awareness ordering", 0, SpatialAwareness},
      {10, "conditional retrieval", 0, ConditionalRetrieval},
      {11, "end-to-end determinism", 0, [&] { return EndToEndDeterminism(cli); }},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      out.pass = false;
      out.detail += Fmt("; runtime over %.0f s", c.limit_s);
    }
    failures += !out.pass;
    std::printf("ACCEPT %2d %s  %s: %s [%.1f s]\n", c.number, out.pass ? "PASS" : "FAIL",
                c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
