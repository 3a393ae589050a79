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

#include "hdhash/hyperplane_hash.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hdhash/errors.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

void CheckCodes(const RelaxedCodes& codes) {
  if (codes.values.rows() == 0 || codes.values.cols() == 0) {
    throw InvalidArgument("hash loss: empty code matrix");
  }
}

void CheckPair(const Eigen::MatrixXd& scenes, const RelaxedCodes& codes) {
  CheckCodes(codes);
  if (scenes.rows() != codes.values.rows()) {
    throw InvalidArgument("hash loss: " + std::to_string(scenes.rows()) +
                          " scenes vs " + std::to_string(codes.values.rows()) +
                          " codes");
  }
}

double SignOf(double x) { return x >= 0 ? 1.0 : -1.0; }

// Everything needed to evaluate and differentiate the loss on one batch.
struct LossTerms {
  HashLossBreakdown loss;
  Eigen::MatrixXd d_codes;  // dL/dH', M x L
};

LossTerms Evaluate(const Eigen::MatrixXd& cosines, const Eigen::MatrixXd& y,
                   const OrderSelector& selector,
                   const HashLossWeights& weights, bool with_gradient) {
  const Eigen::Index m = y.rows();
  const Eigen::Index l = y.cols();
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  const double ld = static_cast<double>(l);
  const Eigen::MatrixXd s = (y * y.transpose()) / ld;

  LossTerms out;
  HashLossBreakdown& loss = out.loss;
  // dL/dS', accumulated over the three pairwise terms.
  Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sij = s(i, j);
      const double diff = cosines(i, j) - sij;
      loss.mse += diff * diff;
      const double quartic = (sij + 1) * (sij - 1);
      loss.w += quartic * quartic;
      double dij = -2.0 * weights.mse * diff + 4.0 * weights.w * sij * quartic;
      switch (selector.at(static_cast<int>(i), static_cast<int>(j))) {
        case OrderShift::kReduced:
          loss.o += (1 - sij) * (1 - sij);
          dij += -2.0 * weights.o * (1 - sij);
          break;
        case OrderShift::kIncreased:
          loss.o += (1 + sij) * (1 + sij);
          dij += 2.0 * weights.o * (1 + sij);
          break;
        case OrderShift::kUnchanged:
          break;
      }
      ds(i, j) = dij / m2;
    }
  }
  loss.mse /= m2;
  loss.w /= m2;
  loss.o /= m2;

  const Eigen::VectorXd row_sums = y.rowwise().sum();
  loss.u = row_sums.squaredNorm() / static_cast<double>(m);
  const Eigen::MatrixXd quant_residual =
      y - y.unaryExpr([](double v) { return SignOf(v); });
  loss.q = quant_residual.squaredNorm() / (static_cast<double>(m) * ld);

  loss.total = weights.mse * loss.mse + weights.w * loss.w +
               weights.q * loss.q + weights.u * loss.u + weights.o * loss.o;

  if (with_gradient) {
    out.d_codes = ((ds + ds.transpose()) * y) / ld;
    out.d_codes.colwise() +=
        (2.0 * weights.u / static_cast<double>(m)) * row_sums;
    out.d_codes +=
        (2.0 * weights.q / (static_cast<double>(m) * ld)) * quant_residual;
  }
  return out;
}

HashGradient Backward(const Eigen::MatrixXd& scenes, const Eigen::MatrixXd& y,
                      LossTerms terms) {
  const Eigen::MatrixXd d_pre =
      (terms.d_codes.array() * (1.0 - y.array().square())).matrix();
  HashGradient g;
  g.loss = terms.loss;
  g.hyperplanes = d_pre.transpose() * scenes;
  g.bias = d_pre.colwise().sum().transpose();
  return g;
}

void CheckModelInput(const HashModel& model, const Eigen::MatrixXd& scenes) {
  if (scenes.cols() != model.input_dim()) {
    throw InvalidArgument("hash: scene width " + std::to_string(scenes.cols()) +
                          ", model expects " +
                          std::to_string(model.input_dim()));
  }
}

}  // namespace

HashModel HashInit(std::uint64_t seed, int num_bits, int input_dim) {
  if (num_bits < 1) throw InvalidArgument("HashInit: need >= 1 bit");
  if (input_dim < 2) throw InvalidArgument("HashInit: need input_dim >= 2");
  Rng rng(seed);
  HashModel model;
  model.hyperplanes.resize(num_bits, input_dim);
  for (int r = 0; r < num_bits; ++r) {
    for (int c = 0; c < input_dim; ++c) model.hyperplanes(r, c) = rng.Normal();
  }
  model.bias = Eigen::VectorXd::Zero(num_bits);
  return model;
}

RelaxedCodes HashForward(const HashModel& model,
                         const Eigen::MatrixXd& scenes) {
  CheckModelInput(model, scenes);
  Eigen::MatrixXd pre = scenes * model.hyperplanes.transpose();
  pre.rowwise() += model.bias.transpose();
  return RelaxedCodes{pre.array().tanh().matrix()};
}

BipolarCodes Binarize(const RelaxedCodes& codes) {
  BipolarCodes out;
  out.values = codes.values
                   .unaryExpr([](double v) -> std::int8_t {
                     return v >= 0 ? std::int8_t{1} : std::int8_t{-1};
                   })
                   .eval();
  return out;
}

Eigen::MatrixXd CosineMatrix(const Eigen::MatrixXd& scenes) {
  const Eigen::VectorXd norms = scenes.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms(i) == 0) {
      throw UndefinedSimilarity("scene row " + std::to_string(i) +
                                " has zero norm");
    }
  }
  const Eigen::MatrixXd unit = norms.cwiseInverse().asDiagonal() * scenes;
  return (unit * unit.transpose()).cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::MatrixXd CodeSimilarity(const RelaxedCodes& codes) {
  return (codes.values * codes.values.transpose()) /
         static_cast<double>(codes.values.cols());
}

double LossMse(const Eigen::MatrixXd& scenes, const RelaxedCodes& codes) {
  CheckPair(scenes, codes);
  const double m = static_cast<double>(scenes.rows());
  return (CosineMatrix(scenes) - CodeSimilarity(codes)).squaredNorm() / (m * m);
}

double LossW(const RelaxedCodes& codes) {
  CheckCodes(codes);
  const double m = static_cast<double>(codes.values.rows());
  const Eigen::ArrayXXd s = CodeSimilarity(codes).array();
  return ((s + 1) * (s - 1)).square().sum() / (m * m);
}

double LossU(const RelaxedCodes& codes) {
  CheckCodes(codes);
  return codes.values.rowwise().sum().squaredNorm() /
         static_cast<double>(codes.values.rows());
}

double LossQ(const RelaxedCodes& codes) {
  CheckCodes(codes);
  const Eigen::MatrixXd residual =
      codes.values - codes.values.unaryExpr([](double v) { return SignOf(v); });
  return residual.squaredNorm() /
         static_cast<double>(codes.values.rows() * codes.values.cols());
}

int OrderSelector::Count(OrderShift s) const {
  return static_cast<int>(std::count(shifts_.begin(), shifts_.end(), s));
}

OrderSelector OrderWeights(const Eigen::MatrixXd& scene_cosines,
                           const Eigen::MatrixXd& code_similarity) {
  const auto m = static_cast<int>(scene_cosines.rows());
  if (scene_cosines.cols() != m || code_similarity.rows() != m ||
      code_similarity.cols() != m) {
    throw InvalidArgument("OrderWeights: similarity matrices must be M x M");
  }
  OrderSelector selector(m);
  std::vector<double> sorted_h(static_cast<std::size_t>(m));
  std::vector<double> sorted_c(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      sorted_h[k] = scene_cosines(i, k);
      sorted_c[k] = code_similarity(i, k);
    }
    std::sort(sorted_h.begin(), sorted_h.end());
    std::sort(sorted_c.begin(), sorted_c.end());
    for (int j = 0; j < m; ++j) {
      // Number of k with s_ik strictly below s_ij.
      const auto below_h =
          std::lower_bound(sorted_h.begin(), sorted_h.end(),
                           scene_cosines(i, j)) -
          sorted_h.begin();
      const auto below_c =
          std::lower_bound(sorted_c.begin(), sorted_c.end(),
                           code_similarity(i, j)) -
          sorted_c.begin();
      if (below_c < below_h) {
        selector.set(i, j, OrderShift::kReduced);
      } else if (below_c > below_h) {
        selector.set(i, j, OrderShift::kIncreased);
      }
    }
  }
  return selector;
}

OrderSelector OrderWeights(const Eigen::MatrixXd& scenes,
                           const RelaxedCodes& codes) {
  CheckPair(scenes, codes);
  return OrderWeights(CosineMatrix(scenes), CodeSimilarity(codes));
}

double LossO(const OrderSelector& selector, const RelaxedCodes& codes) {
  CheckCodes(codes);
  const Eigen::MatrixXd s = CodeSimilarity(codes);
  const int m = selector.size();
  if (s.rows() != m) throw InvalidArgument("LossO: selector size mismatch");
  double sum = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      switch (selector.at(i, j)) {
        case OrderShift::kReduced:
          sum += (1 - s(i, j)) * (1 - s(i, j));
          break;
        case OrderShift::kIncreased:
          sum += (1 + s(i, j)) * (1 + s(i, j));
          break;
        case OrderShift::kUnchanged:
          break;
      }
    }
  }
  return sum / (static_cast<double>(m) * m);
}

double LossO(const Eigen::MatrixXd& scenes, const RelaxedCodes& codes) {
  return LossO(OrderWeights(scenes, codes), codes);
}

HashLossBreakdown HashTotalLoss(const Eigen::MatrixXd& scenes,
                                const RelaxedCodes& codes,
                                const HashLossWeights& weights,
                                const OrderSelector& selector) {
  CheckPair(scenes, codes);
  if (selector.size() != scenes.rows()) {
    throw InvalidArgument("HashTotalLoss: selector size mismatch");
  }
  return Evaluate(CosineMatrix(scenes), codes.values, selector, weights,
                  /*with_gradient=*/false)
      .loss;
}

HashLossBreakdown HashTotalLoss(const Eigen::MatrixXd& scenes,
                                const RelaxedCodes& codes,
                                const HashLossWeights& weights) {
  CheckPair(scenes, codes);
  const Eigen::MatrixXd cosines = CosineMatrix(scenes);
  return Evaluate(cosines, codes.values,
                  OrderWeights(cosines, CodeSimilarity(codes)), weights,
                  /*with_gradient=*/false)
      .loss;
}

HashGradient HashGrad(const HashModel& model, const Eigen::MatrixXd& scenes,
                      const HashLossWeights& weights,
                      const OrderSelector& selector) {
  const RelaxedCodes codes = HashForward(model, scenes);
  CheckPair(scenes, codes);
  if (selector.size() != scenes.rows()) {
    throw InvalidArgument("HashGrad: selector size mismatch");
  }
  return Backward(scenes, codes.values,
                  Evaluate(CosineMatrix(scenes), codes.values, selector,
                           weights, /*with_gradient=*/true));
}

HashGradient HashGrad(const HashModel& model, const Eigen::MatrixXd& scenes,
                      const HashLossWeights& weights) {
  const RelaxedCodes codes = HashForward(model, scenes);
  CheckPair(scenes, codes);
  const Eigen::MatrixXd cosines = CosineMatrix(scenes);
  const OrderSelector selector = OrderWeights(cosines, CodeSimilarity(codes));
  return Backward(scenes, codes.values,
                  Evaluate(cosines, codes.values, selector, weights,
                           /*with_gradient=*/true));
}

HashTrainResult HashTrain(HashModel model, const Eigen::MatrixXd& corpus,
                          const HashTrainConfig& config) {
  if (corpus.rows() == 0) throw InvalidArgument("HashTrain: empty corpus");
  if (!(config.learning_rate >= 0) || config.epochs < 1 ||
      config.batch_size < 1) {
    throw InvalidArgument("HashTrain: invalid config");
  }
  CheckModelInput(model, corpus);

  const Eigen::Index n = corpus.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(config.seed);

  HashTrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(std::span<Eigen::Index>(order), rng);
    HashLossBreakdown sum;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index count =
          std::min<Eigen::Index>(config.batch_size, n - start);
      Eigen::MatrixXd batch(count, corpus.cols());
      for (Eigen::Index i = 0; i < count; ++i) {
        batch.row(i) = corpus.row(order[static_cast<std::size_t>(start + i)]);
      }
      const HashGradient g = HashGrad(model, batch, config.weights);
      const auto weight = static_cast<double>(count);
      sum.total += weight * g.loss.total;
      sum.mse += weight * g.loss.mse;
      sum.w += weight * g.loss.w;
      sum.q += weight * g.loss.q;
      sum.u += weight * g.loss.u;
      sum.o += weight * g.loss.o;
      if (config.learning_rate != 0) {
        model.hyperplanes -= config.learning_rate * g.hyperplanes;
        model.bias -= config.learning_rate * g.bias;
      }
    }
    const auto nd = static_cast<double>(n);
    result.trace.push_back({sum.total / nd, sum.mse / nd, sum.w / nd,
                            sum.q / nd, sum.u / nd, sum.o / nd});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace hdhash
