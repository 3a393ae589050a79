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

// Trainable multilinear hyperplane hash f_h(H) = tanh(H P^T + b) over
// flattened scene representations, and its five-term training loss:
//
//   L = l_mse L_mse + l_w L_w + l_q L_q + l_u L_u + l_o L_o
//
// with s'_ij = H'_i . H'_j / L the code similarity and s_ij the cosine of
// scene rows i and j. All pairwise sums run over every (i, j), diagonal
// included, and are averaged over M^2.

#ifndef HDHASH_HYPERPLANE_HASH_H_
#define HDHASH_HYPERPLANE_HASH_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hdhash {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BipolarMatrix =
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct HashModel {
  Eigen::MatrixXd hyperplanes;  // L x 2D
  Eigen::VectorXd bias;         // L

  int num_bits() const { return static_cast<int>(hyperplanes.rows()); }
  int input_dim() const { return static_cast<int>(hyperplanes.cols()); }
  bool operator==(const HashModel& o) const {
    return hyperplanes == o.hyperplanes && bias == o.bias;
  }
};

struct HashLossWeights {
  double mse = 1.0;
  double w = 0.1;
  double q = 0.1;
  double u = 0.01;
  double o = 0.1;

  static HashLossWeights Zero() { return {0, 0, 0, 0, 0}; }
};

// tanh outputs, M x L, entries in (-1, 1).
struct RelaxedCodes {
  Eigen::MatrixXd values;
};

// sign(H') with sign(0) = +1, M x L.
struct BipolarCodes {
  BipolarMatrix values;
};

struct HashLossBreakdown {
  double total = 0;
  double mse = 0;
  double w = 0;
  double q = 0;
  double u = 0;
  double o = 0;
};

// Hyperplane entries i.i.d. N(0, 1), zero bias.
HashModel HashInit(std::uint64_t seed, int num_bits, int input_dim);

// scenes: M x 2D.
RelaxedCodes HashForward(const HashModel& model, const Eigen::MatrixXd& scenes);
BipolarCodes Binarize(const RelaxedCodes& codes);

// Row-wise cosine matrix, M x M. Throws UndefinedSimilarity on a zero row.
Eigen::MatrixXd CosineMatrix(const Eigen::MatrixXd& scenes);
// s'_ij = H'_i . H'_j / L.
Eigen::MatrixXd CodeSimilarity(const RelaxedCodes& codes);

double LossMse(const Eigen::MatrixXd& scenes, const RelaxedCodes& codes);
double LossW(const RelaxedCodes& codes);
double LossU(const RelaxedCodes& codes);
double LossQ(const RelaxedCodes& codes);

enum class OrderShift : std::int8_t { kUnchanged = 0, kReduced, kIncreased };

// Per-pair rank comparison. For row i and column j let
//   n(i, j)  = |{k : s_ij  > s_ik }|   over scene cosines,
//   n'(i, j) = |{k : s'_ij > s'_ik}|   over code similarities.
// n' < n is kReduced, n' > n is kIncreased, equality kUnchanged.
class OrderSelector {
 public:
  OrderSelector() = default;
  explicit OrderSelector(int m)
      : m_(m), shifts_(static_cast<std::size_t>(m) * m, OrderShift::kUnchanged) {}

  int size() const { return m_; }
  OrderShift at(int i, int j) const {
    return shifts_[static_cast<std::size_t>(i) * m_ + j];
  }
  void set(int i, int j, OrderShift s) {
    shifts_[static_cast<std::size_t>(i) * m_ + j] = s;
  }
  int Count(OrderShift s) const;

 private:
  int m_ = 0;
  std::vector<OrderShift> shifts_;
};

OrderSelector OrderWeights(const Eigen::MatrixXd& scene_cosines,
                           const Eigen::MatrixXd& code_similarity);
OrderSelector OrderWeights(const Eigen::MatrixXd& scenes,
                           const RelaxedCodes& codes);

// Reduced pairs cost (1 - s'_ij)^2, increased pairs (1 + s'_ij)^2.
double LossO(const OrderSelector& selector, const RelaxedCodes& codes);
double LossO(const Eigen::MatrixXd& scenes, const RelaxedCodes& codes);

HashLossBreakdown HashTotalLoss(const Eigen::MatrixXd& scenes,
                                const RelaxedCodes& codes,
                                const HashLossWeights& weights);

struct HashGradient {
  HashLossBreakdown loss;
  Eigen::MatrixXd hyperplanes;
  Eigen::VectorXd bias;
};

// Analytic gradient of the weighted loss. The order selector is evaluated
// at the current codes and then held constant; sign(H') in L_q likewise.
HashGradient HashGrad(const HashModel& model, const Eigen::MatrixXd& scenes,
                      const HashLossWeights& weights);

// Same, with a caller-supplied frozen selector (used for gradient checks).
HashGradient HashGrad(const HashModel& model, const Eigen::MatrixXd& scenes,
                      const HashLossWeights& weights,
                      const OrderSelector& selector);
// Loss evaluated with a frozen selector; consistent with the overload above.
HashLossBreakdown HashTotalLoss(const Eigen::MatrixXd& scenes,
                                const RelaxedCodes& codes,
                                const HashLossWeights& weights,
                                const OrderSelector& selector);

struct HashTrainConfig {
  HashLossWeights weights;
  double learning_rate = 10.0;
  int epochs = 30;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

struct HashTrainResult {
  HashModel model;
  std::vector<HashLossBreakdown> trace;  // one entry per epoch
};

// Minibatch gradient descent over a corpus of M x 2D scene rows. Pairwise
// terms and the order selector use batch-internal pairs only.
HashTrainResult HashTrain(HashModel model, const Eigen::MatrixXd& corpus,
                          const HashTrainConfig& config);

}  // namespace hdhash

#endif  // HDHASH_HYPERPLANE_HASH_H_
