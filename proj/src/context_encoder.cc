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

#include "hdhash/context_encoder.h"

#include <cmath>
#include <numeric>
#include <string>

#include "hdhash/errors.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

Eigen::MatrixXd GaussianMatrix(Rng& rng, int rows, int cols, double stddev) {
  Eigen::MatrixXd m(rows, cols);
  // Fill row-major so the draw order does not depend on Eigen's layout.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = stddev * rng.Normal();
  }
  return m;
}

void CheckBatch(const EncoderParams& params, const Eigen::MatrixXd& features,
                std::span<const int> labels) {
  if (features.rows() != params.input_dim()) {
    throw InvalidArgument("encoder: feature length " +
                          std::to_string(features.rows()) + ", expected " +
                          std::to_string(params.input_dim()));
  }
  if (features.cols() == 0) throw InvalidArgument("encoder: empty batch");
  if (labels.size() != static_cast<std::size_t>(features.cols())) {
    throw InvalidArgument("encoder: label count does not match batch");
  }
  for (const int y : labels) {
    if (y < 0 || y >= params.num_classes()) {
      throw InvalidArgument("encoder: pseudo-label " + std::to_string(y) +
                            " outside [0, " +
                            std::to_string(params.num_classes()) + ")");
    }
  }
}

// Intermediate activations of one batch.
struct Activations {
  Eigen::MatrixXd bottleneck;  // tanh(W_ext f + b_ext), z' x M
  Eigen::MatrixXd hyper;       // phi(f), D x M
  Eigen::MatrixXd probs;       // softmax(C^T phi), c x M
  Eigen::MatrixXd residual;    // E_rec(phi) - f, z x M
  EncoderLoss loss;
};

Activations Forward(const EncoderParams& p, const Eigen::MatrixXd& features,
                    std::span<const int> labels, double lambda_rec) {
  const auto m = static_cast<double>(features.cols());
  Activations a;
  a.bottleneck =
      ((p.ext_weight * features).colwise() + p.ext_bias).array().tanh();
  a.hyper = (p.gen_weight * a.bottleneck).colwise() + p.gen_bias;

  Eigen::MatrixXd logits = p.classes.transpose() * a.hyper;
  a.probs.resize(logits.rows(), logits.cols());
  double ce = 0;
  for (Eigen::Index k = 0; k < logits.cols(); ++k) {
    const double top = logits.col(k).maxCoeff();
    const Eigen::VectorXd shifted = logits.col(k).array() - top;
    const double log_z = std::log(shifted.array().exp().sum());
    a.probs.col(k) = (shifted.array() - log_z).exp();
    ce -= shifted(labels[static_cast<std::size_t>(k)]) - log_z;
  }
  a.residual = ((p.rec_weight * a.hyper).colwise() + p.rec_bias) - features;

  a.loss.classification = ce / m;
  a.loss.reconstruction = a.residual.squaredNorm() / m;
  a.loss.total = a.loss.classification + lambda_rec * a.loss.reconstruction;
  return a;
}

}  // namespace

EncoderParams EncoderParams::ZerosLike() const {
  return EncoderParams{
      .ext_weight = Eigen::MatrixXd::Zero(ext_weight.rows(), ext_weight.cols()),
      .ext_bias = Eigen::VectorXd::Zero(ext_bias.size()),
      .gen_weight = Eigen::MatrixXd::Zero(gen_weight.rows(), gen_weight.cols()),
      .gen_bias = Eigen::VectorXd::Zero(gen_bias.size()),
      .rec_weight = Eigen::MatrixXd::Zero(rec_weight.rows(), rec_weight.cols()),
      .rec_bias = Eigen::VectorXd::Zero(rec_bias.size()),
      .classes = Eigen::MatrixXd::Zero(classes.rows(), classes.cols()),
  };
}

bool EncoderParams::operator==(const EncoderParams& o) const {
  return ext_weight == o.ext_weight && ext_bias == o.ext_bias &&
         gen_weight == o.gen_weight && gen_bias == o.gen_bias &&
         rec_weight == o.rec_weight && rec_bias == o.rec_bias &&
         classes == o.classes;
}

EncoderParams EncoderInit(std::uint64_t seed, int z, int z_prime, int d,
                          int c) {
  if (!(z > z_prime && z_prime >= 1)) {
    throw InvalidArgument("EncoderInit: need z > z' >= 1 (z=" +
                          std::to_string(z) +
                          ", z'=" + std::to_string(z_prime) + ")");
  }
  if (d < z) throw InvalidArgument("EncoderInit: need d >= z");
  if (c < 2) throw InvalidArgument("EncoderInit: need c >= 2");
  Rng rng(seed);
  EncoderParams p;
  p.ext_weight = GaussianMatrix(rng, z_prime, z, 1.0 / std::sqrt(z));
  p.ext_bias = Eigen::VectorXd::Zero(z_prime);
  p.gen_weight = GaussianMatrix(rng, d, z_prime, 1.0 / std::sqrt(z_prime));
  p.gen_bias = Eigen::VectorXd::Zero(d);
  p.rec_weight = GaussianMatrix(rng, z, d, 1.0 / std::sqrt(d));
  p.rec_bias = Eigen::VectorXd::Zero(z);
  p.classes = GaussianMatrix(rng, d, c, 1.0 / std::sqrt(d));
  return p;
}

Eigen::MatrixXd EncoderForwardBatch(const EncoderParams& params,
                                    const Eigen::MatrixXd& features) {
  if (features.rows() != params.input_dim()) {
    throw InvalidArgument("EncoderForward: feature length " +
                          std::to_string(features.rows()) + ", expected " +
                          std::to_string(params.input_dim()));
  }
  const Eigen::MatrixXd bottleneck =
      ((params.ext_weight * features).colwise() + params.ext_bias)
          .array()
          .tanh();
  return (params.gen_weight * bottleneck).colwise() + params.gen_bias;
}

Hypervector EncoderForward(const EncoderParams& params,
                           std::span<const double> features) {
  const Eigen::Map<const Eigen::VectorXd> f(
      features.data(), static_cast<Eigen::Index>(features.size()));
  const Eigen::MatrixXd out = EncoderForwardBatch(params, f);
  return Hypervector(std::vector<double>(out.data(), out.data() + out.size()));
}

EncoderLoss EncoderLossOf(const EncoderParams& params,
                          const Eigen::MatrixXd& features,
                          std::span<const int> labels, double lambda_rec) {
  CheckBatch(params, features, labels);
  return Forward(params, features, labels, lambda_rec).loss;
}

EncoderGradient EncoderGrad(const EncoderParams& p,
                            const Eigen::MatrixXd& features,
                            std::span<const int> labels, double lambda_rec) {
  CheckBatch(p, features, labels);
  const Activations a = Forward(p, features, labels, lambda_rec);
  const auto m = static_cast<double>(features.cols());

  EncoderGradient out{.loss = a.loss, .grad = {}};
  EncoderParams& g = out.grad;

  // d L_c / d logits = (softmax - onehot) / M
  Eigen::MatrixXd d_logits = a.probs;
  for (Eigen::Index k = 0; k < d_logits.cols(); ++k) {
    d_logits(labels[static_cast<std::size_t>(k)], k) -= 1.0;
  }
  d_logits /= m;
  g.classes = a.hyper * d_logits.transpose();

  // d (lambda L_rec) / d E_rec output = 2 lambda (E_rec(phi) - f) / M
  const Eigen::MatrixXd d_rec = (2.0 * lambda_rec / m) * a.residual;
  g.rec_weight = d_rec * a.hyper.transpose();
  g.rec_bias = d_rec.rowwise().sum();

  const Eigen::MatrixXd d_hyper =
      p.classes * d_logits + p.rec_weight.transpose() * d_rec;
  g.gen_weight = d_hyper * a.bottleneck.transpose();
  g.gen_bias = d_hyper.rowwise().sum();

  const Eigen::MatrixXd d_pre =
      ((p.gen_weight.transpose() * d_hyper).array() *
       (1.0 - a.bottleneck.array().square()))
          .matrix();
  g.ext_weight = d_pre * features.transpose();
  g.ext_bias = d_pre.rowwise().sum();
  return out;
}

EncoderTrainResult EncoderTrain(EncoderParams params,
                                const Eigen::MatrixXd& features,
                                std::span<const int> labels,
                                const EncoderTrainConfig& config) {
  if (features.cols() == 0) throw InvalidArgument("EncoderTrain: empty dataset");
  if (!(config.lambda_rec >= 0) || !(config.learning_rate >= 0) ||
      config.epochs < 1 || config.batch_size < 1) {
    throw InvalidArgument("EncoderTrain: invalid config");
  }
  CheckBatch(params, features, labels);

  const Eigen::Index n = features.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(config.seed);

  EncoderTrainResult result;
  const double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(std::span<Eigen::Index>(order), rng);
    EncoderLoss sum;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index count =
          std::min<Eigen::Index>(config.batch_size, n - start);
      Eigen::MatrixXd batch(features.rows(), count);
      std::vector<int> batch_labels(static_cast<std::size_t>(count));
      for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(start + i)];
        batch.col(i) = features.col(src);
        batch_labels[static_cast<std::size_t>(i)] =
            labels[static_cast<std::size_t>(src)];
      }
      const EncoderGradient step =
          EncoderGrad(params, batch, batch_labels, config.lambda_rec);
      const auto weight = static_cast<double>(count);
      sum.total += weight * step.loss.total;
      sum.classification += weight * step.loss.classification;
      sum.reconstruction += weight * step.loss.reconstruction;
      if (lr != 0) {
        params.ext_weight -= lr * step.grad.ext_weight;
        params.ext_bias -= lr * step.grad.ext_bias;
        params.gen_weight -= lr * step.grad.gen_weight;
        params.gen_bias -= lr * step.grad.gen_bias;
        params.rec_weight -= lr * step.grad.rec_weight;
        params.rec_bias -= lr * step.grad.rec_bias;
        params.classes -= lr * step.grad.classes;
      }
    }
    const auto total_n = static_cast<double>(n);
    result.trace.push_back({sum.total / total_n, sum.classification / total_n,
                            sum.reconstruction / total_n});
  }
  result.params = std::move(params);
  return result;
}

}  // namespace hdhash
