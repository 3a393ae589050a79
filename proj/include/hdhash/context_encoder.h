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

// Trainable feature-to-hypervector encoder phi = E_gen(tanh(E_ext(f))),
// trained with pseudo-label cross-entropy against jointly learned class
// hypervectors plus a linear reconstruction term:
//
//   logits_k = C^T phi(f_k)
//   L_c      = mean_k CE(softmax(logits_k), y_k)
//   L_rec    = mean_k |f_k - E_rec(phi(f_k))|^2
//   L_enc    = L_c + lambda_rec * L_rec
//
// Batches are column-major: one sample per column.

#ifndef HDHASH_CONTEXT_ENCODER_H_
#define HDHASH_CONTEXT_ENCODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hdhash/hdc.h"

namespace hdhash {

struct EncoderParams {
  Eigen::MatrixXd ext_weight;  // z' x z
  Eigen::VectorXd ext_bias;    // z'
  Eigen::MatrixXd gen_weight;  // D x z'
  Eigen::VectorXd gen_bias;    // D
  Eigen::MatrixXd rec_weight;  // z x D
  Eigen::VectorXd rec_bias;    // z
  Eigen::MatrixXd classes;     // D x c

  int input_dim() const { return static_cast<int>(ext_weight.cols()); }
  int bottleneck_dim() const { return static_cast<int>(ext_weight.rows()); }
  int hyper_dim() const { return static_cast<int>(gen_weight.rows()); }
  int num_classes() const { return static_cast<int>(classes.cols()); }

  // Same shapes, all zeros. Used for gradients.
  EncoderParams ZerosLike() const;
  bool operator==(const EncoderParams& other) const;
};

struct EncoderTrainConfig {
  double lambda_rec = 1.0;
  double learning_rate = 1e-3;
  int epochs = 10;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

struct EncoderLoss {
  double total = 0;
  double classification = 0;
  double reconstruction = 0;
};

struct EncoderGradient {
  EncoderLoss loss;
  EncoderParams grad;
};

struct EncoderTrainResult {
  EncoderParams params;
  std::vector<EncoderLoss> trace;  // one entry per epoch
};

// Weights ~ N(0, 1/fan_in), biases zero. Requires z > z' >= 1, d >= z,
// c >= 2.
EncoderParams EncoderInit(std::uint64_t seed, int z, int z_prime, int d,
                          int c);

Hypervector EncoderForward(const EncoderParams& params,
                           std::span<const double> features);
// z x M features -> D x M hypervectors.
Eigen::MatrixXd EncoderForwardBatch(const EncoderParams& params,
                                    const Eigen::MatrixXd& features);

// Labels are 0-based pseudo-class indices, one per column.
EncoderLoss EncoderLossOf(const EncoderParams& params,
                          const Eigen::MatrixXd& features,
                          std::span<const int> labels, double lambda_rec);

EncoderGradient EncoderGrad(const EncoderParams& params,
                            const Eigen::MatrixXd& features,
                            std::span<const int> labels, double lambda_rec);

// Plain minibatch gradient descent with a fixed learning rate. The sample
// order is reshuffled every epoch from config.seed. Each trace entry is the
// sample-weighted mean of the epoch's minibatch losses.
EncoderTrainResult EncoderTrain(EncoderParams params,
                                const Eigen::MatrixXd& features,
                                std::span<const int> labels,
                                const EncoderTrainConfig& config);

}  // namespace hdhash

#endif  // HDHASH_CONTEXT_ENCODER_H_
