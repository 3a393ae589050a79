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

#include "hdhash/hdc.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hdhash/errors.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

void CheckSameLength(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw InvalidArgument(std::string(op) + ": length mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) +
                          ")");
  }
}

}  // namespace

Hypervector::Hypervector(std::vector<double> values)
    : values_(std::move(values)) {
  for (const double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("Hypervector: non-finite");
  }
}

Hypervector Hypervector::Ones(std::size_t d) {
  return Hypervector(std::vector<double>(d, 1.0));
}

ComplexHypervector ComplexHypervector::FromReal(const Hypervector& real) {
  std::vector<Complex> out(real.size());
  for (std::size_t j = 0; j < real.size(); ++j) out[j] = Complex(real[j], 0);
  return ComplexHypervector(std::move(out));
}

PhaseVector::PhaseVector(std::vector<Complex> values)
    : values_(std::move(values)) {
  for (const Complex& v : values_) {
    if (!(std::abs(std::abs(v) - 1.0) <= 1e-9)) {
      throw InvalidArgument("PhaseVector: element off the unit circle");
    }
  }
}

PhaseVector PhaseVector::FromAngles(std::span<const double> angles) {
  std::vector<Complex> out(angles.size());
  for (std::size_t j = 0; j < angles.size(); ++j) {
    out[j] = Complex(std::cos(angles[j]), std::sin(angles[j]));
  }
  return PhaseVector(std::move(out));
}

PhaseVector PhaseVector::Ones(std::size_t d) {
  return PhaseVector(std::vector<Complex>(d, Complex(1, 0)));
}

Hypervector RandomGaussianHv(std::uint64_t seed, int d, double sigma) {
  if (d < 1) throw InvalidArgument("RandomGaussianHv: d must be >= 1");
  if (!(sigma > 0)) throw InvalidArgument("RandomGaussianHv: sigma must be > 0");
  Rng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(d));
  for (double& v : out) v = sigma * rng.Normal();
  return Hypervector(std::move(out));
}

Hypervector Bundle(const Hypervector& a, const Hypervector& b) {
  CheckSameLength(a.size(), b.size(), "Bundle");
  Hypervector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

ComplexHypervector Bundle(const ComplexHypervector& a,
                          const ComplexHypervector& b) {
  CheckSameLength(a.size(), b.size(), "Bundle");
  ComplexHypervector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

ComplexHypervector Bundle(const PhaseVector& a, const PhaseVector& b) {
  return Bundle(a.ToComplex(), b.ToComplex());
}

Hypervector Bind(const Hypervector& a, const Hypervector& b) {
  CheckSameLength(a.size(), b.size(), "Bind");
  Hypervector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

PhaseVector Bind(const PhaseVector& a, const PhaseVector& b) {
  CheckSameLength(a.size(), b.size(), "Bind");
  std::vector<Complex> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return PhaseVector(std::move(out));
}

ComplexHypervector Bind(const PhaseVector& a, const Hypervector& b) {
  CheckSameLength(a.size(), b.size(), "Bind");
  ComplexHypervector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

ComplexHypervector Bind(const Hypervector& a, const PhaseVector& b) {
  return Bind(b, a);
}

ComplexHypervector Bind(const PhaseVector& a, const ComplexHypervector& b) {
  CheckSameLength(a.size(), b.size(), "Bind");
  ComplexHypervector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

ComplexHypervector Bind(const ComplexHypervector& a,
                        const ComplexHypervector& b) {
  CheckSameLength(a.size(), b.size(), "Bind");
  ComplexHypervector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

Hypervector Permute(const Hypervector& a, std::int64_t shift) {
  const auto d = static_cast<std::int64_t>(a.size());
  Hypervector out(a.size());
  if (d == 0) return out;
  const std::int64_t s = ((shift % d) + d) % d;
  for (std::int64_t j = 0; j < d; ++j) {
    out[static_cast<std::size_t>((j + s) % d)] = a[static_cast<std::size_t>(j)];
  }
  return out;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  CheckSameLength(a.size(), b.size(), "CosineSimilarity");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    dot += a[j] * b[j];
    na += a[j] * a[j];
    nb += b[j] * b[j];
  }
  if (na == 0 || nb == 0) {
    throw UndefinedSimilarity("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double CosineSimilarity(const Hypervector& a, const Hypervector& b) {
  return CosineSimilarity(a.values(), b.values());
}

double CosineSimilarity(const ComplexHypervector& a,
                        const ComplexHypervector& b) {
  CheckSameLength(a.size(), b.size(), "CosineSimilarity");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    dot += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
    na += std::norm(a[j]);
    nb += std::norm(b[j]);
  }
  if (na == 0 || nb == 0) {
    throw UndefinedSimilarity("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double CosineSimilarity(const PhaseVector& a, const PhaseVector& b) {
  return CosineSimilarity(a.ToComplex(), b.ToComplex());
}

NonlinearEncoder::NonlinearEncoder(int n, int d,
                                   std::vector<double> projection,
                                   std::vector<double> phase)
    : n_(n), d_(d), projection_(std::move(projection)),
      phase_(std::move(phase)) {
  if (n < 1 || d < 1) throw InvalidArgument("NonlinearEncoder: bad shape");
  if (projection_.size() != static_cast<std::size_t>(n) * d ||
      phase_.size() != static_cast<std::size_t>(d)) {
    throw InvalidArgument("NonlinearEncoder: parameter shape mismatch");
  }
  for (const double p : phase_) {
    if (!(p >= 0 && p <= 2 * std::numbers::pi)) {
      throw InvalidArgument("NonlinearEncoder: phase outside [0, 2pi]");
    }
  }
}

NonlinearEncoder NonlinearEncoder::Random(std::uint64_t seed, int n, int d) {
  if (n < 1 || d < 1) throw InvalidArgument("NonlinearEncoder: bad shape");
  Rng rng(seed);
  std::vector<double> projection(static_cast<std::size_t>(n) * d);
  for (double& v : projection) v = rng.Normal();
  std::vector<double> phase(static_cast<std::size_t>(d));
  for (double& v : phase) v = 2 * std::numbers::pi * rng.Uniform();
  return NonlinearEncoder(n, d, std::move(projection), std::move(phase));
}

Hypervector NonlinearEncoder::Encode(std::span<const double> features) const {
  if (features.size() != static_cast<std::size_t>(n_)) {
    throw InvalidArgument("NonlinearEncoder::Encode: expected " +
                          std::to_string(n_) + " features, got " +
                          std::to_string(features.size()));
  }
  std::vector<double> proj(static_cast<std::size_t>(d_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const double f = features[i];
    const double* row = projection_.data() + static_cast<std::size_t>(i) * d_;
    for (int j = 0; j < d_; ++j) proj[j] += f * row[j];
  }
  for (int j = 0; j < d_; ++j) {
    proj[j] = std::cos(proj[j] + phase_[j]) * std::sin(proj[j]);
  }
  return Hypervector(std::move(proj));
}

ClassMemory::ClassMemory(int num_classes, int dimension, double learning_rate)
    : dimension_(dimension), learning_rate_(learning_rate) {
  if (num_classes < 1 || dimension < 1) {
    throw InvalidArgument("ClassMemory: need >= 1 class and dimension");
  }
  if (!(learning_rate >= 0)) {
    throw InvalidArgument("ClassMemory: learning rate must be >= 0");
  }
  classes_.assign(static_cast<std::size_t>(num_classes),
                  Hypervector(static_cast<std::size_t>(dimension)));
}

void ClassMemory::CheckLabel(int label) const {
  if (label < 0 || label >= num_classes()) {
    throw InvalidArgument("ClassMemory: label " + std::to_string(label) +
                          " outside [0, " + std::to_string(num_classes()) +
                          ")");
  }
}

const Hypervector& ClassMemory::class_vector(int label) const {
  CheckLabel(label);
  return classes_[static_cast<std::size_t>(label)];
}

Hypervector& ClassMemory::mutable_class_vector(int label) {
  CheckLabel(label);
  return classes_[static_cast<std::size_t>(label)];
}

void ClassMemory::InitializeByBundling(
    std::span<const LabeledHypervector> data) {
  std::vector<Hypervector> sums(classes_.size(),
                                Hypervector(static_cast<std::size_t>(dimension_)));
  std::vector<int> counts(classes_.size(), 0);
  for (const auto& sample : data) {
    CheckLabel(sample.label);
    CheckSameLength(sample.hv.size(), static_cast<std::size_t>(dimension_),
                    "ClassMemory::InitializeByBundling");
    auto& sum = sums[static_cast<std::size_t>(sample.label)];
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += sample.hv[j];
    ++counts[static_cast<std::size_t>(sample.label)];
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) {
      throw InvalidArgument("ClassMemory: class " + std::to_string(i) +
                            " has no samples");
    }
  }
  classes_ = std::move(sums);
}

bool ClassMemory::Retrain(const Hypervector& hv, int label) {
  CheckLabel(label);
  CheckSameLength(hv.size(), static_cast<std::size_t>(dimension_),
                  "ClassMemory::Retrain");
  const int predicted = Predict(hv);
  if (predicted == label) return false;
  auto& target = classes_[static_cast<std::size_t>(label)];
  auto& wrong = classes_[static_cast<std::size_t>(predicted)];
  double delta = 0;
  try {
    delta = CosineSimilarity(target, hv);
  } catch (const UndefinedSimilarity&) {
    delta = 0;
  }
  const double step = learning_rate_ * (1.0 - delta);
  for (std::size_t j = 0; j < hv.size(); ++j) {
    target[j] += step * hv[j];
    wrong[j] -= step * hv[j];
  }
  return true;
}

int ClassMemory::Predict(const Hypervector& query) const {
  CheckSameLength(query.size(), static_cast<std::size_t>(dimension_),
                  "ClassMemory::Predict");
  int best = 0;
  double best_score = -2.0;
  for (int i = 0; i < num_classes(); ++i) {
    double score = 0;
    try {
      score = CosineSimilarity(classes_[static_cast<std::size_t>(i)], query);
    } catch (const UndefinedSimilarity&) {
      score = 0;
    }
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

ClassMemory ClassTrain(ClassMemory memory,
                       std::span<const LabeledHypervector> data, int epochs) {
  if (epochs < 0) throw InvalidArgument("ClassTrain: epochs must be >= 0");
  memory.InitializeByBundling(data);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (const auto& sample : data) memory.Retrain(sample.hv, sample.label);
  }
  return memory;
}

int ClassInfer(const ClassMemory& memory, const Hypervector& query) {
  return memory.Predict(query);
}

}  // namespace hdhash
