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

// Hypervector types and the core HDC operations: bundling (elementwise
// addition), binding (elementwise product), permutation (cyclic rotation)
// and cosine similarity. Also the random-projection nonlinear encoder and
// the classic bundle-then-retrain symbolic classifier.
//
// Complex vectors are compared through their flattened real form
// Re(h) ++ Im(h), so one similarity definition serves real and complex
// operands alike.

#ifndef HDHASH_HDC_H_
#define HDHASH_HDC_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hdhash {

inline constexpr int kDefaultDimension = 10000;

using Complex = std::complex<double>;

// Real hypervector. All elements finite.
class Hypervector {
 public:
  Hypervector() = default;
  // Zero vector of length d.
  explicit Hypervector(std::size_t d) : values_(d, 0.0) {}
  explicit Hypervector(std::vector<double> values);

  static Hypervector Ones(std::size_t d);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  bool operator==(const Hypervector&) const = default;

 private:
  std::vector<double> values_;
};

// General complex hypervector, e.g. a bundle of phase vectors or a scene.
class ComplexHypervector {
 public:
  ComplexHypervector() = default;
  explicit ComplexHypervector(std::size_t d) : values_(d, Complex(0, 0)) {}
  explicit ComplexHypervector(std::vector<Complex> values)
      : values_(std::move(values)) {}
  // Real vector embedded with zero imaginary part.
  static ComplexHypervector FromReal(const Hypervector& real);

  std::size_t size() const { return values_.size(); }
  const Complex& operator[](std::size_t j) const { return values_[j]; }
  Complex& operator[](std::size_t j) { return values_[j]; }
  std::span<const Complex> values() const { return values_; }

  bool operator==(const ComplexHypervector&) const = default;

 private:
  std::vector<Complex> values_;
};

// Complex hypervector whose every element has modulus 1 (within 1e-9).
class PhaseVector {
 public:
  PhaseVector() = default;
  // Throws InvalidArgument if any element is off the unit circle.
  explicit PhaseVector(std::vector<Complex> values);

  // Element j is exp(i * angles[j]).
  static PhaseVector FromAngles(std::span<const double> angles);
  static PhaseVector Ones(std::size_t d);

  std::size_t size() const { return values_.size(); }
  const Complex& operator[](std::size_t j) const { return values_[j]; }
  std::span<const Complex> values() const { return values_; }
  ComplexHypervector ToComplex() const { return ComplexHypervector(values_); }

  bool operator==(const PhaseVector&) const = default;

 private:
  std::vector<Complex> values_;
};

// d elements i.i.d. N(0, sigma^2) from Rng(seed).
Hypervector RandomGaussianHv(std::uint64_t seed, int d, double sigma = 1.0);

Hypervector Bundle(const Hypervector& a, const Hypervector& b);
ComplexHypervector Bundle(const ComplexHypervector& a,
                          const ComplexHypervector& b);
// Phase vectors are closed under binding but not under bundling.
ComplexHypervector Bundle(const PhaseVector& a, const PhaseVector& b);

Hypervector Bind(const Hypervector& a, const Hypervector& b);
PhaseVector Bind(const PhaseVector& a, const PhaseVector& b);
ComplexHypervector Bind(const PhaseVector& a, const Hypervector& b);
ComplexHypervector Bind(const Hypervector& a, const PhaseVector& b);
ComplexHypervector Bind(const PhaseVector& a, const ComplexHypervector& b);
ComplexHypervector Bind(const ComplexHypervector& a,
                        const ComplexHypervector& b);

// Cyclic rotation: result[(j + shift) mod D] = a[j]. Negative shifts rotate
// the other way.
Hypervector Permute(const Hypervector& a, std::int64_t shift);

// Cosine of two equal-length real vectors. Throws UndefinedSimilarity if
// either has zero norm, InvalidArgument on length mismatch.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);
double CosineSimilarity(const Hypervector& a, const Hypervector& b);
// Cosine of the flattened forms; equals Re<a, b> / (|a| |b|).
double CosineSimilarity(const ComplexHypervector& a,
                        const ComplexHypervector& b);
double CosineSimilarity(const PhaseVector& a, const PhaseVector& b);

// phi(F) = cos(F B + b) * sin(F B), elementwise, with B an n x D matrix of
// N(0, 1) draws and b uniform on [0, 2 pi].
class NonlinearEncoder {
 public:
  // projection is row-major n x d.
  NonlinearEncoder(int n, int d, std::vector<double> projection,
                   std::vector<double> phase);

  static NonlinearEncoder Random(std::uint64_t seed, int n, int d);

  int input_dim() const { return n_; }
  int dimension() const { return d_; }

  Hypervector Encode(std::span<const double> features) const;

 private:
  int n_;
  int d_;
  std::vector<double> projection_;
  std::vector<double> phase_;
};

struct LabeledHypervector {
  Hypervector hv;
  int label;  // 0-based class index
};

// c class hypervectors and the retraining learning rate.
class ClassMemory {
 public:
  ClassMemory(int num_classes, int dimension, double learning_rate);

  int num_classes() const { return static_cast<int>(classes_.size()); }
  int dimension() const { return dimension_; }
  double learning_rate() const { return learning_rate_; }

  const Hypervector& class_vector(int label) const;
  Hypervector& mutable_class_vector(int label);

  // Replaces every class vector with the bundle of its samples. Every class
  // needs at least one sample.
  void InitializeByBundling(std::span<const LabeledHypervector> data);

  // One retraining step. On misprediction l' the true class moves towards
  // the sample and l' away from it, both by learning_rate * (1 - delta)
  // with delta = cos(C_label, hv). Returns whether an update happened.
  bool Retrain(const Hypervector& hv, int label);

  // Argmax of cosine similarity, lowest index on ties. Zero class vectors
  // score 0.
  int Predict(const Hypervector& query) const;

 private:
  void CheckLabel(int label) const;

  int dimension_;
  double learning_rate_;
  std::vector<Hypervector> classes_;
};

// Bundling initialization followed by `epochs` retraining passes in data
// order.
ClassMemory ClassTrain(ClassMemory memory,
                       std::span<const LabeledHypervector> data, int epochs);

int ClassInfer(const ClassMemory& memory, const Hypervector& query);

}  // namespace hdhash

#endif  // HDHASH_HDC_H_
