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

// Spatial encoding of object positions as phase vectors and the weighted
// composition of a scene's global and per-object hypervectors.
//
// A position (x, y) maps to the phase vector with elements
//   exp(i (B_X[j] x + B_Y[j] y) / w)
// where B_X, B_Y are fixed N(0, 1) bases and w is the length scale. The
// expected cosine between two encodings is the Gaussian kernel
// exp(-|dp|^2 / (2 w^2)).

#ifndef HDHASH_SPATIAL_H_
#define HDHASH_SPATIAL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hdhash/hdc.h"

namespace hdhash {

struct PositionalBasis {
  Hypervector x_axis;
  Hypervector y_axis;
  std::uint64_t seed = 0;

  std::size_t dimension() const { return x_axis.size(); }
};

// Two independent N(0, 1) bases drawn from sub-streams of `seed`.
PositionalBasis NewBasis(std::uint64_t seed, int d);

// exp(i * axis * coordinate / w).
PhaseVector EncodeAxis(const Hypervector& axis, double coordinate, double w);

PhaseVector EncodePosition(const PositionalBasis& basis, double x, double y,
                           double w);

// exp(-(dx^2 + dy^2) / (2 w^2)).
double ExpectedPositionKernel(double dx, double dy, double w);

// One object of a scene: feature hypervector, normalized box center and
// composition weight.
struct ObjectPlacement {
  Hypervector feature;
  double x = 0;
  double y = 0;
  double eta = 1.0;
};

// Complex scene representation together with its flattened real form
// Re(h) ++ Im(h).
class SceneRep {
 public:
  SceneRep() = default;
  explicit SceneRep(ComplexHypervector h);
  // Inverse of flat(); `flat` must have even length.
  static SceneRep FromFlat(std::span<const double> flat);

  const ComplexHypervector& h() const { return h_; }
  std::span<const double> flat() const { return flat_; }
  std::size_t dimension() const { return h_.size(); }

 private:
  ComplexHypervector h_;
  std::vector<double> flat_;
};

struct ComposeOptions {
  // Scale the global and every object feature to unit L2 norm first.
  bool normalize_features = false;
};

// H = eta_glob * global + sum_k eta_k * (feature_k * position_k).
SceneRep ComposeScene(const Hypervector& global,
                      std::span<const ObjectPlacement> objects,
                      double eta_glob, const PositionalBasis& basis, double w,
                      const ComposeOptions& options = {});

std::vector<double> Flatten(const SceneRep& rep);

}  // namespace hdhash

#endif  // HDHASH_SPATIAL_H_
