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

#include "hdhash/spatial.h"

#include <cmath>
#include <string>

#include "hdhash/errors.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

void CheckLengthScale(double w) {
  if (!(w > 0) || !std::isfinite(w)) {
    throw InvalidArgument("length scale w must be > 0");
  }
}

Hypervector UnitNormalized(const Hypervector& v) {
  double norm = 0;
  for (const double x : v.values()) norm += x * x;
  if (norm == 0) return v;
  norm = std::sqrt(norm);
  Hypervector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j] / norm;
  return out;
}

}  // namespace

PositionalBasis NewBasis(std::uint64_t seed, int d) {
  if (d < 1) throw InvalidArgument("NewBasis: d must be >= 1");
  return PositionalBasis{
      .x_axis = RandomGaussianHv(DeriveSeed(seed, "basis/x"), d, 1.0),
      .y_axis = RandomGaussianHv(DeriveSeed(seed, "basis/y"), d, 1.0),
      .seed = seed,
  };
}

PhaseVector EncodeAxis(const Hypervector& axis, double coordinate, double w) {
  CheckLengthScale(w);
  std::vector<double> angles(axis.size());
  for (std::size_t j = 0; j < axis.size(); ++j) {
    angles[j] = axis[j] * coordinate / w;
  }
  return PhaseVector::FromAngles(angles);
}

PhaseVector EncodePosition(const PositionalBasis& basis, double x, double y,
                           double w) {
  CheckLengthScale(w);
  std::vector<double> angles(basis.dimension());
  for (std::size_t j = 0; j < angles.size(); ++j) {
    angles[j] = (basis.x_axis[j] * x + basis.y_axis[j] * y) / w;
  }
  return PhaseVector::FromAngles(angles);
}

double ExpectedPositionKernel(double dx, double dy, double w) {
  CheckLengthScale(w);
  return std::exp(-(dx * dx + dy * dy) / (2 * w * w));
}

SceneRep::SceneRep(ComplexHypervector h) : h_(std::move(h)) {
  const std::size_t d = h_.size();
  flat_.resize(2 * d);
  for (std::size_t j = 0; j < d; ++j) {
    flat_[j] = h_[j].real();
    flat_[d + j] = h_[j].imag();
  }
}

SceneRep SceneRep::FromFlat(std::span<const double> flat) {
  if (flat.size() % 2 != 0) {
    throw InvalidArgument("SceneRep::FromFlat: odd length");
  }
  const std::size_t d = flat.size() / 2;
  std::vector<Complex> h(d);
  for (std::size_t j = 0; j < d; ++j) h[j] = Complex(flat[j], flat[d + j]);
  return SceneRep(ComplexHypervector(std::move(h)));
}

SceneRep ComposeScene(const Hypervector& global,
                      std::span<const ObjectPlacement> objects,
                      double eta_glob, const PositionalBasis& basis, double w,
                      const ComposeOptions& options) {
  CheckLengthScale(w);
  const std::size_t d = basis.dimension();
  if (global.size() != d) {
    throw InvalidArgument("ComposeScene: global feature has length " +
                          std::to_string(global.size()) + ", basis has " +
                          std::to_string(d));
  }
  if (!(eta_glob > 0)) throw InvalidArgument("ComposeScene: eta_glob must be > 0");

  const Hypervector g =
      options.normalize_features ? UnitNormalized(global) : global;
  std::vector<Complex> h(d);
  for (std::size_t j = 0; j < d; ++j) h[j] = Complex(eta_glob * g[j], 0);

  for (std::size_t k = 0; k < objects.size(); ++k) {
    const ObjectPlacement& obj = objects[k];
    if (obj.feature.size() != d) {
      throw InvalidArgument("ComposeScene: object " + std::to_string(k) +
                            " feature has length " +
                            std::to_string(obj.feature.size()));
    }
    if (!(obj.eta > 0)) {
      throw InvalidArgument("ComposeScene: object eta must be > 0");
    }
    if (!(obj.x >= 0 && obj.x <= 1 && obj.y >= 0 && obj.y <= 1)) {
      throw InvalidArgument("ComposeScene: object position outside [0,1]^2");
    }
    const Hypervector f =
        options.normalize_features ? UnitNormalized(obj.feature) : obj.feature;
    const ComplexHypervector bound =
        Bind(f, EncodePosition(basis, obj.x, obj.y, w));
    for (std::size_t j = 0; j < d; ++j) h[j] += obj.eta * bound[j];
  }
  return SceneRep(ComplexHypervector(std::move(h)));
}

std::vector<double> Flatten(const SceneRep& rep) {
  return {rep.flat().begin(), rep.flat().end()};
}

}  // namespace hdhash
