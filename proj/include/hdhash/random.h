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

#ifndef HDHASH_RANDOM_H_
#define HDHASH_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace hdhash {

// Deterministic random source used everywhere in the library.
//
// The raw stream is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniform and normal variates are derived here rather than
// through <random> distributions, whose algorithms are implementation
// defined:
//   Uniform(): top 53 bits of one draw, scaled to [0, 1).
//   Normal():  Box-Muller on two uniforms, both outputs used in turn.
//   UniformInt(n): rejection sampling on the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Normal();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Seed of an independent named sub-stream of `root`. Every consumer of
// randomness in a pipeline run derives its seed from the run's root seed
// through this function.
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view stream);

// Fisher-Yates shuffle driven by Rng::UniformInt.
template <typename T>
void Shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.UniformInt(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace hdhash

#endif  // HDHASH_RANDOM_H_
