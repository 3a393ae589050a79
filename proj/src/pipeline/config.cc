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

#include "hdhash/pipeline/config.h"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>

#include "hdhash/binary_io.h"
#include "hdhash/errors.h"
#include "hdhash/random.h"

namespace hdhash {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidArgument("config: bad value for '" + std::string(key) +
                          "': '" + std::string(value) + "'");
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
Field Member(const char* key, T PipelineConfig::*member) {
  return {[key, member](PipelineConfig& c, std::string_view v) {
            if constexpr (std::is_same_v<T, std::string>) {
              c.*member = std::string(v);
            } else {
              c.*member = ParseNumber<T>(key, v);
            }
          },
          [member](const PipelineConfig& c) {
            if constexpr (std::is_same_v<T, std::string>) {
              return c.*member;
            } else if constexpr (std::is_same_v<T, double>) {
              return FormatDouble(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field Weight(const char* key, double HashLossWeights::*member) {
  return {[key, member](PipelineConfig& c, std::string_view v) {
            c.hash_weights.*member = ParseNumber<double>(key, v);
          },
          [member](const PipelineConfig& c) {
            return FormatDouble(c.hash_weights.*member);
          }};
}

// Ordered so ToText output is stable.
const std::vector<std::pair<std::string, Field>>& Fields() {
  static const auto* fields = new std::vector<std::pair<std::string, Field>>{
      {"seed", Member("seed", &PipelineConfig::seed)},
      {"hyper_dim", Member("hyper_dim", &PipelineConfig::hyper_dim)},
      {"feature_dim", Member("feature_dim", &PipelineConfig::feature_dim)},
      {"bottleneck_dim", Member("bottleneck_dim", &PipelineConfig::bottleneck_dim)},
      {"num_classes", Member("num_classes", &PipelineConfig::num_classes)},
      {"num_bits", Member("num_bits", &PipelineConfig::num_bits)},
      {"length_scale", Member("length_scale", &PipelineConfig::length_scale)},
      {"eta_glob", Member("eta_glob", &PipelineConfig::eta_glob)},
      {"lambda_rec", Member("lambda_rec", &PipelineConfig::lambda_rec)},
      {"encoder_learning_rate",
       Member("encoder_learning_rate", &PipelineConfig::encoder_learning_rate)},
      {"encoder_epochs", Member("encoder_epochs", &PipelineConfig::encoder_epochs)},
      {"encoder_batch_size",
       Member("encoder_batch_size", &PipelineConfig::encoder_batch_size)},
      {"lambda_mse", Weight("lambda_mse", &HashLossWeights::mse)},
      {"lambda_w", Weight("lambda_w", &HashLossWeights::w)},
      {"lambda_q", Weight("lambda_q", &HashLossWeights::q)},
      {"lambda_u", Weight("lambda_u", &HashLossWeights::u)},
      {"lambda_o", Weight("lambda_o", &HashLossWeights::o)},
      {"hash_learning_rate",
       Member("hash_learning_rate", &PipelineConfig::hash_learning_rate)},
      {"hash_epochs", Member("hash_epochs", &PipelineConfig::hash_epochs)},
      {"hash_batch_size", Member("hash_batch_size", &PipelineConfig::hash_batch_size)},
      {"synth_images", Member("synth_images", &PipelineConfig::synth_images)},
      {"synth_queries", Member("synth_queries", &PipelineConfig::synth_queries)},
      {"synth_objects_min",
       Member("synth_objects_min", &PipelineConfig::synth_objects_min)},
      {"synth_objects_max",
       Member("synth_objects_max", &PipelineConfig::synth_objects_max)},
      {"synth_feature_noise",
       Member("synth_feature_noise", &PipelineConfig::synth_feature_noise)},
      {"synth_global_noise",
       Member("synth_global_noise", &PipelineConfig::synth_global_noise)},
      {"synth_image_width",
       Member("synth_image_width", &PipelineConfig::synth_image_width)},
      {"synth_image_height",
       Member("synth_image_height", &PipelineConfig::synth_image_height)},
      {"synth_layout", Member("synth_layout", &PipelineConfig::synth_layout)},
      {"synth_aligned_copies",
       Member("synth_aligned_copies", &PipelineConfig::synth_aligned_copies)},
      {"synth_permuted_copies",
       Member("synth_permuted_copies", &PipelineConfig::synth_permuted_copies)},
      {"synth_jitter", Member("synth_jitter", &PipelineConfig::synth_jitter)},
      {"eval_k", Member("eval_k", &PipelineConfig::eval_k)},
      {"eval_radii",
       {[](PipelineConfig& c, std::string_view v) {
          c.eval_radii.clear();
          while (!v.empty()) {
            const auto comma = v.find(',');
            const std::string_view item = Trim(v.substr(0, comma));
            if (!item.empty()) {
              c.eval_radii.push_back(ParseNumber<double>("eval_radii", item));
            }
            if (comma == std::string_view::npos) break;
            v.remove_prefix(comma + 1);
          }
        },
        [](const PipelineConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.eval_radii.size(); ++i) {
            if (i) out += ", ";
            out += FormatDouble(c.eval_radii[i]);
          }
          return out;
        }}},
  };
  return *fields;
}

void Require(bool ok, const char* key, const char* rule) {
  if (!ok) {
    throw InvalidArgument(std::string("config: ") + key + ": " + rule);
  }
}

}  // namespace

void PipelineConfig::Validate() const {
  Require(feature_dim > bottleneck_dim && bottleneck_dim >= 1, "bottleneck_dim",
          "need feature_dim > bottleneck_dim >= 1");
  Require(hyper_dim >= feature_dim, "hyper_dim", "need hyper_dim >= feature_dim");
  Require(num_classes >= 2, "num_classes", "need >= 2");
  Require(num_bits >= 1, "num_bits", "need >= 1");
  Require(length_scale > 0, "length_scale", "need > 0");
  Require(eta_glob > 0, "eta_glob", "need > 0");
  Require(lambda_rec >= 0, "lambda_rec", "need >= 0");
  Require(encoder_learning_rate >= 0, "encoder_learning_rate", "need >= 0");
  Require(encoder_epochs >= 1, "encoder_epochs", "need >= 1");
  Require(encoder_batch_size >= 1, "encoder_batch_size", "need >= 1");
  Require(hash_weights.mse >= 0 && hash_weights.w >= 0 && hash_weights.q >= 0 &&
              hash_weights.u >= 0 && hash_weights.o >= 0,
          "lambda_*", "need >= 0");
  Require(hash_learning_rate >= 0, "hash_learning_rate", "need >= 0");
  Require(hash_epochs >= 1, "hash_epochs", "need >= 1");
  Require(hash_batch_size >= 2, "hash_batch_size", "need >= 2");
  Require(synth_images >= 1, "synth_images", "need >= 1");
  Require(synth_queries >= 1, "synth_queries", "need >= 1");
  Require(synth_objects_min >= 0 && synth_objects_max >= synth_objects_min,
          "synth_objects_max", "need 0 <= min <= max");
  Require(synth_feature_noise >= 0, "synth_feature_noise", "need >= 0");
  Require(synth_global_noise >= 0, "synth_global_noise", "need >= 0");
  Require(synth_image_width > 0, "synth_image_width", "need > 0");
  Require(synth_image_height > 0, "synth_image_height", "need > 0");
  Require(synth_layout == "random" || synth_layout == "permuted-duplicates",
          "synth_layout", "need 'random' or 'permuted-duplicates'");
  Require(synth_aligned_copies >= 1, "synth_aligned_copies", "need >= 1");
  Require(synth_permuted_copies >= 0, "synth_permuted_copies", "need >= 0");
  Require(synth_jitter >= 0, "synth_jitter", "need >= 0");
  Require(eval_k >= 1, "eval_k", "need >= 1");
  for (const double r : eval_radii) Require(r > 0, "eval_radii", "need > 0");
}

std::string PipelineConfig::ToText() const {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    out += key + " = " + field.get(*this) + "\n";
  }
  return out;
}

void SetConfigValue(PipelineConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw InvalidArgument("config: expected key = value, got '" +
                          std::string(assignment) + "'");
  }
  const std::string key(Trim(assignment.substr(0, eq)));
  const std::string_view value = Trim(assignment.substr(eq + 1));
  for (const auto& [name, field] : Fields()) {
    if (name == key) {
      field.set(config, value);
      return;
    }
  }
  throw InvalidArgument("config: unknown key '" + key + "'");
}

PipelineConfig ParseConfig(std::string_view text, PipelineConfig base) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) SetConfigValue(base, line);
  }
  return base;
}

PipelineConfig LoadConfig(const std::filesystem::path& path,
                          PipelineConfig base) {
  return ParseConfig(ReadFile(path), std::move(base));
}

std::uint64_t StreamSeed(const PipelineConfig& config, std::string_view name) {
  return DeriveSeed(config.seed, name);
}

}  // namespace hdhash
