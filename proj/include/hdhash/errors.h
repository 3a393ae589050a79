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

#ifndef HDHASH_ERRORS_H_
#define HDHASH_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdhash {

// Precondition violations: bad shapes, out-of-range labels, malformed input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cosine similarity requested for a zero vector.
class UndefinedSimilarity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A persisted artifact failed magic, version, checksum or bounds validation.
class CorruptFile : public std::runtime_error {
 public:
  CorruptFile(std::string field, const std::string& detail)
      : std::runtime_error("corrupt file: field '" + field + "': " + detail),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Artifacts produced under different configurations were combined.
class IncompatibleArtifact : public std::runtime_error {
 public:
  explicit IncompatibleArtifact(std::vector<std::string> fields)
      : std::runtime_error(Describe(fields)), fields_(std::move(fields)) {}

  const std::vector<std::string>& fields() const { return fields_; }

 private:
  static std::string Describe(const std::vector<std::string>& fields) {
    std::string out = "incompatible artifacts, mismatched fields:";
    for (const auto& f : fields) out += " " + f;
    return out;
  }

  std::vector<std::string> fields_;
};

}  // namespace hdhash

#endif  // HDHASH_ERRORS_H_
