/*
 * Copyright 2026 The Blindspot Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blindspot {

/// The fixed vocabulary of scene parameters a dimension can drive.
enum class Dimension { kCarX, kCarDepth, kBrightness, kContrast, kSaturation };

inline constexpr std::array<Dimension, 5> kAllDimensions = {
    Dimension::kCarX, Dimension::kCarDepth, Dimension::kBrightness,
    Dimension::kContrast, Dimension::kSaturation};

std::string_view dimension_name(Dimension d);
/// Throws ConfigError for names outside the vocabulary.
Dimension parse_dimension(std::string_view name);

struct DimensionSpec {
  Dimension dim;
  std::size_t index;
};

/// A validated point of the unit hypercube [0,1]^n. Only obtainable through
/// ModificationSpace::validate_point (or the unchecked factory used by
/// samplers that construct in-range coordinates by definition).
class ModificationPoint {
 public:
  ModificationPoint() = default;

  std::span<const double> coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const ModificationPoint&, const ModificationPoint&) = default;

  /// Asserts (in debug builds) but does not validate; callers guarantee the
  /// coordinates lie in [0,1].
  static ModificationPoint unchecked(std::vector<double> coords);

 private:
  explicit ModificationPoint(std::vector<double> coords) : coords_(std::move(coords)) {}
  friend class ModificationSpace;

  std::vector<double> coords_;
};

/// Named-dimension unit hypercube M = [0,1]^n with 1 <= n <= 8.
class ModificationSpace {
 public:
  static constexpr std::size_t kMaxDims = 8;

  /// Dimensions are indexed by their position in `dims`. Throws ConfigError
  /// on duplicates, n outside [1,8], or car_x without car_depth (and vice
  /// versa).
  explicit ModificationSpace(std::vector<Dimension> dims);

  /// Builds from (name, index) pairs as read from a configuration file;
  /// indices must be contiguous from 0.
  static ModificationSpace from_specs(std::vector<DimensionSpec> specs);

  std::size_t n() const { return dims_.size(); }
  const std::vector<DimensionSpec>& dims() const { return dims_; }
  std::optional<std::size_t> index_of(Dimension d) const;
  bool has(Dimension d) const { return index_of(d).has_value(); }

  /// Throws DimensionMismatch or OutOfRange.
  ModificationPoint validate_point(std::span<const double> coords) const;

  friend bool operator==(const ModificationSpace& a, const ModificationSpace& b);

 private:
  std::vector<DimensionSpec> dims_;
};

}  // namespace blindspot
