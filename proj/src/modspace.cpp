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

#include "blindspot/modspace.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "blindspot/errors.hpp"

namespace blindspot {

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual)
    : Error("dimension mismatch: expected " + std::to_string(expected) +
            " coordinates, got " + std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

namespace {
std::string out_of_range_message(std::size_t index, double value) {
  std::ostringstream os;
  os << "coordinate " << index << " = " << value << " outside [0,1]";
  return os.str();
}
}  // namespace

OutOfRange::OutOfRange(std::size_t index, double value)
    : Error(out_of_range_message(index, value)), index_(index), value_(value) {}

CorruptStore::CorruptStore(const std::string& what, std::size_t line)
    : Error(line ? "corrupt store (line " + std::to_string(line) + "): " + what
                 : "corrupt store: " + what),
      line_(line) {}

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::kCarX: return "car_x";
    case Dimension::kCarDepth: return "car_depth";
    case Dimension::kBrightness: return "brightness";
    case Dimension::kContrast: return "contrast";
    case Dimension::kSaturation: return "saturation";
  }
  return "?";
}

Dimension parse_dimension(std::string_view name) {
  for (Dimension d : kAllDimensions) {
    if (dimension_name(d) == name) return d;
  }
  throw ConfigError("unknown dimension name '" + std::string(name) + "'");
}

ModificationPoint ModificationPoint::unchecked(std::vector<double> coords) {
  assert(std::all_of(coords.begin(), coords.end(),
                     [](double c) { return c >= 0.0 && c <= 1.0; }));
  return ModificationPoint(std::move(coords));
}

ModificationSpace::ModificationSpace(std::vector<Dimension> dims) {
  if (dims.empty() || dims.size() > kMaxDims) {
    throw ConfigError("modification space must have between 1 and 8 dimensions, got " +
                      std::to_string(dims.size()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (std::find(dims.begin(), dims.begin() + i, dims[i]) != dims.begin() + i) {
      throw ConfigError("duplicate dimension '" + std::string(dimension_name(dims[i])) + "'");
    }
    dims_.push_back({dims[i], i});
  }
  if (has(Dimension::kCarX) != has(Dimension::kCarDepth)) {
    throw ConfigError("car_x and car_depth must be declared together");
  }
}

ModificationSpace ModificationSpace::from_specs(std::vector<DimensionSpec> specs) {
  std::sort(specs.begin(), specs.end(),
            [](const DimensionSpec& a, const DimensionSpec& b) { return a.index < b.index; });
  std::vector<Dimension> dims;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].index != i) {
      throw ConfigError("dimension indices must be contiguous from 0");
    }
    dims.push_back(specs[i].dim);
  }
  return ModificationSpace(std::move(dims));
}

std::optional<std::size_t> ModificationSpace::index_of(Dimension d) const {
  for (const auto& spec : dims_) {
    if (spec.dim == d) return spec.index;
  }
  return std::nullopt;
}

ModificationPoint ModificationSpace::validate_point(std::span<const double> coords) const {
  if (coords.size() != n()) throw DimensionMismatch(n(), coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    // NaN fails both comparisons.
    if (!(coords[i] >= 0.0 && coords[i] <= 1.0)) throw OutOfRange(i, coords[i]);
  }
  return ModificationPoint(std::vector<double>(coords.begin(), coords.end()));
}

bool operator==(const ModificationSpace& a, const ModificationSpace& b) {
  if (a.n() != b.n()) return false;
  for (std::size_t i = 0; i < a.n(); ++i) {
    if (a.dims_[i].dim != b.dims_[i].dim) return false;
  }
  return true;
}

}  // namespace blindspot
