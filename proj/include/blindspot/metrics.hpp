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

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "blindspot/render.hpp"

namespace blindspot {

struct Detection {
  std::string label;
  double confidence = 0.0;
  BoundingBox box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

using DetectionSet = std::vector<Detection>;

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Case-insensitive label set.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<std::string> labels);
  explicit LabelSet(const std::vector<std::string>& labels);

  bool contains(std::string_view label) const;
  std::vector<std::string> labels() const { return {labels_.begin(), labels_.end()}; }

 private:
  std::set<std::string> labels_;  // lower-cased
};

struct Match {
  std::optional<std::size_t> index;  // into the DetectionSet
  double iou = 0.0;
  double confidence = 0.0;
};

/// Best car-labeled detection by IOU with the ground truth; ties go to
/// higher confidence, then lower index.
Match match_best(const BoundingBox& gt, const DetectionSet& detections, const LabelSet& car_labels);

enum class ScoreMode { kProduct, kIou, kConfidence };

std::string_view score_mode_name(ScoreMode m);
ScoreMode parse_score_mode(std::string_view name);

/// Scalar trial score in [0,1]; 0 when no car-labeled detection exists.
double compute_score(const Match& match, ScoreMode mode = ScoreMode::kProduct);
double compute_score(const BoundingBox& gt, const DetectionSet& detections,
                     const LabelSet& car_labels, ScoreMode mode = ScoreMode::kProduct);

}  // namespace blindspot
