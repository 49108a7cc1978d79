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

#include "blindspot/metrics.hpp"

#include <algorithm>
#include <cctype>

#include "blindspot/errors.hpp"

namespace blindspot {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

LabelSet::LabelSet(std::initializer_list<std::string> labels)
    : LabelSet(std::vector<std::string>(labels)) {}

LabelSet::LabelSet(const std::vector<std::string>& labels) {
  for (const auto& l : labels) labels_.insert(lower(l));
}

bool LabelSet::contains(std::string_view label) const { return labels_.count(lower(label)) > 0; }

Match match_best(const BoundingBox& gt, const DetectionSet& detections, const LabelSet& car_labels) {
  Match best;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    if (!car_labels.contains(d.label)) continue;
    const double v = iou(gt, d.box);
    if (!best.index || v > best.iou || (v == best.iou && d.confidence > best.confidence)) {
      best = {i, v, d.confidence};
    }
  }
  return best;
}

std::string_view score_mode_name(ScoreMode m) {
  switch (m) {
    case ScoreMode::kProduct: return "product";
    case ScoreMode::kIou: return "iou";
    case ScoreMode::kConfidence: return "confidence";
  }
  return "?";
}

ScoreMode parse_score_mode(std::string_view name) {
  for (auto m : {ScoreMode::kProduct, ScoreMode::kIou, ScoreMode::kConfidence}) {
    if (score_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown score mode '" + std::string(name) + "'");
}

double compute_score(const Match& match, ScoreMode mode) {
  if (!match.index) return 0.0;
  switch (mode) {
    case ScoreMode::kProduct: return match.confidence * match.iou;
    case ScoreMode::kIou: return match.iou;
    case ScoreMode::kConfidence: return match.confidence;
  }
  return 0.0;
}

double compute_score(const BoundingBox& gt, const DetectionSet& detections,
                     const LabelSet& car_labels, ScoreMode mode) {
  return compute_score(match_best(gt, detections, car_labels), mode);
}

}  // namespace blindspot
