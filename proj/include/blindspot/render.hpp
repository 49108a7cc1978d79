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

#include <cstdint>
#include <memory>
#include <string>

#include "blindspot/image.hpp"
#include "blindspot/modspace.hpp"

namespace blindspot {

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box in pixel coordinates; the max edges are exclusive.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min < x_max && y_min < y_max; }
  PixelPoint center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Scene geometry: the road background, the car sprite, and the perspective
/// construction used to place the car. Images are shared, the geometry is
/// plain data.
struct SceneConfig {
  std::string id;
  std::shared_ptr<const RgbImage> background;
  std::shared_ptr<const RgbaImage> sprite;
  PixelPoint vanish;
  double y_near = 0.0;
  double x_left_near = 0.0;
  double x_right_near = 0.0;
  double w_near = 0.0;
  double t_far = 0.95;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct Placement {
  PixelPoint bottom_center;
  double width = 0.0;
  double height = 0.0;
  /// Perspective ratio in (0,1]; 1 at the near baseline.
  double ratio = 1.0;
};

/// Perspective placement of the car along the vanishing lines. Depth is
/// linear in image rows up to the t_far cutoff.
Placement place_car(const SceneConfig& scene, double mx, double mdepth);

struct Composite {
  RgbImage image;
  BoundingBox gt_box;
};

/// Resizes the sprite bilinearly, anchors it bottom-center at the placement
/// and alpha-composites it over the background. Throws DegeneratePlacement.
Composite composite(const SceneConfig& scene, const Placement& placement);

/// Minimum resized alpha (out of 255) counted as part of the car.
inline constexpr std::uint8_t kAlphaThreshold = 8;

/// Saturation, then contrast, then brightness; each parameter in [0,1] and
/// 0.5 is the identity for all three.
RgbImage apply_photometric(const RgbImage& image, double brightness, double contrast,
                           double saturation);

struct RenderedSample {
  RgbImage image;
  BoundingBox gt_box;
  ModificationPoint point;
  std::string scene_id;
  std::uint64_t index = 0;
};

/// The generation function: a pure map from a modification point to an image
/// with its ground-truth box. The contrast coordinate is inverted so that 1
/// means low contrast.
RenderedSample generate_image(const SceneConfig& scene, const ModificationSpace& space,
                              const ModificationPoint& m, std::uint64_t index = 0);

}  // namespace blindspot
