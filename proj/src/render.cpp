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

#include "blindspot/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "blindspot/errors.hpp"

namespace blindspot {
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Bilinear sample of channel c at continuous source coordinates.
double sample_bilinear(const RgbaImage& src, double sx, double sy, int c) {
  sx = std::clamp(sx, 0.0, static_cast<double>(src.width() - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(src.height() - 1));
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const int x1 = std::min(x0 + 1, src.width() - 1);
  const int y1 = std::min(y0 + 1, src.height() - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const double top = src.pixel(x0, y0)[c] * (1.0 - fx) + src.pixel(x1, y0)[c] * fx;
  const double bottom = src.pixel(x0, y1)[c] * (1.0 - fx) + src.pixel(x1, y1)[c] * fx;
  return top * (1.0 - fy) + bottom * fy;
}

RgbaImage resize_bilinear(const RgbaImage& src, int width, int height) {
  RgbaImage out(width, height);
  const double scale_x = static_cast<double>(src.width()) / width;
  const double scale_y = static_cast<double>(src.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double sy = (y + 0.5) * scale_y - 0.5;
    for (int x = 0; x < width; ++x) {
      const double sx = (x + 0.5) * scale_x - 0.5;
      std::uint8_t* px = out.pixel(x, y);
      for (int c = 0; c < 4; ++c) px[c] = to_byte(sample_bilinear(src, sx, sy, c));
    }
  }
  return out;
}

}  // namespace

void SceneConfig::validate() const {
  if (!background || background->empty()) throw ConfigError("scene: background image missing");
  if (!sprite || sprite->empty()) throw ConfigError("scene: sprite image missing");
  const double w = background->width();
  const double h = background->height();
  if (!(vanish.y < y_near && y_near <= h - 1)) {
    throw ConfigError("scene: require vanish.y < y_near <= background height - 1");
  }
  if (!(0.0 <= x_left_near && x_left_near < x_right_near && x_right_near <= w - 1)) {
    throw ConfigError("scene: require 0 <= x_left_near < x_right_near <= background width - 1");
  }
  if (!(w_near >= 8.0)) throw ConfigError("scene: w_near must be >= 8");
  if (!(t_far > 0.0 && t_far < 1.0)) throw ConfigError("scene: t_far must lie in (0,1)");
  const auto alpha = sprite->bytes();
  bool visible = false;
  for (std::size_t i = 3; i < alpha.size(); i += 4) {
    if (alpha[i] > 0) {
      visible = true;
      break;
    }
  }
  if (!visible) throw ConfigError("scene: sprite is fully transparent");
}

Placement place_car(const SceneConfig& scene, double mx, double mdepth) {
  const double t = mdepth * scene.t_far;
  const double y_b = scene.y_near + t * (scene.vanish.y - scene.y_near);
  const double r = (y_b - scene.vanish.y) / (scene.y_near - scene.vanish.y);
  const double x_left = scene.vanish.x + (scene.x_left_near - scene.vanish.x) * r;
  const double x_right = scene.vanish.x + (scene.x_right_near - scene.vanish.x) * r;

  Placement p;
  p.ratio = r;
  p.bottom_center = {x_left + mx * (x_right - x_left), y_b};
  p.width = scene.w_near * r;
  p.height = p.width * static_cast<double>(scene.sprite->height()) / scene.sprite->width();
  return p;
}

Composite composite(const SceneConfig& scene, const Placement& placement) {
  const long width = std::lround(placement.width);
  const long height = std::lround(placement.height);
  if (width < 2 || height < 2) {
    throw DegeneratePlacement("car sprite would be " + std::to_string(width) + "x" +
                              std::to_string(height) + " px");
  }
  const RgbaImage car = resize_bilinear(*scene.sprite, static_cast<int>(width),
                                        static_cast<int>(height));
  const long left = std::lround(placement.bottom_center.x - placement.width / 2.0);
  const long top = std::lround(placement.bottom_center.y) - height;

  Composite out{*scene.background, {}};
  RgbImage& img = out.image;
  long bx0 = img.width(), by0 = img.height(), bx1 = -1, by1 = -1;
  for (long dy = 0; dy < height; ++dy) {
    const long y = top + dy;
    if (y < 0 || y >= img.height()) continue;
    for (long dx = 0; dx < width; ++dx) {
      const long x = left + dx;
      if (x < 0 || x >= img.width()) continue;
      const std::uint8_t* src = car.pixel(static_cast<int>(dx), static_cast<int>(dy));
      // Sub-threshold halo pixels are not composited, so the box covers
      // everything that was drawn.
      if (src[3] < kAlphaThreshold) continue;
      const double a = src[3] / 255.0;
      std::uint8_t* dst = img.pixel(static_cast<int>(x), static_cast<int>(y));
      for (int c = 0; c < 3; ++c) dst[c] = to_byte(a * src[c] + (1.0 - a) * dst[c]);
      bx0 = std::min(bx0, x);
      by0 = std::min(by0, y);
      bx1 = std::max(bx1, x);
      by1 = std::max(by1, y);
    }
  }
  if (bx1 < bx0 || by1 < by0) {
    throw DegeneratePlacement("car sprite falls entirely outside the image");
  }
  out.gt_box = {static_cast<double>(bx0), static_cast<double>(by0),
                static_cast<double>(bx1 + 1), static_cast<double>(by1 + 1)};
  return out;
}

RgbImage apply_photometric(const RgbImage& image, double brightness, double contrast,
                           double saturation) {
  RgbImage out = image;
  const double sat_gain = 2.0 * saturation;
  const double alpha = std::exp2(2.0 * contrast - 1.0);
  const long offset = std::lround((2.0 * brightness - 1.0) * 64.0);
  // Contrast and brightness act per byte value; fold both into one table.
  std::array<std::uint8_t, 256> tone{};
  for (int v = 0; v < 256; ++v) {
    const std::uint8_t c = to_byte(alpha * (v - 128.0) + 128.0);
    tone[v] = to_byte(static_cast<double>(c) + offset);
  }
  auto px = out.bytes();
  // At unit gain the saturation stage reproduces its input exactly.
  const bool saturate = sat_gain != 1.0;
  for (std::size_t i = 0; i < px.size(); i += 3) {
    if (saturate) {
      const double luma = 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
      for (std::size_t c = 0; c < 3; ++c) px[i + c] = to_byte(luma + sat_gain * (px[i + c] - luma));
    }
    for (std::size_t c = 0; c < 3; ++c) px[i + c] = tone[px[i + c]];
  }
  return out;
}

RenderedSample generate_image(const SceneConfig& scene, const ModificationSpace& space,
                              const ModificationPoint& m, std::uint64_t index) {
  if (m.size() != space.n()) throw DimensionMismatch(space.n(), m.size());
  auto coord = [&](Dimension d, double fallback) {
    const auto i = space.index_of(d);
    return i ? m[*i] : fallback;
  };
  const Placement placement =
      place_car(scene, coord(Dimension::kCarX, 0.5), coord(Dimension::kCarDepth, 0.0));
  Composite comp = composite(scene, placement);
  RenderedSample sample;
  sample.image = apply_photometric(comp.image, coord(Dimension::kBrightness, 0.5),
                                   1.0 - coord(Dimension::kContrast, 0.5),
                                   coord(Dimension::kSaturation, 0.5));
  sample.gt_box = comp.gt_box;
  sample.point = m;
  sample.scene_id = scene.id;
  sample.index = index;
  return sample;
}

}  // namespace blindspot
