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

#include "blindspot/demo_scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>

namespace blindspot {
namespace {

// Cheap positional hash for texture noise in [-1, 1].
double noise(int x, int y) {
  std::uint32_t h = static_cast<std::uint32_t>(x) * 374761393u +
                    static_cast<std::uint32_t>(y) * 668265263u;
  h = (h ^ (h >> 13)) * 1274126177u;
  h ^= h >> 16;
  return (h & 0xFFFF) / 32767.5 - 1.0;
}

void set_rgb(std::uint8_t* px, double r, double g, double b) {
  px[0] = static_cast<std::uint8_t>(std::clamp(std::lround(r), 0L, 255L));
  px[1] = static_cast<std::uint8_t>(std::clamp(std::lround(g), 0L, 255L));
  px[2] = static_cast<std::uint8_t>(std::clamp(std::lround(b), 0L, 255L));
}

}  // namespace

RgbImage make_road_background(int width, int height, PixelPoint vanish) {
  RgbImage img(width, height);
  const double left_bottom = 0.05 * width;
  const double right_bottom = 0.95 * width;
  for (int y = 0; y < height; ++y) {
    const double yc = y + 0.5;
    for (int x = 0; x < width; ++x) {
      const double xc = x + 0.5;
      std::uint8_t* px = img.pixel(x, y);
      if (yc <= vanish.y) {
        const double s = yc / vanish.y;
        set_rgb(px, 110 + 80 * s, 160 + 60 * s, 230 + 15 * s);
        continue;
      }
      const double r = (yc - vanish.y) / (height - vanish.y);
      const double xl = vanish.x + (left_bottom - vanish.x) * r;
      const double xr = vanish.x + (right_bottom - vanish.x) * r;
      const double n = noise(x, y);
      if (xc < xl || xc > xr) {
        set_rgb(px, 70 + 12 * n, 125 + 20 * n, 50 + 10 * n);
        continue;
      }
      const double line_w = std::max(1.0, 0.012 * width * r);
      const bool sideline = xc - xl < line_w || xr - xc < line_w;
      const double mid = 0.5 * (xl + xr);
      // Dashes repeat uniformly in 1/r, which is linear in true depth.
      const bool dash = std::fabs(xc - mid) < line_w * 0.5 &&
                        std::fmod(1.0 / std::max(r, 1e-3), 0.8) < 0.4;
      if (sideline || dash) {
        set_rgb(px, 225 + 10 * n, 225 + 10 * n, 215 + 10 * n);
      } else {
        set_rgb(px, 95 + 8 * n, 95 + 8 * n, 100 + 8 * n);
      }
    }
  }
  return img;
}

RgbaImage make_car_sprite(int width, int height) {
  RgbaImage img(width, height);
  const double w = width;
  const double h = height;
  const double margin = std::max(1.0, w / 40.0);
  const double wheel_r = 0.14 * h;
  const double wheel_y = h - margin - wheel_r;
  const double wheel_xs[2] = {0.24 * w, 0.76 * w};

  for (int y = 0; y < height; ++y) {
    const double yc = y + 0.5;
    for (int x = 0; x < width; ++x) {
      const double xc = x + 0.5;
      std::uint8_t* px = img.pixel(x, y);
      bool drawn = false;
      double r = 0, g = 0, b = 0;

      const bool body = xc >= margin && xc <= w - margin && yc >= 0.45 * h && yc <= wheel_y;
      const double cabin_t = (yc - 0.12 * h) / (0.33 * h);
      const double cabin_l = 0.32 * w - 0.08 * w * cabin_t;
      const double cabin_r = 0.66 * w + 0.1 * w * cabin_t;
      const bool cabin = cabin_t >= 0.0 && cabin_t <= 1.0 && xc >= cabin_l && xc <= cabin_r;
      if (body || cabin) {
        drawn = true;
        r = 175;
        g = 28;
        b = 32;
        const bool window = cabin && cabin_t > 0.15 && cabin_t < 0.9 &&
                            xc > cabin_l + 0.03 * w && xc < cabin_r - 0.03 * w &&
                            std::fabs(xc - 0.5 * (cabin_l + cabin_r)) > 0.012 * w;
        if (window) {
          r = 150;
          g = 190;
          b = 215;
        }
        if (body && yc > 0.62 * h && yc < 0.65 * h) {
          r = 120;
          g = 20;
          b = 22;
        }
      }
      for (double wx : wheel_xs) {
        const double d = std::hypot(xc - wx, yc - wheel_y);
        if (d <= wheel_r) {
          drawn = true;
          const bool hub = d <= 0.45 * wheel_r;
          r = g = b = hub ? 160 : 30;
        }
      }
      if (drawn) {
        set_rgb(px, r, g, b);
        px[3] = 255;
      }
    }
  }
  return img;
}

SceneConfig make_demo_scene(int width, int height) {
  SceneConfig scene;
  scene.id = "demo-road";
  scene.vanish = {0.5 * width, std::round(0.4 * height)};
  scene.background =
      std::make_shared<const RgbImage>(make_road_background(width, height, scene.vanish));
  scene.sprite = std::make_shared<const RgbaImage>(make_car_sprite(160, 80));
  scene.y_near = std::round(0.93 * height);
  scene.w_near = std::round(0.2 * width);
  const double r = (scene.y_near - scene.vanish.y) / (height - scene.vanish.y);
  const double road_l = scene.vanish.x + (0.05 * width - scene.vanish.x) * r;
  const double road_r = scene.vanish.x + (0.95 * width - scene.vanish.x) * r;
  scene.x_left_near = std::round(road_l + scene.w_near / 2.0);
  scene.x_right_near = std::round(road_r - scene.w_near / 2.0);
  scene.t_far = 0.95;
  return scene;
}

}  // namespace blindspot
