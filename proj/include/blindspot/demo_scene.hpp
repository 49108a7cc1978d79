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

#include "blindspot/image.hpp"
#include "blindspot/render.hpp"

namespace blindspot {

// Procedurally drawn scene assets so campaigns and tests run without an
// external image library. Both are deterministic.

/// Sky, grass verges and a road whose sidelines converge on `vanish`.
RgbImage make_road_background(int width, int height, PixelPoint vanish);

/// A side-on car silhouette (body, cabin, windows, wheels) with a
/// transparent margin around it.
RgbaImage make_car_sprite(int width, int height);

/// A ready-to-use scene: background of the given size with geometry placed
/// proportionally (vanishing point at 40% height, near baseline at 93%).
SceneConfig make_demo_scene(int width = 1242, int height = 375);

}  // namespace blindspot
