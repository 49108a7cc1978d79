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

// Writes the procedural demo scene (background.png, car.png) and a starter
// campaign configuration driving the built-in mock detector.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "blindspot/demo_scene.hpp"
#include "blindspot/errors.hpp"
#include "blindspot/image.hpp"

namespace fs = std::filesystem;
using namespace blindspot;

namespace {

std::string campaign_toml(const SceneConfig& s) {
  char buf[2048];
  std::snprintf(buf, sizeof buf,
                R"([scene]
id = "%s"
background = "background.png"
sprite = "car.png"
vanish = [%.1f, %.1f]
y_near = %.1f
x_left_near = %.1f
x_right_near = %.1f
w_near = %.1f
t_far = %.2f

[space.dims]
car_x = 0
car_depth = 1

[sampler]
kind = "halton"
seed = 0

[detector]
kind = "mock"
on_error = "continue"

[detector.mock]
base_confidence = 0.95
jitter_px = 2
seed = 7
blind_boxes = [{ lo = [0.6, 0.3], hi = [0.8, 0.5] }]

[halt]
max_trials = 200
)",
                s.id.c_str(), s.vanish.x, s.vanish.y, s.y_near, s.x_left_near, s.x_right_near,
                s.w_near, s.t_far);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the procedural demo road scene and a starter campaign.toml"};
  std::string out;
  int width = 1242;
  int height = 375;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--width", width, "Background width")->check(CLI::Range(64, 8192));
  app.add_option("--height", height, "Background height")->check(CLI::Range(64, 8192));
  CLI11_PARSE(app, argc, argv);

  try {
    const SceneConfig scene = make_demo_scene(width, height);
    fs::create_directories(out);
    write_png(fs::path(out) / "background.png", *scene.background);
    write_png(fs::path(out) / "car.png", *scene.sprite);
    std::ofstream toml(fs::path(out) / "campaign.toml", std::ios::trunc);
    toml << campaign_toml(scene);
    if (!toml) throw IoFailure("cannot write campaign.toml");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
