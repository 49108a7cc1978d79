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
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "blindspot/config.hpp"
#include "blindspot/demo_scene.hpp"
#include "blindspot/image.hpp"
#include "blindspot/samplers.hpp"

namespace blindspot::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "blindspot-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

// Small seeded generator used by the hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool coin() { return integer(0, 1) == 1; }

  PointSet points(std::size_t m, std::size_t n) {
    PointSet set{n, {}};
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> c(n);
      for (auto& v : c) v = uniform();
      set.points.push_back(ModificationPoint::unchecked(std::move(c)));
    }
    return set;
  }

  // Coordinates on a coarse grid so ties and duplicates actually occur.
  PointSet grid_points(std::size_t m, std::size_t n, int levels) {
    PointSet set{n, {}};
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> c(n);
      for (auto& v : c) v = static_cast<double>(integer(0, levels - 1)) / levels;
      set.points.push_back(ModificationPoint::unchecked(std::move(c)));
    }
    return set;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline PointSet make_set(std::size_t n, std::vector<std::vector<double>> rows) {
  PointSet set{n, {}};
  for (auto& r : rows) set.points.push_back(ModificationPoint::unchecked(std::move(r)));
  return set;
}

// Writes the procedural demo scene to `dir` and returns its spec.
inline SceneSpec write_demo_scene(const std::filesystem::path& dir, int width = 1242,
                                  int height = 375) {
  const SceneConfig s = make_demo_scene(width, height);
  std::filesystem::create_directories(dir);
  SceneSpec spec;
  spec.id = s.id;
  spec.background = dir / "background.png";
  spec.sprite = dir / "car.png";
  write_png(spec.background, *s.background);
  write_png(spec.sprite, *s.sprite);
  spec.vanish = s.vanish;
  spec.y_near = s.y_near;
  spec.x_left_near = s.x_left_near;
  spec.x_right_near = s.x_right_near;
  spec.w_near = s.w_near;
  spec.t_far = s.t_far;
  return spec;
}

// Halton campaign against the mock detector with a trial budget.
inline CampaignConfig mock_campaign(const SceneSpec& scene, std::uint64_t max_trials) {
  CampaignConfig c;
  c.scene = scene;
  c.sampler.kind = SamplerKind::kHalton;
  c.detector.kind = DetectorKind::kMock;
  c.halt.max_trials = max_trials;
  return c;
}

#ifdef FAKE_DETECTOR_PATH
inline std::string fake_detector_path() { return FAKE_DETECTOR_PATH; }
#endif

}  // namespace blindspot::testing
