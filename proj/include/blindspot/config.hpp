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
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "blindspot/detector.hpp"
#include "blindspot/gp.hpp"
#include "blindspot/metrics.hpp"
#include "blindspot/modspace.hpp"
#include "blindspot/render.hpp"
#include "blindspot/samplers.hpp"

namespace blindspot {

/// Scene as declared in a configuration file: image paths plus geometry.
struct SceneSpec {
  std::string id = "scene";
  std::filesystem::path background;
  std::filesystem::path sprite;
  PixelPoint vanish;
  double y_near = 0.0;
  double x_left_near = 0.0;
  double x_right_near = 0.0;
  double w_near = 0.0;
  double t_far = 0.95;
};

/// Reads both images and validates the geometry.
SceneConfig load_scene(const SceneSpec& spec);

/// Disjunction of halting conditions; absent members are disabled.
struct HaltCondition {
  std::optional<double> threshold;           // counterexample: score < threshold
  std::optional<std::uint64_t> max_trials;   // trial budget
  std::optional<double> coverage_target;     // grid coverage in (0,1]
  std::size_t coverage_bins = 10;

  void validate(std::size_t n) const;
};

struct ScoreSpec {
  ScoreMode mode = ScoreMode::kProduct;
  std::vector<std::string> car_labels = {"car"};
};

enum class ErrorPolicy { kContinue, kHalt };

struct CampaignConfig {
  SceneSpec scene;
  ModificationSpace space{{Dimension::kCarX, Dimension::kCarDepth}};
  SamplerSpec sampler;
  DetectorEndpoint detector;
  ErrorPolicy on_error = ErrorPolicy::kContinue;
  HaltCondition halt;
  GPConfig gp;
  ScoreSpec score;

  void validate() const;
};

/// Parses a TOML campaign file. Relative image paths resolve against the
/// file's directory. Throws ConfigError.
CampaignConfig load_config(const std::filesystem::path& path);
CampaignConfig parse_config_toml(std::string_view text, const std::filesystem::path& base_dir);

/// Canonical JSON form: every field present, paths absolute. This is what
/// campaign stores record and what the config hash covers.
nlohmann::json config_to_json(const CampaignConfig& config);
CampaignConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});

/// Hex SHA-256 of the canonical JSON dump.
std::string config_hash(const CampaignConfig& config);

}  // namespace blindspot
