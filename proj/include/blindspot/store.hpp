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
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blindspot/config.hpp"
#include "blindspot/metrics.hpp"
#include "blindspot/modspace.hpp"
#include "blindspot/render.hpp"

namespace blindspot {

/// One iteration of the analysis loop: the sampled point, where its image
/// went, what the detector said, and the derived metrics.
struct TrialRecord {
  std::uint64_t index = 0;
  ModificationPoint point;
  /// Relative to the store directory; empty when rendering failed.
  std::string image_path;
  std::optional<BoundingBox> gt_box;
  DetectionSet detections;
  double iou = 0.0;
  double confidence = 0.0;
  /// NaN for errored trials.
  double score = 0.0;
  std::optional<std::string> error;
  std::int64_t elapsed_ms = 0;
  /// Acquisition value for actively selected trials.
  std::optional<double> lcb;

  bool errored() const { return error.has_value(); }
};

nlohmann::json record_to_json(const TrialRecord& r);
/// Throws CorruptStore (without line information).
TrialRecord record_from_json(const nlohmann::json& doc);

enum class CampaignMode { kAnalyze, kFalsify };

std::string_view campaign_mode_name(CampaignMode m);

/// Immutable header of a store.
struct CampaignMetadata {
  CampaignMode mode = CampaignMode::kAnalyze;
  nlohmann::json config;  // canonical form, see config_to_json
  std::string config_hash;
  std::string tool_version;
  std::string prng;
  bool record_timing = true;
};

struct HaltInfo {
  std::string reason;
  std::uint64_t trials = 0;
};

/// Append-only campaign store: `store.ndjson` (one JSON object per line:
/// a campaign header, then trials, then optionally a halt marker) beside an
/// `images/` directory. Each line is flushed before the next trial starts.
class ResultStore {
 public:
  static constexpr const char* kFileName = "store.ndjson";
  static constexpr const char* kImageDir = "images";

  /// Fails with IoFailure if a store already exists in `dir`.
  static ResultStore create(const std::filesystem::path& dir, CampaignMetadata metadata);
  /// Loads and integrity-checks an existing store. Throws CorruptStore.
  static ResultStore open(const std::filesystem::path& dir);
  static bool exists(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  const CampaignMetadata& metadata() const { return metadata_; }
  const std::vector<TrialRecord>& records() const { return records_; }
  const std::optional<HaltInfo>& halt() const { return halt_; }
  /// Configuration recorded in the header.
  CampaignConfig config() const;

  /// Relative image path for a trial.
  static std::string image_name(std::uint64_t index);
  std::filesystem::path absolute(const std::string& relative) const { return dir_ / relative; }

  /// Throws IoFailure; the store stays valid up to the previous record.
  void append(const TrialRecord& record);
  void finish(const HaltInfo& halt);

 private:
  void write_line(const nlohmann::json& line);

  std::filesystem::path dir_;
  CampaignMetadata metadata_;
  std::vector<TrialRecord> records_;
  std::optional<HaltInfo> halt_;
};

}  // namespace blindspot
