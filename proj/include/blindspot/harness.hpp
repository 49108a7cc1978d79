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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blindspot/config.hpp"
#include "blindspot/detector.hpp"
#include "blindspot/samplers.hpp"
#include "blindspot/store.hpp"

namespace blindspot {

using DetectorFactory = std::function<std::unique_ptr<Detector>()>;

struct RunOptions {
  /// Passive campaigns only; active campaigns are sequential.
  std::size_t workers = 1;
  /// When false, elapsed_ms is recorded as 0 so stores are byte-reproducible.
  bool record_timing = true;
  /// Overrides the configured detector (one instance per worker).
  DetectorFactory detector_factory;
  /// Stop after this many new trials without writing a halt marker, as if
  /// the process had been killed. Used to exercise resume.
  std::optional<std::uint64_t> interrupt_after;
  std::function<void(const TrialRecord&)> on_trial;
};

struct CampaignOutcome {
  ResultStore store;
  /// Empty when the run was interrupted.
  std::optional<HaltInfo> halt;
  /// Set when the error policy stopped the campaign.
  std::optional<std::string> error;
};

/// Everything a trial needs that does not change between trials.
struct TrialContext {
  SceneConfig scene;
  ModificationSpace space;
  LabelSet car_labels;
  ScoreMode score_mode = ScoreMode::kProduct;
  std::filesystem::path store_dir;
  bool record_timing = true;
};

TrialContext make_trial_context(const CampaignConfig& config, const std::filesystem::path& store_dir,
                                bool record_timing);

/// Renders, persists the image, queries the detector and scores one trial.
/// Render and detector failures become errored records; I/O failures throw.
TrialRecord execute_trial(const TrialContext& ctx, Detector& detector, std::uint64_t index,
                          const ModificationPoint& point);

/// Evaluates the halting disjunction after every appended trial.
class HaltTracker {
 public:
  HaltTracker(const HaltCondition& halt, std::size_t n, ErrorPolicy on_error,
              std::optional<std::uint64_t> sampler_size);
  /// Reason the campaign must stop after this trial, if any.
  std::optional<std::string> observe(const TrialRecord& record);

 private:
  HaltCondition halt_;
  ErrorPolicy on_error_;
  std::optional<std::uint64_t> sampler_size_;
  std::optional<CoverageGrid> coverage_;
  std::uint64_t trials_ = 0;
};

/// Passive campaign: sample -> generate -> detect -> record until a halting
/// condition holds. Creates the store in `out_dir`.
CampaignOutcome run_campaign(const CampaignConfig& config, const std::filesystem::path& out_dir,
                             const RunOptions& options = {});

/// Continues an interrupted campaign (passive or active) from its last
/// flushed record. When `expected` is given its hash must match the stored
/// one (CorruptStore otherwise). A finished store returns immediately.
CampaignOutcome resume_campaign(const std::filesystem::path& out_dir, const RunOptions& options = {},
                                const CampaignConfig* expected = nullptr);

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t errored = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Replays every stored point through render and metrics and compares with
/// the stored record: ground-truth box, image bytes (optional), IOU,
/// confidence and score must match exactly. Passive stores also check the
/// point against the sampler stream.
VerifyReport verify_store(const ResultStore& store, bool check_images = true);

}  // namespace blindspot
