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

#include <filesystem>

#include "blindspot/config.hpp"
#include "blindspot/gp.hpp"
#include "blindspot/harness.hpp"
#include "blindspot/samplers.hpp"
#include "blindspot/store.hpp"

namespace blindspot {

/// Threshold used when the configuration does not set one.
inline constexpr double kDefaultCounterexampleThreshold = 0.5;

/// The fixed acquisition candidates: Halton points skip+1 .. skip+count.
PointSet falsifier_candidates(const CampaignConfig& config);

/// Active campaign: each trial is the GP-LCB minimizer over the candidate
/// set, with the GP refitted on every non-errored (point, score) pair seen
/// so far. Halts on a counterexample (score below threshold) or when the
/// budget is spent. Requires halt.max_trials.
CampaignOutcome falsify_loop(const CampaignConfig& config, const std::filesystem::path& out_dir,
                             const RunOptions& options = {});

namespace detail {
/// Continues an active campaign held in `store`.
CampaignOutcome continue_falsify(const CampaignConfig& config, ResultStore store,
                                 const RunOptions& options);
/// Applies the defaults an active campaign needs and validates them.
CampaignConfig prepare_falsify_config(CampaignConfig config);
}  // namespace detail

}  // namespace blindspot
