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

#include "blindspot/falsifier.hpp"

#include "blindspot/errors.hpp"

namespace blindspot {

PointSet falsifier_candidates(const CampaignConfig& config) {
  PointSet set{config.space.n(), {}};
  set.points.reserve(config.gp.candidate_count);
  for (std::size_t i = 0; i < config.gp.candidate_count; ++i) {
    set.points.push_back(halton_at(config.sampler.skip + 1 + i, config.space.n()));
  }
  return set;
}

namespace detail {

CampaignConfig prepare_falsify_config(CampaignConfig config) {
  if (!config.halt.threshold) config.halt.threshold = kDefaultCounterexampleThreshold;
  if (!config.halt.max_trials) {
    throw ConfigError("active falsification needs a trial budget ([halt] max_trials or --trials)");
  }
  config.validate();
  return config;
}

CampaignOutcome continue_falsify(const CampaignConfig& config, ResultStore store,
                                 const RunOptions& options) {
  HaltTracker tracker(config.halt, config.space.n(), config.on_error, std::nullopt);
  PointSet inputs{config.space.n(), {}};
  std::vector<double> observations;
  std::optional<std::string> reason;
  std::optional<std::string> error;

  auto observe = [&](const TrialRecord& r) {
    // Infrastructure failures are not evidence about the detector.
    if (!r.errored()) {
      inputs.points.push_back(r.point);
      observations.push_back(r.score);
    }
    reason = tracker.observe(r);
    if (reason && *reason == "error") error = r.error;
  };

  for (const auto& r : store.records()) {
    observe(r);
    if (reason) break;
  }

  if (!reason) {
    const TrialContext ctx = make_trial_context(config, store.dir(), store.metadata().record_timing);
    auto detector = options.detector_factory ? options.detector_factory()
                                             : make_detector(config.detector, config.space);
    const PointSet candidates = falsifier_candidates(config);
    std::uint64_t new_trials = 0;
    while (!reason) {
      if (options.interrupt_after && new_trials >= *options.interrupt_after) {
        return {std::move(store), std::nullopt, std::nullopt};
      }
      const GPModel model = gp_fit(config.gp, inputs, observations);
      const Acquisition next = acquire_lcb(model, candidates);
      TrialRecord record = execute_trial(ctx, *detector, store.records().size(), next.point);
      record.lcb = next.lcb;
      store.append(record);
      ++new_trials;
      if (options.on_trial) options.on_trial(record);
      observe(record);
    }
  }
  store.finish({*reason, store.records().size()});
  auto halt = store.halt();
  return {std::move(store), halt, error};
}

}  // namespace detail

CampaignOutcome falsify_loop(const CampaignConfig& config, const std::filesystem::path& out_dir,
                             const RunOptions& options) {
  const CampaignConfig prepared = detail::prepare_falsify_config(config);
  load_scene(prepared.scene);
  CampaignMetadata meta;
  meta.mode = CampaignMode::kFalsify;
  meta.config = config_to_json(prepared);
  meta.config_hash = config_hash(prepared);
  meta.tool_version = BLINDSPOT_VERSION;
  meta.prng = std::string(kUniformPrngId);
  meta.record_timing = options.record_timing;
  return detail::continue_falsify(prepared, ResultStore::create(out_dir, std::move(meta)), options);
}

}  // namespace blindspot
