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

#include "blindspot/harness.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "blindspot/errors.hpp"
#include "blindspot/falsifier.hpp"
#include "blindspot/image.hpp"

namespace blindspot {
namespace {

CampaignMetadata make_metadata(const CampaignConfig& config, CampaignMode mode,
                               const RunOptions& options) {
  CampaignMetadata m;
  m.mode = mode;
  m.config = config_to_json(config);
  m.config_hash = config_hash(config);
  m.tool_version = BLINDSPOT_VERSION;
  m.prng = std::string(kUniformPrngId);
  m.record_timing = options.record_timing;
  return m;
}

std::vector<std::unique_ptr<Detector>> make_detectors(const CampaignConfig& config,
                                                      const RunOptions& options, std::size_t count) {
  std::vector<std::unique_ptr<Detector>> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(options.detector_factory ? options.detector_factory()
                                           : make_detector(config.detector, config.space));
  }
  return out;
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

CampaignOutcome continue_passive(const CampaignConfig& config, ResultStore store,
                                 const RunOptions& options) {
  const Sampler sampler(config.sampler, config.space.n());
  HaltTracker tracker(config.halt, config.space.n(), config.on_error, sampler.size());
  std::optional<std::string> reason;
  std::optional<std::string> error;
  for (const auto& r : store.records()) {
    reason = tracker.observe(r);
    if (reason) {
      if (*reason == "error") error = r.error;
      break;
    }
  }
  if (reason) {
    store.finish({*reason, store.records().size()});
    auto halt = store.halt();
    return {std::move(store), halt, error};
  }

  const TrialContext ctx =
      make_trial_context(config, store.dir(), store.metadata().record_timing);
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  auto detectors = make_detectors(config, options, workers);
  std::uint64_t new_trials = 0;

  for (;;) {
    const std::uint64_t next = store.records().size();
    std::uint64_t batch = workers;
    if (options.interrupt_after) {
      if (new_trials >= *options.interrupt_after) return {std::move(store), std::nullopt, std::nullopt};
      batch = std::min(batch, *options.interrupt_after - new_trials);
    }
    if (config.halt.max_trials) batch = std::min(batch, *config.halt.max_trials - next);
    if (const auto size = sampler.size()) batch = std::min(batch, *size - next);

    std::vector<std::optional<TrialRecord>> results(batch);
    std::vector<std::exception_ptr> failures(batch);
    auto work = [&](std::size_t slot) {
      try {
        results[slot] = execute_trial(ctx, *detectors[slot], next + slot, sampler.at(next + slot));
      } catch (...) {
        failures[slot] = std::current_exception();
      }
    };
    if (batch == 1) {
      work(0);
    } else {
      std::vector<std::jthread> threads;
      for (std::size_t slot = 0; slot < batch; ++slot) threads.emplace_back(work, slot);
    }

    for (std::size_t slot = 0; slot < batch; ++slot) {
      if (failures[slot]) std::rethrow_exception(failures[slot]);
      const TrialRecord& record = *results[slot];
      store.append(record);
      ++new_trials;
      if (options.on_trial) options.on_trial(record);
      reason = tracker.observe(record);
      if (reason) {
        if (*reason == "error") error = record.error;
        // Speculative trials past the halting point are discarded.
        for (std::size_t later = slot + 1; later < batch; ++later) {
          if (results[later] && !results[later]->image_path.empty()) {
            std::error_code ec;
            std::filesystem::remove(store.absolute(results[later]->image_path), ec);
          }
        }
        store.finish({*reason, store.records().size()});
        auto halt = store.halt();
        return {std::move(store), halt, error};
      }
    }
  }
}

}  // namespace

TrialContext make_trial_context(const CampaignConfig& config, const std::filesystem::path& store_dir,
                                bool record_timing) {
  return {load_scene(config.scene), config.space, LabelSet(config.score.car_labels),
          config.score.mode, store_dir, record_timing};
}

TrialRecord execute_trial(const TrialContext& ctx, Detector& detector, std::uint64_t index,
                          const ModificationPoint& point) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord r;
  r.index = index;
  r.point = point;
  auto mark_error = [&](const std::string& message) {
    r.error = message;
    r.iou = r.confidence = r.score = std::nan("");
  };

  std::optional<RenderedSample> sample;
  try {
    sample = generate_image(ctx.scene, ctx.space, point, index);
  } catch (const DegeneratePlacement& e) {
    mark_error(std::string("render: ") + e.what());
  }
  if (sample) {
    r.gt_box = sample->gt_box;
    r.image_path = ResultStore::image_name(index);
    write_png(ctx.store_dir / r.image_path, sample->image);
    try {
      r.detections = detector.detect(*sample, ctx.store_dir / r.image_path);
      const Match m = match_best(sample->gt_box, r.detections, ctx.car_labels);
      r.iou = m.iou;
      r.confidence = m.confidence;
      r.score = compute_score(m, ctx.score_mode);
    } catch (const DetectorError& e) {
      r.detections.clear();
      mark_error(std::string("detector: ") + e.what());
    }
  }
  if (ctx.record_timing) {
    r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  }
  return r;
}

HaltTracker::HaltTracker(const HaltCondition& halt, std::size_t n, ErrorPolicy on_error,
                         std::optional<std::uint64_t> sampler_size)
    : halt_(halt), on_error_(on_error), sampler_size_(sampler_size) {
  if (halt_.coverage_target) coverage_.emplace(n, halt_.coverage_bins);
}

std::optional<std::string> HaltTracker::observe(const TrialRecord& record) {
  ++trials_;
  if (coverage_) coverage_->add(record.point);
  if (record.errored() && on_error_ == ErrorPolicy::kHalt) return "error";
  if (halt_.threshold && !record.errored() && record.score < *halt_.threshold) {
    return "counterexample";
  }
  if (coverage_ && coverage_->coverage() >= *halt_.coverage_target) return "coverage";
  if (halt_.max_trials && trials_ >= *halt_.max_trials) return "max_trials";
  if (sampler_size_ && trials_ >= *sampler_size_) return "sampler_exhausted";
  return std::nullopt;
}

CampaignOutcome run_campaign(const CampaignConfig& config, const std::filesystem::path& out_dir,
                             const RunOptions& options) {
  config.validate();
  load_scene(config.scene);  // fail before creating the store
  ResultStore store =
      ResultStore::create(out_dir, make_metadata(config, CampaignMode::kAnalyze, options));
  return continue_passive(config, std::move(store), options);
}

CampaignOutcome resume_campaign(const std::filesystem::path& out_dir, const RunOptions& options,
                                const CampaignConfig* expected) {
  ResultStore store = ResultStore::open(out_dir);
  CampaignConfig config = store.config();
  if (expected) {
    CampaignConfig wanted = *expected;
    if (store.metadata().mode == CampaignMode::kFalsify) {
      wanted = detail::prepare_falsify_config(std::move(wanted));
    }
    const std::string hash = config_hash(wanted);
    if (hash != store.metadata().config_hash) {
      throw CorruptStore("configuration does not match the stored campaign (hash " + hash +
                         " vs " + store.metadata().config_hash + ")");
    }
  }
  if (auto halt = store.halt()) return {std::move(store), halt, std::nullopt};
  if (store.metadata().mode == CampaignMode::kFalsify) {
    return detail::continue_falsify(config, std::move(store), options);
  }
  return continue_passive(config, std::move(store), options);
}

VerifyReport verify_store(const ResultStore& store, bool check_images) {
  VerifyReport report;
  const CampaignConfig config = store.config();
  const SceneConfig scene = load_scene(config.scene);
  const LabelSet labels(config.score.car_labels);
  std::optional<Sampler> sampler;
  if (store.metadata().mode == CampaignMode::kAnalyze) sampler.emplace(config.sampler, config.space.n());

  auto fail = [&](const TrialRecord& r, const std::string& what) {
    report.mismatches.push_back("trial " + std::to_string(r.index) + ": " + what);
  };

  for (const auto& r : store.records()) {
    if (sampler && !(sampler->at(r.index) == r.point)) fail(r, "point differs from sampler stream");
    if (r.point.size() != config.space.n()) {
      fail(r, "point has wrong dimension");
      continue;
    }
    std::optional<RenderedSample> sample;
    try {
      sample = generate_image(scene, config.space, r.point, r.index);
    } catch (const DegeneratePlacement&) {
    }
    if (!sample) {
      if (!r.errored() || !r.image_path.empty()) fail(r, "point no longer renders");
      ++report.errored;
      continue;
    }
    if (!r.gt_box || !(*r.gt_box == sample->gt_box)) fail(r, "ground-truth box differs");
    if (check_images) {
      if (r.image_path.empty()) {
        fail(r, "renderable trial has no image");
      } else if (encode_png(sample->image) != read_file_bytes(store.absolute(r.image_path))) {
        fail(r, "stored image differs from re-rendered image");
      }
    }
    if (r.errored()) {
      ++report.errored;
      continue;
    }
    const Match m = match_best(sample->gt_box, r.detections, labels);
    if (!same_double(m.iou, r.iou)) fail(r, "iou differs");
    if (!same_double(m.confidence, r.confidence)) fail(r, "confidence differs");
    if (!same_double(compute_score(m, config.score.mode), r.score)) fail(r, "score differs");
    ++report.checked;
  }
  return report;
}

}  // namespace blindspot
