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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "blindspot/image.hpp"
#include "blindspot/render.hpp"
#include "blindspot/store.hpp"

namespace blindspot {

/// One plotted trial: where the car was and how the detector did.
struct ReportRow {
  std::uint64_t trial = 0;
  double center_x = 0.0;
  double center_y = 0.0;
  double iou = 0.0;
  double confidence = 0.0;
  double score = 0.0;
  ModificationPoint point;
};

/// Rows for every non-errored trial, metrics recomputed from the stored
/// detections, ordered by trial index.
std::vector<ReportRow> report_rows(const ResultStore& store);

/// Header `trial,center_x,center_y,iou,confidence,score,m0,m1,...`, six
/// fractional digits. Throws IoFailure.
void export_csv(const ResultStore& store, const std::filesystem::path& path);

inline constexpr double kMarkerMinRadius = 2.0;
inline constexpr double kMarkerMaxRadius = 10.0;

/// Background with one filled disc per trial at the ground-truth centre:
/// radius grows with IOU, colour runs blue (confidence 0) to red (1).
/// Throws SceneMismatch when the scene is not the one the store was run on.
RgbImage render_overlay(const ResultStore& store, const SceneConfig& scene);

/// Writes the overlay PNG. Without any marker to draw the background file
/// is copied unchanged.
void write_overlay(const ResultStore& store, const SceneConfig& scene,
                   const std::filesystem::path& path);

struct HeatmapCell {
  std::size_t cell_x = 0;
  std::size_t cell_y = 0;
  BoundingBox bounds;
  std::size_t count = 0;
  double mean_iou = 0.0;
  double mean_confidence = 0.0;
  double min_score = 0.0;
};

/// gx x gy aggregation over image pixel space, row-major from the top-left
/// cell.
std::vector<HeatmapCell> heatmap_grid(const ResultStore& store, int image_width, int image_height,
                                      std::size_t gx, std::size_t gy);

/// Empty cells keep count 0 and leave the aggregate fields blank.
void export_heatmap_grid(const ResultStore& store, const SceneConfig& scene, std::size_t gx,
                         std::size_t gy, const std::filesystem::path& path);

}  // namespace blindspot
