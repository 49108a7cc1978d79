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

#include "blindspot/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "blindspot/errors.hpp"

namespace blindspot {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void check_scene(const ResultStore& store, const SceneConfig& scene) {
  const SceneSpec& s = store.config().scene;
  const bool same = s.id == scene.id && s.vanish.x == scene.vanish.x &&
                    s.vanish.y == scene.vanish.y && s.y_near == scene.y_near &&
                    s.x_left_near == scene.x_left_near && s.x_right_near == scene.x_right_near &&
                    s.w_near == scene.w_near && s.t_far == scene.t_far;
  if (!same) {
    throw SceneMismatch("scene '" + scene.id + "' is not the scene the store was recorded with ('" +
                        s.id + "')");
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoFailure("write to " + path.string() + " failed");
}

void fill_disc(RgbImage& img, double cx, double cy, double radius, const std::uint8_t rgb[3]) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(cy + radius)));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r2) std::copy(rgb, rgb + 3, img.pixel(x, y));
    }
  }
}

}  // namespace

std::vector<ReportRow> report_rows(const ResultStore& store) {
  const CampaignConfig config = store.config();
  const LabelSet labels(config.score.car_labels);
  std::vector<ReportRow> rows;
  for (const auto& r : store.records()) {
    if (r.errored() || !r.gt_box) continue;
    const Match m = match_best(*r.gt_box, r.detections, labels);
    const PixelPoint c = r.gt_box->center();
    rows.push_back({r.index, c.x, c.y, m.iou, m.confidence, compute_score(m, config.score.mode),
                    r.point});
  }
  return rows;
}

void export_csv(const ResultStore& store, const std::filesystem::path& path) {
  const std::size_t n = store.config().space.n();
  std::ofstream out = open_output(path);
  out << "trial,center_x,center_y,iou,confidence,score";
  for (std::size_t j = 0; j < n; ++j) out << ",m" << j;
  out << '\n';
  for (const auto& row : report_rows(store)) {
    out << row.trial << ',' << fixed6(row.center_x) << ',' << fixed6(row.center_y) << ','
        << fixed6(row.iou) << ',' << fixed6(row.confidence) << ',' << fixed6(row.score);
    for (double c : row.point.coords()) out << ',' << fixed6(c);
    out << '\n';
  }
  close_output(out, path);
}

RgbImage render_overlay(const ResultStore& store, const SceneConfig& scene) {
  check_scene(store, scene);
  RgbImage img = *scene.background;
  for (const auto& row : report_rows(store)) {
    const double radius = kMarkerMinRadius + row.iou * (kMarkerMaxRadius - kMarkerMinRadius);
    const double c = std::clamp(row.confidence, 0.0, 1.0);
    const std::uint8_t rgb[3] = {static_cast<std::uint8_t>(std::lround(255.0 * c)), 0,
                                 static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - c)))};
    fill_disc(img, row.center_x, row.center_y, radius, rgb);
  }
  return img;
}

void write_overlay(const ResultStore& store, const SceneConfig& scene,
                   const std::filesystem::path& path) {
  check_scene(store, scene);
  if (report_rows(store).empty()) {
    write_file_bytes(path, read_file_bytes(store.config().scene.background));
    return;
  }
  write_png(path, render_overlay(store, scene));
}

std::vector<HeatmapCell> heatmap_grid(const ResultStore& store, int image_width, int image_height,
                                      std::size_t gx, std::size_t gy) {
  if (gx < 1 || gy < 1) throw ConfigError("heatmap grid needs at least one cell per axis");
  std::vector<HeatmapCell> cells(gx * gy);
  const double cw = static_cast<double>(image_width) / gx;
  const double ch = static_cast<double>(image_height) / gy;
  for (std::size_t y = 0; y < gy; ++y) {
    for (std::size_t x = 0; x < gx; ++x) {
      HeatmapCell& cell = cells[y * gx + x];
      cell.cell_x = x;
      cell.cell_y = y;
      cell.bounds = {x * cw, y * ch, (x + 1) * cw, (y + 1) * ch};
      cell.min_score = std::numeric_limits<double>::infinity();
    }
  }
  for (const auto& row : report_rows(store)) {
    auto bin = [](double v, double size, std::size_t count) {
      const double b = std::floor(v / size);
      return static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(count - 1)));
    };
    HeatmapCell& cell = cells[bin(row.center_y, ch, gy) * gx + bin(row.center_x, cw, gx)];
    ++cell.count;
    cell.mean_iou += row.iou;
    cell.mean_confidence += row.confidence;
    cell.min_score = std::min(cell.min_score, row.score);
  }
  for (auto& cell : cells) {
    if (cell.count == 0) {
      cell.min_score = 0.0;
      continue;
    }
    cell.mean_iou /= static_cast<double>(cell.count);
    cell.mean_confidence /= static_cast<double>(cell.count);
  }
  return cells;
}

void export_heatmap_grid(const ResultStore& store, const SceneConfig& scene, std::size_t gx,
                         std::size_t gy, const std::filesystem::path& path) {
  check_scene(store, scene);
  const auto cells =
      heatmap_grid(store, scene.background->width(), scene.background->height(), gx, gy);
  std::ofstream out = open_output(path);
  out << "cell_x,cell_y,x_min,y_min,x_max,y_max,count,mean_iou,mean_confidence,min_score\n";
  for (const auto& c : cells) {
    out << c.cell_x << ',' << c.cell_y << ',' << fixed6(c.bounds.x_min) << ','
        << fixed6(c.bounds.y_min) << ',' << fixed6(c.bounds.x_max) << ','
        << fixed6(c.bounds.y_max) << ',' << c.count << ',';
    if (c.count > 0) {
      out << fixed6(c.mean_iou) << ',' << fixed6(c.mean_confidence) << ',' << fixed6(c.min_score);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  close_output(out, path);
}

}  // namespace blindspot
