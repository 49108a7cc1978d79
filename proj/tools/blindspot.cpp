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

// blindspot: command-line front end for detector testing campaigns.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blindspot/config.hpp"
#include "blindspot/errors.hpp"
#include "blindspot/falsifier.hpp"
#include "blindspot/harness.hpp"
#include "blindspot/report.hpp"
#include "blindspot/samplers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace blindspot;

namespace {

struct CampaignArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::size_t workers = 1;
  bool no_timing = false;
  bool resume = false;
};

void add_campaign_flags(CLI::App* cmd, CampaignArgs& a, bool with_workers) {
  cmd->add_option("--config", a.config, "Campaign configuration (TOML)")->required();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--seed", a.seed, "Override [sampler] seed");
  cmd->add_option("--trials", a.trials, "Override [halt] max_trials");
  if (with_workers) cmd->add_option("--workers", a.workers, "Parallel workers")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timing", a.no_timing, "Record elapsed_ms as 0 for byte-reproducible stores");
  cmd->add_flag("--resume", a.resume, "Continue the campaign stored in --out");
}

CampaignConfig load_with_overrides(const CampaignArgs& a) {
  CampaignConfig cfg = load_config(a.config);
  if (a.seed) cfg.sampler.seed = *a.seed;
  if (a.trials) cfg.halt.max_trials = *a.trials;
  cfg.validate();
  return cfg;
}

void print_progress(const TrialRecord& r) {
  if ((r.index + 1) % 100 == 0) std::cerr << "trial " << r.index + 1 << "\n";
}

json outcome_json(const CampaignOutcome& o) {
  json j = {{"store", fs::absolute(o.store.dir()).string()},
            {"trials", o.store.records().size()},
            {"halt", o.halt ? json(o.halt->reason) : json(nullptr)}};
  if (o.error) j["error"] = *o.error;
  return j;
}

int finish(const CampaignOutcome& o) {
  std::cout << outcome_json(o).dump() << "\n";
  return o.error ? 2 : 0;
}

CampaignOutcome run_or_resume(const CampaignArgs& a, bool active) {
  const CampaignConfig cfg = load_with_overrides(a);
  RunOptions opts;
  opts.workers = a.workers;
  opts.record_timing = !a.no_timing;
  opts.on_trial = print_progress;
  if (a.resume) return resume_campaign(a.out, opts, &cfg);
  return active ? falsify_loop(cfg, a.out, opts) : run_campaign(cfg, a.out, opts);
}

int cmd_generate(const CampaignArgs& a) {
  const CampaignConfig cfg = load_with_overrides(a);
  const SceneConfig scene = load_scene(cfg.scene);
  const Sampler sampler(cfg.sampler, cfg.space.n());
  std::uint64_t count = 0;
  if (cfg.halt.max_trials) {
    count = *cfg.halt.max_trials;
  } else if (sampler.size()) {
    count = *sampler.size();
  } else {
    throw ConfigError("generate needs an image count (--trials or [halt] max_trials)");
  }
  if (sampler.size()) count = std::min(count, *sampler.size());

  const fs::path out(a.out);
  fs::create_directories(out / ResultStore::kImageDir);
  std::ofstream manifest(out / "manifest.ndjson", std::ios::trunc);
  if (!manifest) throw IoFailure("cannot write " + (out / "manifest.ndjson").string());
  std::uint64_t written = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const ModificationPoint p = sampler.at(i);
    json line = {{"index", i}, {"point", std::vector<double>(p.coords().begin(), p.coords().end())}};
    try {
      const RenderedSample s = generate_image(scene, cfg.space, p, i);
      const std::string rel = ResultStore::image_name(i);
      write_png(out / rel, s.image);
      line["image_path"] = rel;
      line["gt_box"] = {{"x_min", s.gt_box.x_min}, {"y_min", s.gt_box.y_min},
                        {"x_max", s.gt_box.x_max}, {"y_max", s.gt_box.y_max}};
      ++written;
    } catch (const DegeneratePlacement& e) {
      line["error"] = e.what();
    }
    manifest << line.dump() << "\n";
  }
  std::cout << json{{"images", written}, {"requested", count}, {"out", fs::absolute(out).string()}}.dump()
            << "\n";
  return 0;
}

int cmd_falsify(const CampaignArgs& a) {
  const CampaignOutcome o = run_or_resume(a, /*active=*/true);
  const CampaignConfig cfg = o.store.config();
  const double threshold = cfg.halt.threshold.value_or(kDefaultCounterexampleThreshold);
  std::ofstream cex(o.store.dir() / "counterexamples.ndjson", std::ios::trunc);
  for (const auto& r : o.store.records()) {
    if (r.errored() || !(r.score < threshold)) continue;
    json line = {{"trial", r.index},
                 {"point", std::vector<double>(r.point.coords().begin(), r.point.coords().end())},
                 {"score", r.score},
                 {"image_path", fs::absolute(o.store.absolute(r.image_path)).string()}};
    cex << line.dump() << "\n";
    std::cout << json{{"counterexample", line}}.dump() << "\n";
  }
  return finish(o);
}

int cmd_verify(const std::string& store_dir, bool skip_images) {
  const ResultStore store = ResultStore::open(store_dir);
  const VerifyReport report = verify_store(store, !skip_images);
  for (const auto& m : report.mismatches) std::cerr << m << "\n";
  std::cout << json{{"records", store.records().size()},
                    {"checked", report.checked},
                    {"errored", report.errored},
                    {"mismatches", report.mismatches.size()},
                    {"ok", report.ok()}}
                   .dump()
            << "\n";
  return report.ok() ? 0 : 1;
}

int cmd_report(const std::string& store_dir, const std::string& csv, const std::string& overlay,
               const std::vector<std::string>& grid, const std::string& scene_config) {
  const ResultStore store = ResultStore::open(store_dir);
  const SceneConfig scene =
      load_scene(scene_config.empty() ? store.config().scene : load_config(scene_config).scene);
  if (!csv.empty()) export_csv(store, csv);
  if (!overlay.empty()) write_overlay(store, scene, overlay);
  if (!grid.empty()) {
    const auto gx = std::stoull(grid[0]);
    const auto gy = std::stoull(grid[1]);
    export_heatmap_grid(store, scene, gx, gy, grid[2]);
  }
  return 0;
}

PointSet read_points_csv(std::istream& in) {
  PointSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> coords;
    std::stringstream ss(line);
    std::string cell;
    bool header = false;
    while (std::getline(ss, cell, ',')) {
      try {
        coords.push_back(std::stod(cell));
      } catch (const std::exception&) {
        header = true;
        break;
      }
    }
    if (header) {
      if (set.points.empty() && set.dim == 0) continue;  // a header row
      throw ConfigError("line " + std::to_string(line_no) + ": not a number");
    }
    if (set.dim == 0) set.dim = coords.size();
    if (coords.size() != set.dim) throw DimensionMismatch(set.dim, coords.size());
    for (double c : coords) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw ConfigError("line " + std::to_string(line_no) + ": coordinate outside [0,1]");
      }
    }
    set.points.push_back(ModificationPoint::unchecked(std::move(coords)));
  }
  if (set.points.empty()) throw ConfigError("no points in input");
  return set;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Systematic testing of object detectors on synthesized road scenes"};
  app.set_version_flag("--version", BLINDSPOT_VERSION);
  app.require_subcommand(1);

  CampaignArgs gen_args, analyze_args, falsify_args;
  auto* gen = app.add_subcommand("generate", "Render images only (no detector)");
  add_campaign_flags(gen, gen_args, false);
  auto* analyze = app.add_subcommand("analyze", "Passive campaign over a sampler");
  add_campaign_flags(analyze, analyze_args, true);
  auto* falsify = app.add_subcommand("falsify", "Active GP-LCB falsification campaign");
  add_campaign_flags(falsify, falsify_args, false);

  std::string verify_store_dir;
  bool skip_images = false;
  auto* verify = app.add_subcommand("verify", "Recompute every stored record");
  verify->add_option("--store", verify_store_dir, "Campaign directory")->required();
  verify->add_flag("--skip-images", skip_images, "Do not compare image bytes");

  std::string report_store, csv, overlay, report_config;
  std::vector<std::string> grid;
  auto* report = app.add_subcommand("report", "CSV, overlay and heatmap grid from a store");
  report->add_option("--store", report_store, "Campaign directory")->required();
  report->add_option("--csv", csv, "Per-trial CSV output");
  report->add_option("--overlay", overlay, "Overlay PNG output");
  report->add_option("--grid", grid, "gx gy path: heatmap grid CSV")->expected(3);
  report->add_option("--config", report_config, "Use the scene from this configuration");

  std::string points_csv;
  auto* disc = app.add_subcommand("discrepancy", "Star discrepancy of a CSV point set");
  disc->add_option("input", points_csv, "CSV file, one point per row ('-' for stdin)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(gen_args);
    if (*analyze) return finish(run_or_resume(analyze_args, /*active=*/false));
    if (*falsify) return cmd_falsify(falsify_args);
    if (*verify) return cmd_verify(verify_store_dir, skip_images);
    if (*report) return cmd_report(report_store, csv, overlay, grid, report_config);
    if (*disc) {
      std::ifstream file;
      std::istream* in = &std::cin;
      if (points_csv != "-") {
        file.open(points_csv);
        if (!file) throw IoFailure("cannot open " + points_csv);
        in = &file;
      }
      const PointSet points = read_points_csv(*in);
      const StarDiscrepancyEstimate est = star_discrepancy_estimate(points);
      std::printf("%.17g\n", est.value);
      if (!est.exact) std::fprintf(stderr, "approximate: lower bound on a thinned corner grid\n");
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
