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

#include "blindspot/store.hpp"

#include <cmath>
#include <cstdio>

#include "blindspot/errors.hpp"

namespace blindspot {

using nlohmann::json;

namespace {

json box_to_json(const BoundingBox& b) {
  return {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}};
}

BoundingBox box_from_json(const json& j) {
  return {j.at("x_min").get<double>(), j.at("y_min").get<double>(), j.at("x_max").get<double>(),
          j.at("y_max").get<double>()};
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double from_nullable(const json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

CampaignMode parse_mode(const std::string& s) {
  if (s == "analyze") return CampaignMode::kAnalyze;
  if (s == "falsify") return CampaignMode::kFalsify;
  throw CorruptStore("unknown campaign mode '" + s + "'");
}

}  // namespace

std::string_view campaign_mode_name(CampaignMode m) {
  return m == CampaignMode::kFalsify ? "falsify" : "analyze";
}

json record_to_json(const TrialRecord& r) {
  json dets = json::array();
  for (const auto& d : r.detections) {
    dets.push_back({{"label", d.label}, {"confidence", d.confidence}, {"bbox", box_to_json(d.box)}});
  }
  json j = {
      {"type", "trial"},
      {"index", r.index},
      {"point", std::vector<double>(r.point.coords().begin(), r.point.coords().end())},
      {"image_path", r.image_path},
      {"gt_box", r.gt_box ? box_to_json(*r.gt_box) : json(nullptr)},
      {"detections", dets},
      {"iou", nullable(r.iou)},
      {"confidence", nullable(r.confidence)},
      {"score", nullable(r.score)},
      {"error", r.error ? json(*r.error) : json(nullptr)},
      {"elapsed_ms", r.elapsed_ms},
  };
  if (r.lcb) j["lcb"] = *r.lcb;
  return j;
}

TrialRecord record_from_json(const json& j) {
  try {
    TrialRecord r;
    r.index = j.at("index").get<std::uint64_t>();
    std::vector<double> coords = j.at("point").get<std::vector<double>>();
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (!(coords[i] >= 0.0 && coords[i] <= 1.0)) throw CorruptStore("point coordinate out of range");
    }
    r.point = ModificationPoint::unchecked(std::move(coords));
    r.image_path = j.at("image_path").get<std::string>();
    if (!j.at("gt_box").is_null()) r.gt_box = box_from_json(j.at("gt_box"));
    for (const auto& d : j.at("detections")) {
      r.detections.push_back(
          {d.at("label").get<std::string>(), d.at("confidence").get<double>(), box_from_json(d.at("bbox"))});
    }
    r.iou = from_nullable(j.at("iou"));
    r.confidence = from_nullable(j.at("confidence"));
    r.score = from_nullable(j.at("score"));
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    r.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    if (const auto it = j.find("lcb"); it != j.end()) r.lcb = it->get<double>();
    return r;
  } catch (const json::exception& e) {
    throw CorruptStore(std::string("malformed trial record: ") + e.what());
  }
}

bool ResultStore::exists(const std::filesystem::path& dir) {
  return std::filesystem::exists(dir / kFileName);
}

std::string ResultStore::image_name(std::uint64_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s/trial_%06llu.png", kImageDir,
                static_cast<unsigned long long>(index));
  return buf;
}

ResultStore ResultStore::create(const std::filesystem::path& dir, CampaignMetadata metadata) {
  std::error_code ec;
  std::filesystem::create_directories(dir / kImageDir, ec);
  if (ec) throw IoFailure("cannot create " + (dir / kImageDir).string() + ": " + ec.message());
  if (exists(dir)) throw IoFailure("a campaign store already exists in " + dir.string());

  ResultStore store;
  store.dir_ = dir;
  store.metadata_ = std::move(metadata);
  store.write_line({{"type", "campaign"},
                    {"mode", campaign_mode_name(store.metadata_.mode)},
                    {"config", store.metadata_.config},
                    {"config_hash", store.metadata_.config_hash},
                    {"tool_version", store.metadata_.tool_version},
                    {"prng", store.metadata_.prng},
                    {"record_timing", store.metadata_.record_timing}});
  return store;
}

ResultStore ResultStore::open(const std::filesystem::path& dir) {
  std::ifstream in(dir / kFileName);
  if (!in) throw CorruptStore("no " + std::string(kFileName) + " in " + dir.string());

  ResultStore store;
  store.dir_ = dir;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (store.halt_) throw CorruptStore("content after the halt marker", line_no);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      throw CorruptStore("unparseable line", line_no);
    }
    const std::string type = j["type"].is_string() ? j["type"].get<std::string>() : "";
    try {
      if (!have_header) {
        if (type != "campaign") throw CorruptStore("first line must be the campaign header", line_no);
        auto& m = store.metadata_;
        m.mode = parse_mode(j.at("mode").get<std::string>());
        m.config = j.at("config");
        m.config_hash = j.at("config_hash").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.prng = j.at("prng").get<std::string>();
        m.record_timing = j.at("record_timing").get<bool>();
        have_header = true;
        const std::string actual = config_hash(config_from_json(m.config));
        if (actual != m.config_hash) {
          throw CorruptStore("config hash mismatch (header says " + m.config_hash +
                                 ", content hashes to " + actual + ")",
                             line_no);
        }
      } else if (type == "trial") {
        TrialRecord r = record_from_json(j);
        if (r.index != store.records_.size()) {
          throw CorruptStore("expected trial index " + std::to_string(store.records_.size()) +
                                 ", found " + std::to_string(r.index),
                             line_no);
        }
        if (!r.image_path.empty() && !std::filesystem::exists(dir / r.image_path)) {
          throw CorruptStore("missing image " + r.image_path, line_no);
        }
        store.records_.push_back(std::move(r));
      } else if (type == "halt") {
        store.halt_ = HaltInfo{j.at("reason").get<std::string>(), j.at("trials").get<std::uint64_t>()};
        if (store.halt_->trials != store.records_.size()) {
          throw CorruptStore("halt marker trial count does not match records", line_no);
        }
      } else {
        throw CorruptStore("unexpected line type '" + type + "'", line_no);
      }
    } catch (const CorruptStore& e) {
      if (e.line() != 0) throw;
      throw CorruptStore(e.what(), line_no);
    } catch (const json::exception& e) {
      throw CorruptStore(e.what(), line_no);
    } catch (const ConfigError& e) {
      throw CorruptStore(std::string("invalid recorded configuration: ") + e.what(), line_no);
    }
  }
  if (!have_header) throw CorruptStore("empty store", 1);
  return store;
}

CampaignConfig ResultStore::config() const { return config_from_json(metadata_.config); }

void ResultStore::write_line(const json& line) {
  std::ofstream out(dir_ / kFileName, std::ios::app | std::ios::binary);
  if (!out) throw IoFailure("cannot open " + (dir_ / kFileName).string());
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw IoFailure("write to " + (dir_ / kFileName).string() + " failed");
}

void ResultStore::append(const TrialRecord& record) {
  if (halt_) throw IoFailure("store is already finished");
  if (record.index != records_.size()) {
    throw IoFailure("trial index " + std::to_string(record.index) + " out of sequence");
  }
  write_line(record_to_json(record));
  records_.push_back(record);
}

void ResultStore::finish(const HaltInfo& halt) {
  if (halt_) return;
  write_line({{"type", "halt"}, {"reason", halt.reason}, {"trials", halt.trials}});
  halt_ = halt;
}

}  // namespace blindspot
