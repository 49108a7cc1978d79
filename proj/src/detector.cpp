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

#include "blindspot/detector.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "blindspot/errors.hpp"
#include "blindspot/image.hpp"
#include "blindspot/samplers.hpp"
#include "subprocess.hpp"

namespace blindspot {

using nlohmann::json;

std::string_view detector_kind_name(DetectorKind k) {
  switch (k) {
    case DetectorKind::kSubprocess: return "subprocess";
    case DetectorKind::kHttp: return "http";
    case DetectorKind::kMock: return "mock";
  }
  return "?";
}

DetectorKind parse_detector_kind(std::string_view name) {
  for (auto k : {DetectorKind::kSubprocess, DetectorKind::kHttp, DetectorKind::kMock}) {
    if (detector_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown detector kind '" + std::string(name) + "'");
}

bool BlindBox::contains(const ModificationPoint& p) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (p[j] < lo[j] || p[j] > hi[j]) return false;
  }
  return true;
}

void MockSpec::validate(std::size_t n) const {
  for (const auto& b : blind_boxes) {
    if (b.lo.size() != n || b.hi.size() != n) {
      throw ConfigError("mock: blind box dimension does not match the space");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(0.0 <= b.lo[j] && b.lo[j] <= b.hi[j] && b.hi[j] <= 1.0)) {
        throw ConfigError("mock: blind box corners must satisfy 0 <= lo <= hi <= 1");
      }
    }
  }
  if (!(base_confidence > 0.0 && base_confidence <= 1.0)) {
    throw ConfigError("mock: base_confidence must lie in (0,1]");
  }
  if (!(depth_decay >= 0.0)) throw ConfigError("mock: depth_decay must be >= 0");
  if (jitter_px < 0) throw ConfigError("mock: jitter_px must be >= 0");
}

void DetectorEndpoint::validate(std::size_t n) const {
  if (timeout.count() <= 0) throw ConfigError("detector: timeout must be > 0");
  switch (kind) {
    case DetectorKind::kMock: mock.validate(n); break;
    case DetectorKind::kSubprocess:
      if (command.empty()) throw ConfigError("detector: subprocess kind needs a command");
      break;
    case DetectorKind::kHttp:
      if (url.empty()) throw ConfigError("detector: http kind needs a url");
      break;
  }
}

// ---------------------------------------------------------------------------
// Mock

MockDetector::MockDetector(MockSpec spec, const ModificationSpace& space)
    : spec_(std::move(spec)), depth_index_(space.index_of(Dimension::kCarDepth)) {
  spec_.validate(space.n());
}

DetectionSet MockDetector::detect(const RenderedSample& sample, const std::filesystem::path&) {
  return detect(sample);
}

DetectionSet MockDetector::detect(const RenderedSample& sample) const {
  for (const auto& box : spec_.blind_boxes) {
    if (box.contains(sample.point)) return {};
  }
  const double depth = depth_index_ ? sample.point[*depth_index_] : 0.0;
  Detection d;
  d.label = "car";
  d.confidence = std::clamp(spec_.base_confidence * (1.0 - spec_.depth_decay * depth), 0.0, 1.0);
  d.box = sample.gt_box;
  if (spec_.jitter_px > 0) {
    const std::uint64_t key = splitmix64_at(spec_.seed, sample.index);
    const auto span = static_cast<std::uint64_t>(2 * spec_.jitter_px + 1);
    double* corners[4] = {&d.box.x_min, &d.box.y_min, &d.box.x_max, &d.box.y_max};
    for (int k = 0; k < 4; ++k) {
      const auto offset = static_cast<int>(splitmix64_at(key, k) % span) - spec_.jitter_px;
      *corners[k] += offset;
    }
    if (d.box.x_max <= d.box.x_min) d.box.x_max = d.box.x_min + 1.0;
    if (d.box.y_max <= d.box.y_min) d.box.y_max = d.box.y_min + 1.0;
  }
  return {d};
}

// ---------------------------------------------------------------------------
// Wire protocol

namespace protocol {
namespace {

double require_number(const json& obj, const char* key, std::string_view raw) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ProtocolError(std::string("missing or non-numeric '") + key + "'", std::string(raw));
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ProtocolError(std::string("non-finite '") + key + "'", std::string(raw));
  }
  return v;
}

}  // namespace

std::string encode_request(std::uint64_t id, const std::string& image_path, int width, int height) {
  return json{{"id", id}, {"image_path", image_path}, {"width", width}, {"height", height}}.dump();
}

std::string base64_encode(std::string_view bytes) {
  return httplib::detail::base64_encode(std::string(bytes));
}

std::string encode_http_request(std::uint64_t id, std::string_view png_bytes, int width, int height) {
  return json{{"id", id}, {"image_b64", base64_encode(png_bytes)}, {"width", width},
              {"height", height}}
      .dump();
}

std::string encode_response(std::uint64_t id, const DetectionSet& detections) {
  json list = json::array();
  for (const auto& d : detections) {
    list.push_back({{"label", d.label},
                    {"confidence", d.confidence},
                    {"bbox",
                     {{"x_min", d.box.x_min},
                      {"y_min", d.box.y_min},
                      {"x_max", d.box.x_max},
                      {"y_max", d.box.y_max}}}});
  }
  return json{{"id", id}, {"detections", std::move(list)}}.dump();
}

DetectionSet decode_response(std::string_view payload, std::uint64_t expected_id) {
  const std::string raw(payload);
  json doc = json::parse(payload, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw ProtocolError("response is not a JSON object", raw);
  const auto id = doc.find("id");
  if (id == doc.end() || !id->is_number_unsigned()) throw ProtocolError("response lacks an id", raw);
  if (id->get<std::uint64_t>() != expected_id) {
    throw ProtocolError("response id " + std::to_string(id->get<std::uint64_t>()) +
                            " does not match request id " + std::to_string(expected_id),
                        raw);
  }
  if (const auto err = doc.find("error"); err != doc.end()) {
    throw ProtocolError("detector reported an error: " +
                            (err->is_string() ? err->get<std::string>() : err->dump()),
                        raw);
  }
  const auto list = doc.find("detections");
  if (list == doc.end() || !list->is_array()) throw ProtocolError("response lacks detections", raw);

  DetectionSet out;
  for (const auto& item : *list) {
    if (!item.is_object()) throw ProtocolError("detection is not an object", raw);
    Detection d;
    const auto label = item.find("label");
    if (label == item.end() || !label->is_string()) throw ProtocolError("detection lacks a label", raw);
    d.label = label->get<std::string>();
    d.confidence = require_number(item, "confidence", raw);
    if (d.confidence < 0.0 || d.confidence > 1.0) {
      throw ProtocolError("confidence outside [0,1]", raw);
    }
    const auto bbox = item.find("bbox");
    if (bbox == item.end() || !bbox->is_object()) throw ProtocolError("detection lacks a bbox", raw);
    d.box = {require_number(*bbox, "x_min", raw), require_number(*bbox, "y_min", raw),
             require_number(*bbox, "x_max", raw), require_number(*bbox, "y_max", raw)};
    if (!d.box.valid()) throw ProtocolError("bbox has non-positive area", raw);
    out.push_back(std::move(d));
  }
  return out;
}

bool is_ready(std::string_view line) {
  json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return false;
  const auto it = doc.find("ready");
  return it != doc.end() && it->is_boolean() && it->get<bool>();
}

}  // namespace protocol

// ---------------------------------------------------------------------------
// Subprocess

SubprocessDetector::SubprocessDetector(std::vector<std::string> command,
                                       std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

SubprocessDetector::~SubprocessDetector() = default;

void SubprocessDetector::ensure_started() {
  if (child_ && !child_->poll_exit()) return;
  child_ = std::make_unique<ChildProcess>(command_);
  std::optional<std::string> line;
  try {
    line = child_->read_line(timeout_);
  } catch (const Timeout&) {
    child_.reset();
    throw Timeout("detector did not signal readiness within timeout");
  }
  if (!line) {
    const int code = child_->terminate(std::chrono::milliseconds(1000));
    child_.reset();
    throw ProcessExit("detector exited before signalling readiness", code);
  }
  if (!protocol::is_ready(*line)) {
    child_.reset();
    throw ProtocolError("expected {\"ready\": true} as the first line", *line);
  }
}

DetectionSet SubprocessDetector::detect(const RenderedSample& sample,
                                        const std::filesystem::path& image_path) {
  ensure_started();
  const std::uint64_t id = next_id_++;
  std::optional<std::string> line;
  try {
    child_->write_line(protocol::encode_request(
        id, std::filesystem::absolute(image_path).string(), sample.image.width(),
        sample.image.height()));
    line = child_->read_line(timeout_);
  } catch (const DetectorError&) {
    // Request/response pairing is lost; the next request starts a fresh child.
    child_.reset();
    throw;
  }
  if (!line) {
    const int code = child_->terminate(std::chrono::milliseconds(1000));
    child_.reset();
    throw ProcessExit("detector process exited with status " + std::to_string(code), code);
  }
  return protocol::decode_response(*line, id);
}

// ---------------------------------------------------------------------------
// HTTP

HttpDetector::HttpDetector(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {}

DetectionSet HttpDetector::detect(const RenderedSample& sample,
                                  const std::filesystem::path& image_path) {
  const auto bytes = read_file_bytes(image_path);
  const std::uint64_t id = next_id_++;
  const std::string body = protocol::encode_http_request(
      id, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
      sample.image.width(), sample.image.height());

  httplib::Client client(url_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post("/detect", body, "application/json");
  if (!res) {
    if (std::chrono::steady_clock::now() - start >= timeout_) {
      throw Timeout("HTTP detector did not answer within timeout");
    }
    throw DetectorError("HTTP detector request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProtocolError("HTTP detector answered status " + std::to_string(res->status), res->body);
  }
  return protocol::decode_response(res->body, id);
}

std::unique_ptr<Detector> make_detector(const DetectorEndpoint& endpoint,
                                        const ModificationSpace& space) {
  endpoint.validate(space.n());
  switch (endpoint.kind) {
    case DetectorKind::kMock: return std::make_unique<MockDetector>(endpoint.mock, space);
    case DetectorKind::kSubprocess:
      return std::make_unique<SubprocessDetector>(endpoint.command, endpoint.timeout);
    case DetectorKind::kHttp: return std::make_unique<HttpDetector>(endpoint.url, endpoint.timeout);
  }
  throw ConfigError("unsupported detector kind");
}

}  // namespace blindspot
