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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindspot/metrics.hpp"
#include "blindspot/modspace.hpp"
#include "blindspot/render.hpp"

namespace blindspot {

enum class DetectorKind { kSubprocess, kHttp, kMock };

std::string_view detector_kind_name(DetectorKind k);
DetectorKind parse_detector_kind(std::string_view name);

/// Closed axis-aligned box of the modification space.
struct BlindBox {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(const ModificationPoint& p) const;
  friend bool operator==(const BlindBox&, const BlindBox&) = default;
};

/// Behavior of the built-in mock: it reads the modification point, not the
/// pixels, and misses the car exactly inside the blind boxes.
struct MockSpec {
  std::vector<BlindBox> blind_boxes;
  double base_confidence = 0.95;
  double depth_decay = 0.0;
  int jitter_px = 0;
  std::uint64_t seed = 0;

  void validate(std::size_t n) const;
};

struct DetectorEndpoint {
  DetectorKind kind = DetectorKind::kMock;
  std::vector<std::string> command;  // subprocess: argv
  std::string url;                   // http: base URL, requests go to POST /detect
  std::chrono::milliseconds timeout{30000};
  MockSpec mock;

  void validate(std::size_t n) const;
};

/// A session with the system under test. Not thread-safe; requests are
/// strictly sequential.
class Detector {
 public:
  virtual ~Detector() = default;

  /// `image_path` is where the sample's PNG was persisted. Throws
  /// ProtocolError, Timeout or ProcessExit.
  virtual DetectionSet detect(const RenderedSample& sample,
                              const std::filesystem::path& image_path) = 0;
};

class MockDetector final : public Detector {
 public:
  MockDetector(MockSpec spec, const ModificationSpace& space);
  DetectionSet detect(const RenderedSample& sample, const std::filesystem::path& image_path) override;
  /// Same as detect(); the mock never touches the image file.
  DetectionSet detect(const RenderedSample& sample) const;

 private:
  MockSpec spec_;
  std::optional<std::size_t> depth_index_;
};

class ChildProcess;

/// Persistent NDJSON session over a child's stdin/stdout. The child is
/// spawned lazily and respawned after it dies.
class SubprocessDetector final : public Detector {
 public:
  SubprocessDetector(std::vector<std::string> command, std::chrono::milliseconds timeout);
  ~SubprocessDetector() override;
  DetectionSet detect(const RenderedSample& sample, const std::filesystem::path& image_path) override;

 private:
  void ensure_started();

  std::vector<std::string> command_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<ChildProcess> child_;
  std::uint64_t next_id_ = 1;
};

class HttpDetector final : public Detector {
 public:
  HttpDetector(std::string url, std::chrono::milliseconds timeout);
  DetectionSet detect(const RenderedSample& sample, const std::filesystem::path& image_path) override;

 private:
  std::string url_;
  std::chrono::milliseconds timeout_;
  std::uint64_t next_id_ = 1;
};

std::unique_ptr<Detector> make_detector(const DetectorEndpoint& endpoint,
                                        const ModificationSpace& space);

/// Wire format shared by the subprocess and HTTP kinds. One JSON object per
/// line, UTF-8, pixel coordinates with the origin top-left.
namespace protocol {

std::string encode_request(std::uint64_t id, const std::string& image_path, int width, int height);
std::string encode_http_request(std::uint64_t id, std::string_view png_bytes, int width, int height);
std::string encode_response(std::uint64_t id, const DetectionSet& detections);
/// Throws ProtocolError on malformed payloads, id mismatch, or an error
/// response from the detector.
DetectionSet decode_response(std::string_view payload, std::uint64_t expected_id);
bool is_ready(std::string_view line);

std::string base64_encode(std::string_view bytes);

}  // namespace protocol

}  // namespace blindspot
