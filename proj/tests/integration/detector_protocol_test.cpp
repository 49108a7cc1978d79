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

// Drives external detectors end to end: a helper process speaking the NDJSON
// stdio protocol and an in-process HTTP server answering POST /detect.

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "blindspot/detector.hpp"
#include "blindspot/errors.hpp"
#include "blindspot/harness.hpp"
#include "blindspot/image.hpp"
#include "test_support.hpp"

// After Eigen: the socket headers define macros that collide with it.
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace blindspot {
namespace {

using nlohmann::json;
using namespace std::chrono_literals;

class ExternalDetector : public ::testing::Test {
 protected:
  void SetUp() override {
    RgbImage img(100, 100);
    image_ = dir_ / "img.png";
    write_png(image_, img);
    sample_.image = img;
    sample_.gt_box = {25, 25, 75, 75};
  }

  std::vector<std::string> fake(std::vector<std::string> args = {}) const {
    args.insert(args.begin(), testing::fake_detector_path());
    return args;
  }

  testing::TempDir dir_;
  std::filesystem::path image_;
  RenderedSample sample_;
};

const Detection kDummy{"car", 0.9, {25, 25, 75, 75}};

TEST_F(ExternalDetector, FiftyRequestSession) {
  SubprocessDetector det(fake(), 5s);
  for (int i = 0; i < 50; ++i) {
    const auto ds = det.detect(sample_, image_);
    ASSERT_EQ(ds.size(), 1u) << "request " << i;
    EXPECT_EQ(ds[0], kDummy);
  }
}

TEST_F(ExternalDetector, EmptyDetections) {
  SubprocessDetector det(fake({"--empty"}), 5s);
  EXPECT_TRUE(det.detect(sample_, image_).empty());
}

TEST_F(ExternalDetector, ErrorResponseKeepsSession) {
  SubprocessDetector det(fake({"--error-at", "2"}), 5s);
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);
  try {
    det.detect(sample_, image_);
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(e.raw_payload().find("injected failure"), std::string::npos);
  }
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);
}

TEST_F(ExternalDetector, MissingImageIsReportedByTheBridge) {
  SubprocessDetector det(fake(), 5s);
  EXPECT_THROW(det.detect(sample_, dir_ / "nope.png"), ProtocolError);
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);
}

TEST_F(ExternalDetector, MalformedLineIsProtocolError) {
  SubprocessDetector det(fake({"--garbage-at", "1"}), 5s);
  try {
    det.detect(sample_, image_);
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.raw_payload(), "{not json");
  }
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);
}

TEST_F(ExternalDetector, WrongIdIsProtocolError) {
  SubprocessDetector det(fake({"--wrong-id-at", "1"}), 5s);
  EXPECT_THROW(det.detect(sample_, image_), ProtocolError);
}

TEST_F(ExternalDetector, ChildDeathCarriesExitCodeAndRespawns) {
  SubprocessDetector det(fake({"--die-at", "2", "--exit-code", "7"}), 5s);
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);
  try {
    det.detect(sample_, image_);
    FAIL() << "expected ProcessExit";
  } catch (const ProcessExit& e) {
    EXPECT_EQ(e.exit_code(), 7);
  }
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);  // fresh child
}

TEST_F(ExternalDetector, SlowAnswerTimesOut) {
  SubprocessDetector det(fake({"--sleep-at", "2", "--sleep-ms", "3000"}), 300ms);
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(det.detect(sample_, image_), Timeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 2500ms);
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);  // killed and respawned
}

TEST_F(ExternalDetector, MissingHandshake) {
  SubprocessDetector silent(fake({"--no-ready"}), 300ms);
  EXPECT_THROW(silent.detect(sample_, image_), Timeout);
  SubprocessDetector chatty(fake({"--garbage-ready"}), 5s);
  EXPECT_THROW(chatty.detect(sample_, image_), ProtocolError);
  SubprocessDetector absent({"/nonexistent/detector"}, 5s);
  EXPECT_THROW(absent.detect(sample_, image_), DetectorError);
}

// Malformed replies become errored trials; the campaign carries on.
TEST_F(ExternalDetector, HarnessRecordsErroredTrials) {
  const auto scene = testing::write_demo_scene(dir_ / "scene", 320, 120);
  CampaignConfig cfg = testing::mock_campaign(scene, 6);
  cfg.detector.kind = DetectorKind::kSubprocess;
  cfg.detector.command = fake({"--garbage-at", "3"});
  cfg.detector.timeout = 5s;
  const auto out = run_campaign(cfg, dir_ / "run");
  ASSERT_EQ(out.store.records().size(), 6u);
  for (const auto& r : out.store.records()) {
    if (r.index == 2) {
      ASSERT_TRUE(r.errored());
      EXPECT_TRUE(std::isnan(r.score));
      EXPECT_EQ(r.error->rfind("detector: ", 0), 0u) << *r.error;
    } else {
      EXPECT_FALSE(r.errored()) << r.index;
    }
  }
  EXPECT_EQ(out.halt->reason, "max_trials");
  EXPECT_TRUE(verify_store(ResultStore::open(dir_ / "run")).ok());

  cfg.on_error = ErrorPolicy::kHalt;
  const auto halted = run_campaign(cfg, dir_ / "run-halt");
  EXPECT_EQ(halted.store.records().size(), 3u);
  EXPECT_EQ(halted.halt->reason, "error");
  ASSERT_TRUE(halted.error);
}

std::string base64_decode(const std::string& in) {
  std::string out(in.size() / 4 * 3 + 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(in.data()),
                                static_cast<int>(in.size()));
  if (n < 0) throw std::runtime_error("bad base64");
  std::size_t pad = 0;
  if (!in.empty() && in.back() == '=') ++pad;
  if (in.size() > 1 && in[in.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

// Minimal HTTP bridge: decodes the PNG and answers with the dummy box.
class HttpBridge {
 public:
  HttpBridge() {
    server_.Post("/detect", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
      const json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("image_b64") || body.contains("image_path")) {
        res.status = 400;
        res.set_content(R"({"error":"bad request"})", "application/json");
        return;
      }
      const auto png = base64_decode(body["image_b64"].get<std::string>());
      const RgbImage img = decode_png_rgb(
          std::span(reinterpret_cast<const std::uint8_t*>(png.data()), png.size()));
      if (img.width() != body["width"] || img.height() != body["height"]) {
        res.status = 400;
        return;
      }
      if (status_ != 200) {
        res.status = status_;
        res.set_content("nope", "text/plain");
        return;
      }
      DetectionSet ds;
      if (!empty_) ds.push_back({"car", 0.9, {0.25 * img.width(), 0.25 * img.height(),
                                              0.75 * img.width(), 0.75 * img.height()}});
      res.set_content(protocol::encode_response(body["id"].get<std::uint64_t>(), ds),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~HttpBridge() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests_{0};
  std::chrono::milliseconds delay_{0};
  int status_ = 200;
  bool empty_ = false;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ExternalDetector, HttpFiftyRequestSession) {
  HttpBridge bridge;
  HttpDetector det(bridge.url(), 5s);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(det.detect(sample_, image_), DetectionSet{kDummy});
  EXPECT_EQ(bridge.requests_, 50);
  bridge.empty_ = true;
  EXPECT_TRUE(det.detect(sample_, image_).empty());
}

TEST_F(ExternalDetector, HttpNon200IsProtocolError) {
  HttpBridge bridge;
  bridge.status_ = 503;
  HttpDetector det(bridge.url(), 5s);
  try {
    det.detect(sample_, image_);
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.raw_payload(), "nope");
  }
  bridge.status_ = 200;
  EXPECT_EQ(det.detect(sample_, image_).size(), 1u);  // recovers on the next request
}

TEST_F(ExternalDetector, HttpTimeoutAndUnreachable) {
  HttpBridge bridge;
  bridge.delay_ = 1500ms;
  HttpDetector slow(bridge.url(), 300ms);
  EXPECT_THROW(slow.detect(sample_, image_), Timeout);

  HttpDetector nowhere("http://127.0.0.1:1", 2s);
  EXPECT_THROW(nowhere.detect(sample_, image_), DetectorError);
}

TEST_F(ExternalDetector, HttpCampaign) {
  HttpBridge bridge;
  const auto scene = testing::write_demo_scene(dir_ / "scene", 320, 120);
  CampaignConfig cfg = testing::mock_campaign(scene, 8);
  cfg.detector.kind = DetectorKind::kHttp;
  cfg.detector.url = bridge.url();
  RunOptions opts;
  opts.workers = 3;
  const auto out = run_campaign(cfg, dir_ / "run", opts);
  ASSERT_EQ(out.store.records().size(), 8u);
  for (const auto& r : out.store.records()) {
    EXPECT_FALSE(r.errored());
    ASSERT_EQ(r.detections.size(), 1u);
    EXPECT_EQ(r.detections[0].box, (BoundingBox{80, 30, 240, 90}));
  }
  EXPECT_TRUE(verify_store(ResultStore::open(dir_ / "run")).ok());
}

}  // namespace
}  // namespace blindspot
