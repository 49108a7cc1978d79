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

#include "blindspot/config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "blindspot/errors.hpp"
#include "blindspot/image.hpp"

namespace blindspot {

using nlohmann::json;

namespace {

// Strict view of one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (doc.is_null()) {
      obj_ = &empty_;
    } else if (!doc.is_object()) {
      throw ConfigError("[" + name_ + "] must be a table");
    } else {
      obj_ = &doc;
    }
  }

  bool has(const std::string& key) const { return obj_->contains(key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(fallback, key);
    if (!v->is_number()) throw type_error(key, "a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  std::uint64_t unsigned_int(const std::string& key, std::optional<std::uint64_t> fallback = {}) {
    const json* v = find(key);
    if (!v) return require(fallback, key);
    if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
      throw type_error(key, "a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::uint64_t> optional_unsigned(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return unsigned_int(key);
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = {}) {
    const json* v = find(key);
    if (!v) return require(std::move(fallback), key);
    if (!v->is_string()) throw type_error(key, "a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ConfigError("[" + name_ + "] missing key '" + key + "'");
    if (!v->is_array()) throw type_error(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw type_error(key, "an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_string()) return {v->get<std::string>()};
    if (!v->is_array()) throw type_error(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) throw type_error(key, "an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  Section sub(const std::string& key) {
    static const json kNull;
    const json* v = find(key);
    return Section(v ? *v : kNull, name_ + "." + key);
  }

  /// Rejects keys nobody asked for (usually typos).
  void finish() const {
    for (const auto& [key, value] : obj_->items()) {
      if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }
  }

  const json& raw() const { return *obj_; }

 private:
  template <typename T>
  T require(std::optional<T> fallback, const std::string& key) const {
    if (!fallback) throw ConfigError("[" + name_ + "] missing key '" + key + "'");
    return *fallback;
  }

  ConfigError type_error(const std::string& key, const char* what) const {
    return ConfigError("[" + name_ + "] key '" + key + "' must be " + what);
  }

  static inline const json empty_ = json::object();
  const json* obj_ = nullptr;
  std::string name_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

}  // namespace

SceneConfig load_scene(const SceneSpec& spec) {
  SceneConfig scene;
  scene.id = spec.id;
  try {
    scene.background = std::make_shared<const RgbImage>(read_png_rgb(spec.background));
    scene.sprite = std::make_shared<const RgbaImage>(read_png_rgba(spec.sprite));
  } catch (const IoFailure& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  scene.vanish = spec.vanish;
  scene.y_near = spec.y_near;
  scene.x_left_near = spec.x_left_near;
  scene.x_right_near = spec.x_right_near;
  scene.w_near = spec.w_near;
  scene.t_far = spec.t_far;
  scene.validate();
  return scene;
}

void HaltCondition::validate(std::size_t n) const {
  if (!threshold && !max_trials && !coverage_target) {
    throw ConfigError("[halt] needs at least one of threshold, max_trials, coverage_target");
  }
  if (max_trials && *max_trials < 1) throw ConfigError("[halt] max_trials must be >= 1");
  if (coverage_target) {
    if (!(*coverage_target > 0.0 && *coverage_target <= 1.0)) {
      throw ConfigError("[halt] coverage_target must lie in (0,1]");
    }
    CoverageGrid probe(n, coverage_bins);  // throws TooLarge / ConfigError
  }
}

void CampaignConfig::validate() const {
  sampler.validate(space.n());
  detector.validate(space.n());
  halt.validate(space.n());
  gp.validate();
  if (score.car_labels.empty()) throw ConfigError("[score] car_labels must not be empty");
}

CampaignConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("configuration root must be a table");
  Section root(doc, "root");
  CampaignConfig cfg;

  {
    Section s = root.sub("scene");
    cfg.scene.id = s.string("id", std::string("scene"));
    cfg.scene.background = resolve(s.string("background"), base_dir);
    cfg.scene.sprite = resolve(s.string("sprite"), base_dir);
    const auto v = s.numbers("vanish");
    if (v.size() != 2) throw ConfigError("[scene] vanish must be [x, y]");
    cfg.scene.vanish = {v[0], v[1]};
    cfg.scene.y_near = s.number("y_near");
    cfg.scene.x_left_near = s.number("x_left_near");
    cfg.scene.x_right_near = s.number("x_right_near");
    cfg.scene.w_near = s.number("w_near");
    cfg.scene.t_far = s.number("t_far", 0.95);
    s.finish();
  }
  {
    Section s = root.sub("space");
    Section dims = s.sub("dims");
    std::vector<DimensionSpec> specs;
    for (const auto& [name, value] : dims.raw().items()) {
      const auto index = dims.unsigned_int(name);
      specs.push_back({parse_dimension(name), index});
    }
    dims.finish();
    s.finish();
    cfg.space = ModificationSpace::from_specs(std::move(specs));
  }
  {
    Section s = root.sub("sampler");
    cfg.sampler.kind = parse_sampler_kind(s.string("kind", std::string("halton")));
    cfg.sampler.seed = s.unsigned_int("seed", 0);
    cfg.sampler.m_points = s.unsigned_int("m_points", 0);
    cfg.sampler.korobov_a = s.unsigned_int("korobov_a", 3);
    cfg.sampler.skip = s.unsigned_int("skip", 0);
    s.finish();
  }
  {
    Section s = root.sub("detector");
    cfg.detector.kind = parse_detector_kind(s.string("kind", std::string("mock")));
    cfg.detector.command = s.strings("command", {});
    cfg.detector.url = s.string("url", std::string());
    cfg.detector.timeout = std::chrono::milliseconds(s.unsigned_int("timeout_ms", 30000));
    const auto policy = s.string("on_error", std::string("continue"));
    if (policy == "continue") {
      cfg.on_error = ErrorPolicy::kContinue;
    } else if (policy == "halt") {
      cfg.on_error = ErrorPolicy::kHalt;
    } else {
      throw ConfigError("[detector] on_error must be 'continue' or 'halt'");
    }
    Section m = s.sub("mock");
    cfg.detector.mock.base_confidence = m.number("base_confidence", 0.95);
    cfg.detector.mock.depth_decay = m.number("depth_decay", 0.0);
    cfg.detector.mock.jitter_px = static_cast<int>(m.unsigned_int("jitter_px", 0));
    cfg.detector.mock.seed = m.unsigned_int("seed", 0);
    if (const json* boxes = m.find("blind_boxes")) {
      if (!boxes->is_array()) throw ConfigError("[detector.mock] blind_boxes must be an array");
      for (const auto& b : *boxes) {
        Section bs(b, "detector.mock.blind_boxes");
        cfg.detector.mock.blind_boxes.push_back({bs.numbers("lo"), bs.numbers("hi")});
        bs.finish();
      }
    }
    m.finish();
    s.finish();
  }
  {
    Section s = root.sub("halt");
    cfg.halt.threshold = s.optional_number("threshold");
    cfg.halt.max_trials = s.optional_unsigned("max_trials");
    cfg.halt.coverage_target = s.optional_number("coverage_target");
    cfg.halt.coverage_bins = s.unsigned_int("coverage_bins", 10);
    s.finish();
  }
  {
    Section s = root.sub("gp");
    GPConfig d;
    cfg.gp.signal_variance = s.number("signal_variance", d.signal_variance);
    cfg.gp.length_scale = s.number("length_scale", d.length_scale);
    cfg.gp.noise_variance = s.number("noise_variance", d.noise_variance);
    cfg.gp.jitter = s.number("jitter", d.jitter);
    cfg.gp.beta = s.number("beta", d.beta);
    cfg.gp.candidate_count = s.unsigned_int("candidate_count", d.candidate_count);
    s.finish();
  }
  {
    Section s = root.sub("score");
    cfg.score.mode = parse_score_mode(s.string("mode", std::string("product")));
    cfg.score.car_labels = s.strings("car_labels", {"car"});
    s.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

CampaignConfig parse_config_toml(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  std::ostringstream js;
  js << toml::json_formatter{table};
  return config_from_json(json::parse(js.str()), base_dir);
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_toml(buffer.str(), std::filesystem::absolute(path).parent_path());
}

json config_to_json(const CampaignConfig& c) {
  json dims = json::object();
  for (const auto& d : c.space.dims()) dims[std::string(dimension_name(d.dim))] = d.index;

  json boxes = json::array();
  for (const auto& b : c.detector.mock.blind_boxes) boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});

  json halt = json::object();
  if (c.halt.threshold) halt["threshold"] = *c.halt.threshold;
  if (c.halt.max_trials) halt["max_trials"] = *c.halt.max_trials;
  if (c.halt.coverage_target) halt["coverage_target"] = *c.halt.coverage_target;
  halt["coverage_bins"] = c.halt.coverage_bins;

  return {
      {"scene",
       {{"id", c.scene.id},
        {"background", std::filesystem::absolute(c.scene.background).lexically_normal().string()},
        {"sprite", std::filesystem::absolute(c.scene.sprite).lexically_normal().string()},
        {"vanish", {c.scene.vanish.x, c.scene.vanish.y}},
        {"y_near", c.scene.y_near},
        {"x_left_near", c.scene.x_left_near},
        {"x_right_near", c.scene.x_right_near},
        {"w_near", c.scene.w_near},
        {"t_far", c.scene.t_far}}},
      {"space", {{"dims", dims}}},
      {"sampler",
       {{"kind", sampler_kind_name(c.sampler.kind)},
        {"seed", c.sampler.seed},
        {"m_points", c.sampler.m_points},
        {"korobov_a", c.sampler.korobov_a},
        {"skip", c.sampler.skip}}},
      {"detector",
       {{"kind", detector_kind_name(c.detector.kind)},
        {"command", c.detector.command},
        {"url", c.detector.url},
        {"timeout_ms", c.detector.timeout.count()},
        {"on_error", c.on_error == ErrorPolicy::kHalt ? "halt" : "continue"},
        {"mock",
         {{"base_confidence", c.detector.mock.base_confidence},
          {"depth_decay", c.detector.mock.depth_decay},
          {"jitter_px", c.detector.mock.jitter_px},
          {"seed", c.detector.mock.seed},
          {"blind_boxes", boxes}}}}},
      {"halt", halt},
      {"gp",
       {{"signal_variance", c.gp.signal_variance},
        {"length_scale", c.gp.length_scale},
        {"noise_variance", c.gp.noise_variance},
        {"jitter", c.gp.jitter},
        {"beta", c.gp.beta},
        {"candidate_count", c.gp.candidate_count}}},
      {"score", {{"mode", score_mode_name(c.score.mode)}, {"car_labels", c.score.car_labels}}},
  };
}

std::string config_hash(const CampaignConfig& config) {
  const std::string text = config_to_json(config).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

}  // namespace blindspot
