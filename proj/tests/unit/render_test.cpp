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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "blindspot/demo_scene.hpp"
#include "blindspot/errors.hpp"
#include "blindspot/image.hpp"
#include "blindspot/render.hpp"
#include "test_support.hpp"

namespace blindspot {
namespace {

RgbImage gradient_background(int w, int h) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(x % 256);
      p[1] = static_cast<std::uint8_t>(y % 256);
      p[2] = static_cast<std::uint8_t>((x + y) % 256);
    }
  }
  return img;
}

// Opaque block of the given colour surrounded by `margin` transparent pixels.
RgbaImage block_sprite(int w, int h, int margin) {
  RgbaImage img(w, h);
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = 250;
      p[1] = 20;
      p[2] = 30;
      p[3] = 255;
    }
  }
  return img;
}

// Background 600x400, vanishing point (300,150), near baseline at y=350.
SceneConfig hand_scene(RgbaImage sprite, double w_near = 200.0) {
  SceneConfig s;
  s.id = "hand";
  s.background = std::make_shared<const RgbImage>(gradient_background(600, 400));
  s.sprite = std::make_shared<const RgbaImage>(std::move(sprite));
  s.vanish = {300, 150};
  s.y_near = 350;
  s.x_left_near = 100;
  s.x_right_near = 500;
  s.w_near = w_near;
  s.t_far = 0.95;
  s.validate();
  return s;
}

const ModificationSpace kXY({Dimension::kCarX, Dimension::kCarDepth});

ModificationPoint pt(std::vector<double> c) { return ModificationPoint::unchecked(std::move(c)); }

TEST(Placement, HandExample) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const auto p = place_car(s, 0.5, 0.5);
  EXPECT_NEAR(p.bottom_center.y, 255.0, 1e-12);
  EXPECT_NEAR(p.ratio, 0.525, 1e-12);
  EXPECT_NEAR(p.width, 105.0, 1e-12);
  EXPECT_NEAR(p.height, 52.5, 1e-12);
  EXPECT_NEAR(p.bottom_center.x, 300.0, 1e-12);
}

TEST(Placement, NearBaseline) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const auto p = place_car(s, 0.25, 0.0);
  EXPECT_EQ(p.bottom_center.y, 350.0);
  EXPECT_EQ(p.ratio, 1.0);
  EXPECT_EQ(p.width, 200.0);
  EXPECT_EQ(p.bottom_center.x, 200.0);
}

TEST(Placement, LeftEndpointFollowsVanishingLine) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  for (double d = 0.0; d <= 1.0; d += 0.125) {
    const auto p = place_car(s, 0.0, d);
    // Point on the segment from (x_left_near, y_near) to the vanishing point.
    const double frac = (s.y_near - p.bottom_center.y) / (s.y_near - s.vanish.y);
    const double xl = s.x_left_near + frac * (s.vanish.x - s.x_left_near);
    EXPECT_NEAR(p.bottom_center.x, xl, 1e-9) << "depth " << d;
  }
}

TEST(Composite, OpaqueSpriteBoxIsThePlacedRectangle) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const auto p = place_car(s, 0.3, 0.4);
  const auto c = composite(s, p);
  const double w = std::lround(p.width), h = std::lround(p.height);
  const double left = std::lround(p.bottom_center.x - p.width / 2);
  const double bottom = std::lround(p.bottom_center.y);
  EXPECT_EQ(c.gt_box, (BoundingBox{left, bottom - h, left + w, bottom}));
}

TEST(Composite, TransparentMarginExcluded) {
  // w_near equals the sprite width, so the near-baseline copy is unscaled.
  const auto s = hand_scene(block_sprite(100, 60, 10), 100.0);
  const auto c = composite(s, place_car(s, 0.5, 0.0));
  const double left = 300 - 50, top = 350 - 60;
  EXPECT_EQ(c.gt_box, (BoundingBox{left + 10, top + 10, left + 90, top + 50}));
  // The margin leaves the background untouched.
  EXPECT_EQ(c.image.pixel(static_cast<int>(left) + 5, static_cast<int>(top) + 5)[0],
            s.background->pixel(static_cast<int>(left) + 5, static_cast<int>(top) + 5)[0]);
  EXPECT_EQ(c.image.pixel(static_cast<int>(left) + 50, static_cast<int>(top) + 30)[0], 250);
}

TEST(Composite, FaintHaloIsNeitherDrawnNorBoxed) {
  RgbaImage sprite = block_sprite(100, 60, 10);
  for (int x = 0; x < 100; ++x) sprite.pixel(x, 2)[3] = kAlphaThreshold - 1;
  for (int x = 0; x < 100; ++x) sprite.pixel(x, 5)[3] = kAlphaThreshold;
  const auto s = hand_scene(sprite, 100.0);
  const auto c = composite(s, place_car(s, 0.5, 0.0));
  EXPECT_EQ(c.gt_box.y_min, 350 - 60 + 5);
  EXPECT_EQ(c.gt_box.x_min, 250);
  EXPECT_EQ(c.gt_box.x_max, 350);
  const int row = 350 - 60 + 2;
  for (int x = 250; x < 350; ++x) {
    EXPECT_EQ(c.image.pixel(x, row)[0], s.background->pixel(x, row)[0]);
  }
}

TEST(Composite, StraightAlphaBlend) {
  RgbaImage sprite(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      std::uint8_t* p = sprite.pixel(x, y);
      p[0] = 200;
      p[1] = 0;
      p[2] = 100;
      p[3] = 64;
    }
  }
  auto s = hand_scene(sprite, 8.0);
  const auto c = composite(s, place_car(s, 0.5, 0.0));
  const int x = static_cast<int>(c.gt_box.x_min) + 1, y = static_cast<int>(c.gt_box.y_min) + 1;
  const double a = 64.0 / 255.0;
  const std::uint8_t* dst = s.background->pixel(x, y);
  EXPECT_EQ(c.image.pixel(x, y)[0], std::lround(a * 200 + (1 - a) * dst[0]));
  EXPECT_EQ(c.image.pixel(x, y)[1], std::lround((1 - a) * dst[1]));
  EXPECT_EQ(c.image.pixel(x, y)[2], std::lround(a * 100 + (1 - a) * dst[2]));
}

TEST(Composite, DegenerateSizes) {
  const auto s = hand_scene(block_sprite(100, 50, 0), 8.0);
  EXPECT_THROW(composite(s, place_car(s, 0.5, 1.0)), DegeneratePlacement);
  Placement p = place_car(s, 0.5, 0.0);
  p.height = 1.4;
  EXPECT_THROW(composite(s, p), DegeneratePlacement);
}

TEST(Composite, BoxClampedAtImageEdge) {
  SceneConfig s = hand_scene(block_sprite(100, 50, 0));
  SceneConfig edge = s;
  edge.x_left_near = 0;
  const auto c = composite(edge, place_car(edge, 0.0, 0.0));
  EXPECT_EQ(c.gt_box.x_min, 0.0);
  EXPECT_EQ(c.gt_box.x_max, 100.0);
}

TEST(Scene, Validation) {
  auto s = hand_scene(block_sprite(100, 50, 0));
  auto broken = [&](auto mutate) {
    SceneConfig c = s;
    mutate(c);
    return c;
  };
  EXPECT_THROW(broken([](SceneConfig& c) { c.vanish.y = 360; }).validate(), ConfigError);
  EXPECT_THROW(broken([](SceneConfig& c) { c.y_near = 400; }).validate(), ConfigError);
  EXPECT_THROW(broken([](SceneConfig& c) { c.x_right_near = 50; }).validate(), ConfigError);
  EXPECT_THROW(broken([](SceneConfig& c) { c.t_far = 1.0; }).validate(), ConfigError);
  EXPECT_THROW(broken([](SceneConfig& c) { c.sprite = std::make_shared<RgbaImage>(8, 8); }).validate(),
               ConfigError);
}

// Scalar restatement of the photometric pipeline, channel by channel.
std::array<long, 3> photometric_oracle(std::array<long, 3> px, double b, double c, double s) {
  auto clamp_round = [](double v) { return std::lround(std::min(255.0, std::max(0.0, v))); };
  const double luma = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  std::array<long, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const long sat = clamp_round(luma + 2 * s * (px[k] - luma));
    const long con = clamp_round(std::pow(2.0, 2 * c - 1) * (sat - 128) + 128);
    out[k] = clamp_round(con + std::lround((2 * b - 1) * 64));
  }
  return out;
}

RgbImage one_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img(1, 1);
  img.pixel(0, 0)[0] = r;
  img.pixel(0, 0)[1] = g;
  img.pixel(0, 0)[2] = b;
  return img;
}

TEST(Photometric, HandExamples) {
  const auto desat = apply_photometric(one_pixel(200, 100, 50), 0.5, 0.5, 0.0);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(desat.pixel(0, 0)[c], 124);

  for (double contrast : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const auto gray = apply_photometric(one_pixel(128, 128, 128), 0.5, contrast, 0.5);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(gray.pixel(0, 0)[c], 128);
  }
  EXPECT_EQ(apply_photometric(one_pixel(10, 100, 250), 1.0, 0.5, 0.5).pixel(0, 0)[1], 164);
  EXPECT_EQ(apply_photometric(one_pixel(10, 100, 250), 0.0, 0.5, 0.5).pixel(0, 0)[0], 0);
  EXPECT_EQ(apply_photometric(one_pixel(138, 118, 128), 0.5, 1.0, 0.5).pixel(0, 0)[0], 148);
  EXPECT_EQ(apply_photometric(one_pixel(138, 118, 128), 0.5, 0.0, 0.5).pixel(0, 0)[1], 123);
}

TEST(PhotometricProperty, IdentityAtMidpoint) {
  testing::Gen gen(6);
  RgbImage img(64, 64);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(gen.integer(0, 255));
  const auto out = apply_photometric(img, 0.5, 0.5, 0.5);
  for (std::size_t i = 0; i < img.bytes().size(); ++i) {
    EXPECT_LE(std::abs(int(out.bytes()[i]) - int(img.bytes()[i])), 1);
  }
}

TEST(PhotometricProperty, MatchesScalarRestatement) {
  testing::Gen gen(7);
  for (int t = 0; t < 3000; ++t) {
    const std::array<long, 3> px{gen.integer(0, 255), gen.integer(0, 255), gen.integer(0, 255)};
    const double b = gen.uniform(), c = gen.uniform(), s = gen.uniform();
    const auto out = apply_photometric(one_pixel(px[0], px[1], px[2]), b, c, s);
    const auto ref = photometric_oracle(px, b, c, s);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(out.pixel(0, 0)[k], ref[k]);
  }
}

TEST(Generate, FarRightLowContrast) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const ModificationSpace space({Dimension::kCarX, Dimension::kCarDepth, Dimension::kContrast});
  const auto sample = generate_image(s, space, pt({1, 1, 1}));
  const double r = 1 - s.t_far;
  const double x_right = s.vanish.x + (s.x_right_near - s.vanish.x) * r;
  EXPECT_NEAR(sample.gt_box.center().x, x_right, 1.0);
  EXPECT_EQ(sample.gt_box.y_max, std::lround(s.y_near + s.t_far * (s.vanish.y - s.y_near)));
  EXPECT_EQ(sample.gt_box.width(), std::lround(s.w_near * r));
  // Background pixel far from the car: contrast halved around 128.
  const std::uint8_t* bg = s.background->pixel(20, 30);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(sample.image.pixel(20, 30)[c], std::lround(0.5 * (bg[c] - 128.0) + 128.0));
  }
}

TEST(Generate, NearLeftIdentityContrast) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const ModificationSpace space({Dimension::kCarX, Dimension::kCarDepth, Dimension::kContrast});
  const auto sample = generate_image(s, space, pt({0, 0, 0.5}));
  EXPECT_EQ(sample.gt_box.center().x, s.x_left_near);
  EXPECT_EQ(sample.gt_box.width(), s.w_near);
  EXPECT_EQ(sample.gt_box.y_max, s.y_near);
  const Composite plain = composite(s, place_car(s, 0, 0));
  EXPECT_EQ(sample.image, plain.image);
}

TEST(Generate, EndpointWidthRatio) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const double near = generate_image(s, kXY, pt({0.5, 0})).gt_box.width();
  const double far = generate_image(s, kXY, pt({0.5, 1})).gt_box.width();
  EXPECT_NEAR(far, (1 - s.t_far) * near, 2.0);
}

TEST(Generate, DefaultsForUnboundDimensions) {
  const auto s = hand_scene(block_sprite(100, 50, 0));
  const ModificationSpace only_brightness({Dimension::kBrightness});
  const auto sample = generate_image(s, only_brightness, pt({0.5}), 3);
  const auto c = composite(s, place_car(s, 0.5, 0.0));
  EXPECT_EQ(sample.gt_box, c.gt_box);
  EXPECT_EQ(sample.image, c.image);
  EXPECT_EQ(sample.index, 3u);
  EXPECT_EQ(sample.scene_id, "hand");
  EXPECT_THROW(generate_image(s, only_brightness, pt({0.5, 0.5})), DimensionMismatch);
}

TEST(Generate, ByteIdenticalPng) {
  const auto s = make_demo_scene();
  const ModificationSpace space({Dimension::kCarX, Dimension::kCarDepth, Dimension::kContrast,
                                 Dimension::kSaturation, Dimension::kBrightness});
  testing::Gen gen(10);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> c(5);
    for (auto& v : c) v = gen.uniform();
    c[1] = gen.uniform(0, 0.9);
    const auto a = generate_image(s, space, pt(c));
    const auto b = generate_image(s, space, pt(c));
    EXPECT_EQ(encode_png(a.image), encode_png(b.image));
    EXPECT_EQ(a.gt_box, b.gt_box);
  }
}

TEST(RenderProperty, AreaMonotoneInDepth) {
  const auto s = make_demo_scene();
  testing::Gen gen(12);
  for (int sweep = 0; sweep < 20; ++sweep) {
    const double mx = gen.uniform();
    double prev = INFINITY;
    for (int k = 0; k < 50; ++k) {
      const double d = k / 49.0;
      const auto box = generate_image(s, kXY, pt({mx, d})).gt_box;
      EXPECT_LE(box.area(), prev) << "mx=" << mx << " depth=" << d;
      prev = box.area();
    }
  }
}

TEST(RenderProperty, ContainmentBottomRowAndAspect) {
  const auto s = hand_scene(block_sprite(120, 48, 0));
  testing::Gen gen(13);
  for (int t = 0; t < 300; ++t) {
    const double mx = gen.uniform(), d = gen.uniform();
    const auto p = place_car(s, mx, d);
    const auto c = composite(s, p);
    EXPECT_GE(c.gt_box.x_min, 0);
    EXPECT_GE(c.gt_box.y_min, 0);
    EXPECT_LE(c.gt_box.x_max, s.background->width());
    EXPECT_LE(c.gt_box.y_max, s.background->height());
    EXPECT_TRUE(c.gt_box.valid());
    EXPECT_EQ(c.gt_box.y_max, std::min<double>(std::lround(p.bottom_center.y), s.background->height()));
    EXPECT_NEAR(c.gt_box.width() * 48.0 / 120.0, c.gt_box.height(), 1.0) << "depth " << d;
  }
}

TEST(RenderProperty, BoxCoversEveryChangedPixel) {
  const auto s = make_demo_scene(400, 160);
  testing::Gen gen(14);
  for (int t = 0; t < 40; ++t) {
    const auto c = composite(s, place_car(s, gen.uniform(), gen.uniform(0, 0.9)));
    for (int y = 0; y < c.image.height(); ++y) {
      for (int x = 0; x < c.image.width(); ++x) {
        if (!std::equal(c.image.pixel(x, y), c.image.pixel(x, y) + 3, s.background->pixel(x, y))) {
          ASSERT_TRUE(x >= c.gt_box.x_min && x < c.gt_box.x_max && y >= c.gt_box.y_min &&
                      y < c.gt_box.y_max);
        }
      }
    }
  }
}

}  // namespace
}  // namespace blindspot
