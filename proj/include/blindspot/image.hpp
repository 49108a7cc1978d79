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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace blindspot {

/// Interleaved 8-bit raster, row-major, origin top-left.
template <int Channels>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster() = default;
  Raster(int width, int height)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height * Channels, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t* pixel(int x, int y) {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * Channels;
  }
  const std::uint8_t* pixel(int x, int y) const {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * Channels;
  }

  std::span<std::uint8_t> bytes() { return data_; }
  std::span<const std::uint8_t> bytes() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

using RgbImage = Raster<3>;
/// Straight (non-premultiplied) alpha.
using RgbaImage = Raster<4>;

// PNG I/O. Encoding is deterministic: no timestamps or text chunks, fixed
// filter and compression settings, so identical rasters give identical bytes.

/// Alpha, if present, is dropped. Throws IoFailure.
RgbImage read_png_rgb(const std::filesystem::path& path);
/// RGB inputs get an opaque alpha channel. Throws IoFailure.
RgbaImage read_png_rgba(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const RgbImage& image);
std::vector<std::uint8_t> encode_png(const RgbaImage& image);
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const RgbaImage& image);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace blindspot
