// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "olat/errors.hpp"

namespace olat {

/// H x W x 3 raster of linear radiance. Row-major, interleaved RGB, pixel
/// (0,0) at the top-left corner. Values are finite and nonnegative; loaders
/// clamp negative inputs and surface a count to the caller.
class RadianceImage {
 public:
  static constexpr int kChannels = 3;

  RadianceImage() = default;
  RadianceImage(int width, int height, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::size_t value_count() const { return pixel_count() * kChannels; }

  float& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  float at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  float* row(int y) {
    return data_.data() + static_cast<std::size_t>(y) * width_ * kChannels;
  }
  const float* row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_ * kChannels;
  }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  bool same_shape(const RadianceImage& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Clamped bilinear sample of one channel at a fractional pixel position.
/// Coordinates are pixel-centered: (0,0) addresses the center of the
/// top-left pixel. Out-of-range positions clamp to the nearest edge pixel.
float sample_bilinear(const RadianceImage& img, float x, float y, int c);

/// Rec. 709 luma of the pixel at (x, y).
float luminance(const RadianceImage& img, int x, int y);

/// Extracts the Rec. 709 luma plane.
std::vector<float> to_luminance(const RadianceImage& img);

/// Throws ValidationError if any value is non-finite or negative.
void require_finite_nonnegative(const RadianceImage& img, const char* what);

/// Per-pixel foreground coverage in [0,1]; same raster layout as
/// RadianceImage but single channel. Values are clamped on construction.
class AlphaMatte {
 public:
  AlphaMatte() = default;
  AlphaMatte(int width, int height, float fill = 0.0f);
  AlphaMatte(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }

  float& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  float at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  /// Clamps every value into [0,1] (NaNs become 0).
  void clamp();

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// 2x2 color filter array layouts, named by the top-left quad reading order.
enum class BayerPattern { kRggb, kBggr, kGrbg, kGbrg };

BayerPattern bayer_pattern_from_string(const std::string& name);
const char* to_string(BayerPattern pattern);

/// 8-bit single-channel sensor mosaic. Width and height must be even.
struct BayerFrame {
  int width = 0;
  int height = 0;
  BayerPattern pattern = BayerPattern::kRggb;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

}  // namespace olat
