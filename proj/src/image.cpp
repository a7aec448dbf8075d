// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace olat {

RadianceImage::RadianceImage(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw ValidationError("image dimensions must be positive");
  if (static_cast<std::size_t>(width) * height >
      (std::size_t{1} << 31) / kChannels)
    throw ValidationError("image dimensions overflow");
  data_.assign(value_count(), fill);
}

float sample_bilinear(const RadianceImage& img, float x, float y, int c) {
  const int w = img.width();
  const int h = img.height();
  // Clamp into the valid sample range so edge pixels extend outward.
  x = std::clamp(x, 0.0f, static_cast<float>(w - 1));
  y = std::clamp(y, 0.0f, static_cast<float>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 1);
  const int y0 = std::min(static_cast<int>(y), h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);
  const float top =
      img.at(x0, y0, c) * (1.0f - fx) + img.at(x1, y0, c) * fx;
  const float bot =
      img.at(x0, y1, c) * (1.0f - fx) + img.at(x1, y1, c) * fx;
  return top * (1.0f - fy) + bot * fy;
}

float luminance(const RadianceImage& img, int x, int y) {
  return 0.2126f * img.at(x, y, 0) + 0.7152f * img.at(x, y, 1) +
         0.0722f * img.at(x, y, 2);
}

std::vector<float> to_luminance(const RadianceImage& img) {
  std::vector<float> luma(img.pixel_count());
  const float* p = img.values().data();
  for (std::size_t i = 0; i < luma.size(); ++i, p += 3)
    luma[i] = 0.2126f * p[0] + 0.7152f * p[1] + 0.0722f * p[2];
  return luma;
}

void require_finite_nonnegative(const RadianceImage& img, const char* what) {
  for (float v : img.values()) {
    if (!std::isfinite(v))
      throw ValidationError(std::string(what) + ": non-finite value");
    if (v < 0.0f)
      throw ValidationError(std::string(what) + ": negative value");
  }
}

AlphaMatte::AlphaMatte(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw ValidationError("matte dimensions must be positive");
  data_.assign(static_cast<std::size_t>(width) * height,
               std::clamp(fill, 0.0f, 1.0f));
}

AlphaMatte::AlphaMatte(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0)
    throw ValidationError("matte dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw ValidationError("matte data length mismatch");
  clamp();
}

void AlphaMatte::clamp() {
  for (float& v : data_) v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
}

BayerPattern bayer_pattern_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "rggb") return BayerPattern::kRggb;
  if (s == "bggr") return BayerPattern::kBggr;
  if (s == "grbg") return BayerPattern::kGrbg;
  if (s == "gbrg") return BayerPattern::kGbrg;
  throw ValidationError("unknown bayer pattern: " + name);
}

const char* to_string(BayerPattern pattern) {
  switch (pattern) {
    case BayerPattern::kRggb: return "rggb";
    case BayerPattern::kBggr: return "bggr";
    case BayerPattern::kGrbg: return "grbg";
    case BayerPattern::kGbrg: return "gbrg";
  }
  return "rggb";
}

}  // namespace olat
