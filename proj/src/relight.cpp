// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/relight.hpp"

#include <cmath>

#include "olat/parallel.hpp"

namespace olat {

void validate_olat_set(const OlatSet& set) {
  if (set.images.empty()) throw ValidationError("OLAT set has no images");
  for (const RadianceImage& img : set.images) {
    if (!img.same_shape(set.images[0]))
      throw ValidationError("OLAT set images differ in shape");
    require_finite_nonnegative(img, "OLAT image");
  }
}

RadianceImage relight(const OlatSet& set, const LightWeights& weights,
                      int threads) {
  if (set.images.empty()) throw ValidationError("OLAT set has no images");
  if (weights.size() != set.images.size())
    throw ValidationError("weights length " + std::to_string(weights.size()) +
                          " does not match LED count " +
                          std::to_string(set.images.size()));
  for (const Rgb& w : weights) {
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(w[c]))
        throw ValidationError("non-finite light weight");
    }
  }

  const int w = set.width();
  const int h = set.height();
  const int leds = set.led_count();
  RadianceImage out(w, h);

  // Accumulate in double, always in LED order: 96-term float sums would
  // drop about two bits, and a fixed order keeps the result independent of
  // the row partitioning.
  parallel_for(
      0, h,
      [&](int y) {
        float* dst = out.row(y);
        std::vector<double> acc(static_cast<std::size_t>(w) * 3, 0.0);
        for (int i = 0; i < leds; ++i) {
          const float* src = set.images[i].row(y);
          const Rgb& lw = weights[i];
          for (int x = 0; x < w; ++x) {
            acc[x * 3 + 0] += lw.r * src[x * 3 + 0];
            acc[x * 3 + 1] += lw.g * src[x * 3 + 1];
            acc[x * 3 + 2] += lw.b * src[x * 3 + 2];
          }
        }
        for (int x = 0; x < w * 3; ++x) dst[x] = static_cast<float>(acc[x]);
      },
      threads);
  return out;
}

std::vector<RadianceImage> relight_sequence(
    const std::vector<OlatSet>& sets,
    const std::vector<LightWeights>& weights_track, int threads) {
  if (weights_track.empty())
    throw ValidationError("relight_sequence: no weights given");
  if (weights_track.size() != 1 && weights_track.size() != sets.size())
    throw ValidationError(
        "relight_sequence: weights track must match the set count or "
        "broadcast from one entry");

  std::vector<RadianceImage> frames(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const LightWeights& w =
        weights_track.size() == 1 ? weights_track[0] : weights_track[i];
    frames[i] = relight(sets[i], w, threads);
  }
  return frames;
}

RadianceImage composite(const RadianceImage& fg, const AlphaMatte& alpha,
                        const RadianceImage& bg) {
  if (!fg.same_shape(bg) || fg.width() != alpha.width() ||
      fg.height() != alpha.height())
    throw ValidationError("composite: dimension mismatch");

  RadianceImage out(fg.width(), fg.height());
  const float* f = fg.values().data();
  const float* b = bg.values().data();
  const float* a = alpha.values().data();
  float* o = out.values().data();
  const std::size_t n = fg.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const float av = a[i];
    for (int c = 0; c < 3; ++c)
      o[i * 3 + c] = av * f[i * 3 + c] + (1.0f - av) * b[i * 3 + c];
  }
  return out;
}

LightWeights add_rim(const LightWeights& base_weights,
                     const LightWeights& rim) {
  if (base_weights.size() != rim.size())
    throw ValidationError("add_rim: weight length mismatch");
  LightWeights out(base_weights.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = base_weights[i] + rim[i];
  validate_weights(out, -1);
  return out;
}

}  // namespace olat
