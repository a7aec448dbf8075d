// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "olat/image.hpp"
#include "olat/rig.hpp"

namespace olat {

/// One aligned reflectance field: image i shows the subject lit by LED i
/// alone, all at a single pose/expression instant. Images share dimensions
/// and the index order matches the rig the set was captured under.
struct OlatSet {
  std::vector<RadianceImage> images;
  std::string rig_name;
  std::int64_t anchor_ts = 0;

  int led_count() const { return static_cast<int>(images.size()); }
  int width() const { return images.empty() ? 0 : images[0].width(); }
  int height() const { return images.empty() ? 0 : images[0].height(); }
};

/// Throws ValidationError unless the set is nonempty with uniformly shaped,
/// finite, nonnegative images.
void validate_olat_set(const OlatSet& set);

/// Weighted superposition of the reflectance field:
/// out(p) = sum_i weights[i] * images[i](p), channel-wise. Accumulation runs
/// in double per pixel in LED order and the HDR result is not clamped.
RadianceImage relight(const OlatSet& set, const LightWeights& weights,
                      int threads = 0);

/// Element-wise relight of a set sequence. A single weights entry is
/// broadcast across all frames.
std::vector<RadianceImage> relight_sequence(
    const std::vector<OlatSet>& sets,
    const std::vector<LightWeights>& weights_track, int threads = 0);

/// out = alpha * fg + (1 - alpha) * bg, per pixel per channel.
RadianceImage composite(const RadianceImage& fg, const AlphaMatte& alpha,
                        const RadianceImage& bg);

/// Component-wise sum of two weight vectors; by superposition,
/// relight(set, add_rim(a, b)) == relight(set, a) + relight(set, b).
LightWeights add_rim(const LightWeights& base_weights,
                     const LightWeights& rim);

}  // namespace olat
