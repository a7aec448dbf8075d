// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "olat/image.hpp"

namespace olat {

/// Dense backward displacement field in pixels: dst(p) corresponds to
/// src(p + flow(p)). Two interleaved channels (dx, dy).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // 2 channels, row-major

  FlowField() = default;
  FlowField(int w, int h)
      : width(w),
        height(h),
        data(static_cast<std::size_t>(w) * h * 2, 0.0f) {}

  float& u(int x, int y) {
    return data[(static_cast<std::size_t>(y) * width + x) * 2];
  }
  float u(int x, int y) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 2];
  }
  float& v(int x, int y) {
    return data[(static_cast<std::size_t>(y) * width + x) * 2 + 1];
  }
  float v(int x, int y) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 2 + 1];
  }
};

void validate_flow(const FlowField& flow);

/// Parameters of the coarse-to-fine estimator. Levels halve in resolution;
/// iteration counts are fixed so identical inputs always produce identical
/// fields.
struct FlowParams {
  int pyramid_levels = 4;
  int iterations_per_level = 4;
  int window_radius = 7;      // local least-squares window half-width
  int smooth_radius = 1;      // flow box-smoothing radius per iteration
  double min_eigenvalue = 1e-7;  // gate on the structure tensor
};

/// Dense pyramidal local (Lucas-Kanade style) flow between two images of
/// equal size, computed on the luma plane. Returns the backward field from
/// dst to src. Identical inputs yield an exactly zero field.
FlowField compute_flow(const RadianceImage& src, const RadianceImage& dst,
                       const FlowParams& params = {}, int threads = 0);

/// Backward-warps the image through the field with bilinear sampling:
/// out(p) = image(p + flow(p)), out-of-bounds samples clamping to the edge.
/// A zero field reproduces the input bitwise.
RadianceImage warp(const RadianceImage& image, const FlowField& flow,
                   int threads = 0);

/// Composition: given `outer` aligning Y to Z and `inner` aligning X to Y,
/// returns the field aligning X to Z:
/// out(p) = outer(p) + inner(p + outer(p)), inner sampled bilinearly.
FlowField compose_flow(const FlowField& outer, const FlowField& inner);

/// Per-pixel linear blend (1-t)*a + t*b.
FlowField lerp_flow(const FlowField& a, const FlowField& b, double t);

}  // namespace olat
