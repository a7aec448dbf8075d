// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "olat/image.hpp"

namespace olat {

/// Bilinear demosaic of an 8-bit Bayer mosaic into linear [0,1] RGB.
/// Missing channels are interpolated from the 3x3 neighborhood with
/// edge-clamped taps; dimensions are preserved.
RadianceImage demosaic(const BayerFrame& frame);

/// Pattern label after mirroring the mosaic left-right (columns swap within
/// each 2x2 quad).
BayerPattern mirrored_pattern(BayerPattern pattern);

}  // namespace olat
