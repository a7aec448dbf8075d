// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/demosaic.hpp"

namespace olat {

namespace {

// Channel (0=R,1=G,2=B) populated at parity (px, py) of the 2x2 quad.
int channel_at(BayerPattern pattern, int px, int py) {
  static constexpr int kLayout[4][4] = {
      // (0,0) (1,0) (0,1) (1,1)
      {0, 1, 1, 2},  // RGGB
      {2, 1, 1, 0},  // BGGR
      {1, 0, 2, 1},  // GRBG
      {1, 2, 0, 1},  // GBRG
  };
  return kLayout[static_cast<int>(pattern)][py * 2 + px];
}

// Reflection without edge repetition keeps the mosaic parity intact at the
// borders (position -1 maps to 1, which carries the same channel).
inline int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

}  // namespace

RadianceImage demosaic(const BayerFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0 ||
      frame.width % 2 != 0 || frame.height % 2 != 0)
    throw ValidationError("demosaic: dimensions must be even and positive");
  if (frame.data.size() !=
      static_cast<std::size_t>(frame.width) * frame.height)
    throw ValidationError("demosaic: data length mismatch");

  const int w = frame.width;
  const int h = frame.height;
  RadianceImage out(w, h);

  auto raw = [&](int x, int y) -> float {
    return static_cast<float>(frame.at(reflect(x, w), reflect(y, h))) / 255.0f;
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int own = channel_at(frame.pattern, x & 1, y & 1);
      for (int c = 0; c < 3; ++c) {
        if (c == own) {
          out.at(x, y, c) = raw(x, y);
          continue;
        }
        // Prefer the 4-connected neighbors that carry the channel (all four
        // for green at a color site, the matching axis pair at a green
        // site); fall back to the diagonal quad for the opposite color.
        float sum = 0.0f;
        int count = 0;
        const int horiz = channel_at(frame.pattern, (x + 1) & 1, y & 1);
        const int vert = channel_at(frame.pattern, x & 1, (y + 1) & 1);
        if (horiz == c) {
          sum += raw(x - 1, y) + raw(x + 1, y);
          count += 2;
        }
        if (vert == c) {
          sum += raw(x, y - 1) + raw(x, y + 1);
          count += 2;
        }
        if (count == 0) {
          // Row-paired so the rounding pattern is mirror-symmetric.
          sum = (raw(x - 1, y - 1) + raw(x + 1, y - 1)) +
                (raw(x - 1, y + 1) + raw(x + 1, y + 1));
          count = 4;
        }
        out.at(x, y, c) = sum / static_cast<float>(count);
      }
    }
  }
  return out;
}

BayerPattern mirrored_pattern(BayerPattern pattern) {
  switch (pattern) {
    case BayerPattern::kRggb: return BayerPattern::kGrbg;
    case BayerPattern::kBggr: return BayerPattern::kGbrg;
    case BayerPattern::kGrbg: return BayerPattern::kRggb;
    case BayerPattern::kGbrg: return BayerPattern::kBggr;
  }
  return pattern;
}

}  // namespace olat
