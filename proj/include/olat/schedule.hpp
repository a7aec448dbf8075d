// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "olat/image.hpp"

namespace olat {

/// Capture timing: within every `cycle` consecutive frames the last one is a
/// full-lit tracking frame and the rest are OLAT frames, stepping through
/// `led_order` cyclically. Assembled output sets land every `output_stride`
/// frames, so the set rate is capture_fps / output_stride.
struct CaptureSchedule {
  int cycle = 6;
  std::vector<int> led_order;  // permutation of 0..N-1
  double capture_fps = 1000.0;
  int output_stride = 40;

  int led_count() const { return static_cast<int>(led_order.size()); }
  double output_rate() const { return capture_fps / output_stride; }

  /// Identity LED order for `leds` lights.
  static CaptureSchedule with_identity_order(int leds, int cycle = 6,
                                             double fps = 1000.0,
                                             int stride = 40);
};

void validate_schedule(const CaptureSchedule& schedule);

struct FrameLabel {
  enum class Kind { kTracking, kOlat };
  Kind kind = Kind::kOlat;
  int led = -1;  // valid when kind == kOlat

  bool is_tracking() const { return kind == Kind::kTracking; }
};

/// Time-ordered capture frames with their schedule labels. Timestamps are
/// frame indices at capture_fps.
struct CaptureStream {
  std::vector<RadianceImage> frames;
  std::vector<FrameLabel> labels;
  std::vector<std::int64_t> timestamps;

  std::size_t size() const { return frames.size(); }
};

/// Labels a raw frame sequence per the schedule. Frame i is a tracking
/// frame when (i % cycle) == cycle-1; OLAT slots take led_order entries
/// cyclically. The stream must contain at least one full cycle.
CaptureStream label_stream(std::vector<RadianceImage> frames,
                           const CaptureSchedule& schedule);

/// Label sequence only (no pixel data), same rule as label_stream.
std::vector<FrameLabel> make_labels(std::size_t frame_count,
                                    const CaptureSchedule& schedule);

}  // namespace olat
