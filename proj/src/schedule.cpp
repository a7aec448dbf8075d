// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace olat {

CaptureSchedule CaptureSchedule::with_identity_order(int leds, int cycle,
                                                     double fps, int stride) {
  CaptureSchedule s;
  s.cycle = cycle;
  s.capture_fps = fps;
  s.output_stride = stride;
  s.led_order.resize(leds);
  std::iota(s.led_order.begin(), s.led_order.end(), 0);
  return s;
}

void validate_schedule(const CaptureSchedule& schedule) {
  if (schedule.cycle < 2)
    throw ValidationError("schedule cycle must be at least 2");
  if (schedule.led_order.empty())
    throw ValidationError("schedule LED order is empty");
  if (!(schedule.capture_fps > 0.0) || !std::isfinite(schedule.capture_fps))
    throw ValidationError("capture fps must be positive");
  if (schedule.output_stride < 1)
    throw ValidationError("output stride must be at least 1");

  std::vector<bool> seen(schedule.led_order.size(), false);
  for (int led : schedule.led_order) {
    if (led < 0 || led >= static_cast<int>(schedule.led_order.size()) ||
        seen[led])
      throw ValidationError("schedule LED order is not a permutation");
    seen[led] = true;
  }
}

std::vector<FrameLabel> make_labels(std::size_t frame_count,
                                    const CaptureSchedule& schedule) {
  validate_schedule(schedule);
  std::vector<FrameLabel> labels(frame_count);
  const std::size_t leds = schedule.led_order.size();
  std::size_t olat_slot = 0;
  for (std::size_t i = 0; i < frame_count; ++i) {
    if (i % schedule.cycle == static_cast<std::size_t>(schedule.cycle) - 1) {
      labels[i] = {FrameLabel::Kind::kTracking, -1};
    } else {
      labels[i] = {FrameLabel::Kind::kOlat,
                   schedule.led_order[olat_slot % leds]};
      ++olat_slot;
    }
  }
  return labels;
}

CaptureStream label_stream(std::vector<RadianceImage> frames,
                           const CaptureSchedule& schedule) {
  validate_schedule(schedule);
  if (frames.size() < static_cast<std::size_t>(schedule.cycle))
    throw ValidationError("incomplete cycle: stream has " +
                          std::to_string(frames.size()) + " frames, cycle is " +
                          std::to_string(schedule.cycle));
  for (const RadianceImage& f : frames) {
    if (!f.same_shape(frames[0]))
      throw ValidationError("stream frames differ in shape");
  }

  CaptureStream stream;
  stream.labels = make_labels(frames.size(), schedule);
  stream.timestamps.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i)
    stream.timestamps[i] = static_cast<std::int64_t>(i);
  stream.frames = std::move(frames);
  return stream;
}

}  // namespace olat
