// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "olat/relight.hpp"
#include "olat/schedule.hpp"

namespace olat {

// On-disk layouts.
//
// OLAT set: directory `set_<anchor:06>/` holding `led_<index:03>.pfm` plus
// `manifest.txt` with the rig name, anchor timestamp and LED order.
//
// Capture stream: directory holding `frame_<ts:06>.pfm` plus `stream.txt`
// with fps, cycle, LED count and LED order.

std::string set_directory_name(std::int64_t anchor_ts);

void write_olat_set(const std::string& parent_dir, const OlatSet& set);
OlatSet read_olat_set(const std::string& set_dir);

/// All `set_*` subdirectories of `dir` in ascending anchor order; if `dir`
/// itself is a set directory, just that one.
std::vector<std::string> find_set_directories(const std::string& dir);

struct StreamManifest {
  double fps = 1000.0;
  int cycle = 6;
  int leds = 0;
  std::vector<int> led_order;  // empty means identity
  std::size_t frame_count = 0;
};

void write_capture_stream(const std::string& dir, const CaptureStream& stream,
                          const CaptureSchedule& schedule);
CaptureStream read_capture_stream(const std::string& dir,
                                  StreamManifest* manifest = nullptr);
StreamManifest read_stream_manifest(const std::string& dir);

}  // namespace olat
