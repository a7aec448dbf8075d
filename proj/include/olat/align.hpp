// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "olat/flow.hpp"
#include "olat/relight.hpp"
#include "olat/schedule.hpp"

namespace olat {

/// Assembly controls beyond the capture schedule itself.
struct AlignParams {
  FlowParams flow;
  /// Half-width, in frames, of the search window around an anchor when
  /// gathering the nearest occurrence of each LED. 0 derives a default wide
  /// enough for one full LED sweep on either side.
  int window_frames = 0;
  /// When true, anchors whose window misses some LED are skipped (and
  /// reported) instead of failing the whole assembly.
  bool skip_incomplete = false;
  std::string rig_name;
  int threads = 0;
};

/// Default gather window: one full LED sweep plus one cycle of slack.
int default_window_frames(const CaptureSchedule& schedule);

/// Backward flow aligning the frame at `frame_ts` to the tracking frame at
/// `anchor_ts`: pairwise flows between adjacent tracking frames are chained
/// toward the anchor, and the fractional position of frame_ts between its
/// bracketing tracking frames interpolates linearly between the two
/// bracket chains. warp(frame, result) is the frame re-posed at the anchor.
FlowField flow_to_anchor(const CaptureStream& stream, std::int64_t frame_ts,
                         std::int64_t anchor_ts, const FlowParams& params = {},
                         int threads = 0);

/// One anchor's gathered sources: source_frame[i] is the stream index whose
/// OLAT image fills LED slot i.
struct SetProvenance {
  std::int64_t anchor_ts = 0;
  std::vector<std::size_t> source_frame;
};

struct AssembleResult {
  std::vector<OlatSet> sets;
  std::vector<SetProvenance> provenance;
  /// Anchors dropped under skip_incomplete, with the LED indices that were
  /// missing from their windows.
  std::vector<std::pair<std::int64_t, std::vector<int>>> skipped;
};

/// Assembles temporally aligned OLAT sets. Anchors are the tracking frames
/// nearest to multiples of output_stride; for each anchor every LED takes
/// its temporally nearest occurrence inside the window (consecutive sets
/// thereby reuse source frames whose nearest-anchor assignment overlaps) and
/// is warped to the anchor via flow_to_anchor. Missing coverage is an error
/// naming the absent LED indices unless skip_incomplete is set.
AssembleResult assemble_sets(const CaptureStream& stream,
                             const CaptureSchedule& schedule,
                             const AlignParams& params = {});

}  // namespace olat
