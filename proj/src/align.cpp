// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace olat {

namespace {

std::vector<std::size_t> tracking_positions(const CaptureStream& stream) {
  std::vector<std::size_t> tracking;
  for (std::size_t i = 0; i < stream.size(); ++i)
    if (stream.labels[i].is_tracking()) tracking.push_back(i);
  return tracking;
}

std::size_t index_of_timestamp(const CaptureStream& stream, std::int64_t ts) {
  const auto it = std::lower_bound(stream.timestamps.begin(),
                                   stream.timestamps.end(), ts);
  if (it == stream.timestamps.end() || *it != ts)
    throw ValidationError("timestamp " + std::to_string(ts) +
                          " outside stream");
  return static_cast<std::size_t>(it - stream.timestamps.begin());
}

// Pairwise flows between adjacent tracking frames, cached per direction.
// Key: (from tracking-list position, to tracking-list position).
class PairFlowCache {
 public:
  PairFlowCache(const CaptureStream& stream,
                const std::vector<std::size_t>& tracking,
                const FlowParams& params, int threads)
      : stream_(stream), tracking_(tracking), params_(params),
        threads_(threads) {}

  const FlowField& get(std::size_t from, std::size_t to) {
    const auto key = std::make_pair(from, to);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_
               .emplace(key, compute_flow(stream_.frames[tracking_[from]],
                                          stream_.frames[tracking_[to]],
                                          params_, threads_))
               .first;
    }
    return it->second;
  }

 private:
  const CaptureStream& stream_;
  const std::vector<std::size_t>& tracking_;
  FlowParams params_;
  int threads_;
  std::map<std::pair<std::size_t, std::size_t>, FlowField> cache_;
};

// Composed flows from tracking frames to one anchor, extended outward on
// demand: C[anchor] = 0 and C[p] = compose(C[p +- 1], hop p -> p +- 1).
class AnchorChain {
 public:
  AnchorChain(const CaptureStream& stream,
              const std::vector<std::size_t>& tracking, std::size_t anchor_pos,
              PairFlowCache& pairs)
      : anchor_pos_(anchor_pos), pairs_(pairs) {
    const RadianceImage& f = stream.frames[tracking[anchor_pos]];
    chain_[anchor_pos] = FlowField(f.width(), f.height());
  }

  const FlowField& to_anchor(std::size_t pos) {
    auto it = chain_.find(pos);
    if (it != chain_.end()) return it->second;
    if (pos < anchor_pos_) {
      const FlowField& next = to_anchor(pos + 1);
      return chain_.emplace(pos, compose_flow(next, pairs_.get(pos, pos + 1)))
          .first->second;
    }
    const FlowField& prev = to_anchor(pos - 1);
    return chain_.emplace(pos, compose_flow(prev, pairs_.get(pos, pos - 1)))
        .first->second;
  }

 private:
  std::size_t anchor_pos_;
  PairFlowCache& pairs_;
  std::map<std::size_t, FlowField> chain_;
};

struct Brackets {
  std::size_t lo = 0;  // tracking-list positions
  std::size_t hi = 0;
  double frac = 0.0;   // position of the frame between them
};

Brackets find_brackets(const CaptureStream& stream,
                       const std::vector<std::size_t>& tracking,
                       std::int64_t frame_ts) {
  const auto ts_of = [&](std::size_t pos) {
    return stream.timestamps[tracking[pos]];
  };
  if (tracking.empty() || frame_ts < ts_of(0) ||
      frame_ts > ts_of(tracking.size() - 1))
    throw ValidationError("no bracketing tracking frames for timestamp " +
                          std::to_string(frame_ts));

  // First tracking position with timestamp >= frame_ts.
  std::size_t hi = 0;
  while (ts_of(hi) < frame_ts) ++hi;
  if (ts_of(hi) == frame_ts) return {hi, hi, 0.0};
  const std::size_t lo = hi - 1;
  const double frac = static_cast<double>(frame_ts - ts_of(lo)) /
                      static_cast<double>(ts_of(hi) - ts_of(lo));
  return {lo, hi, frac};
}

FlowField frame_to_anchor_flow(const CaptureStream& stream,
                               const std::vector<std::size_t>& tracking,
                               AnchorChain& chain, std::int64_t frame_ts) {
  const Brackets br = find_brackets(stream, tracking, frame_ts);
  if (br.lo == br.hi) return chain.to_anchor(br.lo);
  const FlowField& a = chain.to_anchor(br.lo);
  const FlowField& b = chain.to_anchor(br.hi);
  return lerp_flow(a, b, br.frac);
}

}  // namespace

int default_window_frames(const CaptureSchedule& schedule) {
  // One full LED sweep (cycle/(cycle-1) frames per OLAT slot) plus a cycle
  // of slack, so every LED occurs at least once per side deep inside a
  // stream and once overall at its edges.
  const double sweep = static_cast<double>(schedule.led_count()) *
                       schedule.cycle / (schedule.cycle - 1);
  return static_cast<int>(std::ceil(sweep)) + schedule.cycle;
}

FlowField flow_to_anchor(const CaptureStream& stream, std::int64_t frame_ts,
                         std::int64_t anchor_ts, const FlowParams& params,
                         int threads) {
  const std::size_t anchor_index = index_of_timestamp(stream, anchor_ts);
  index_of_timestamp(stream, frame_ts);  // validates presence
  if (!stream.labels[anchor_index].is_tracking())
    throw ValidationError("anchor timestamp " + std::to_string(anchor_ts) +
                          " is not a tracking frame");

  const std::vector<std::size_t> tracking = tracking_positions(stream);
  const auto anchor_pos = static_cast<std::size_t>(
      std::find(tracking.begin(), tracking.end(), anchor_index) -
      tracking.begin());

  PairFlowCache pairs(stream, tracking, params, threads);
  AnchorChain chain(stream, tracking, anchor_pos, pairs);
  return frame_to_anchor_flow(stream, tracking, chain, frame_ts);
}

AssembleResult assemble_sets(const CaptureStream& stream,
                             const CaptureSchedule& schedule,
                             const AlignParams& params) {
  validate_schedule(schedule);
  if (stream.size() == 0) throw ValidationError("empty capture stream");

  const std::vector<std::size_t> tracking = tracking_positions(stream);
  if (tracking.empty())
    throw ValidationError("stream contains no tracking frames");

  const int window = params.window_frames > 0 ? params.window_frames
                                              : default_window_frames(schedule);
  const std::int64_t first_t = stream.timestamps[tracking.front()];
  const std::int64_t last_t = stream.timestamps[tracking.back()];
  const std::int64_t last_ts = stream.timestamps.back();

  // Anchor per stride multiple: the nearest tracking frame (earlier wins
  // ties). Strides below the cycle would map several targets onto one
  // tracking frame; those collapse to a single anchor.
  std::vector<std::size_t> anchors;
  for (std::int64_t target = 0; target <= last_ts;
       target += schedule.output_stride) {
    std::size_t best = 0;
    std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
    for (std::size_t pos = 0; pos < tracking.size(); ++pos) {
      const std::int64_t dist =
          std::abs(stream.timestamps[tracking[pos]] - target);
      if (dist < best_dist) {
        best_dist = dist;
        best = pos;
      }
    }
    if (anchors.empty() || anchors.back() != best) anchors.push_back(best);
  }

  // Occurrence list per LED for nearest-occurrence lookup.
  std::vector<std::vector<std::size_t>> occurrences(schedule.led_count());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const FrameLabel& label = stream.labels[i];
    if (!label.is_tracking() && label.led >= 0 &&
        label.led < schedule.led_count())
      occurrences[label.led].push_back(i);
  }

  AssembleResult result;
  PairFlowCache pairs(stream, tracking, params.flow, params.threads);

  for (std::size_t anchor_pos : anchors) {
    const std::size_t anchor_index = tracking[anchor_pos];
    const std::int64_t anchor_ts = stream.timestamps[anchor_index];

    // Gather the nearest usable occurrence of every LED. Frames outside the
    // first/last tracking frame cannot be bracketed and are not usable.
    std::vector<std::size_t> chosen(schedule.led_count());
    std::vector<int> missing;
    for (int led = 0; led < schedule.led_count(); ++led) {
      std::size_t best = 0;
      std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
      for (std::size_t idx : occurrences[led]) {
        const std::int64_t ts = stream.timestamps[idx];
        if (ts < first_t || ts > last_t) continue;
        const std::int64_t dist = std::abs(ts - anchor_ts);
        if (dist <= window && dist < best_dist) {
          best_dist = dist;
          best = idx;
        }
      }
      if (best_dist == std::numeric_limits<std::int64_t>::max())
        missing.push_back(led);
      else
        chosen[led] = best;
    }

    if (!missing.empty()) {
      if (params.skip_incomplete) {
        result.skipped.emplace_back(anchor_ts, std::move(missing));
        continue;
      }
      std::string msg = "anchor " + std::to_string(anchor_ts) +
                        ": no OLAT frame in window for LED";
      for (int led : missing) msg += " " + std::to_string(led);
      throw ValidationError(msg);
    }

    AnchorChain chain(stream, tracking, anchor_pos, pairs);
    OlatSet set;
    set.rig_name = params.rig_name;
    set.anchor_ts = anchor_ts;
    set.images.resize(schedule.led_count());
    SetProvenance prov;
    prov.anchor_ts = anchor_ts;
    prov.source_frame = chosen;
    for (int led = 0; led < schedule.led_count(); ++led) {
      const std::size_t idx = chosen[led];
      const FlowField flow = frame_to_anchor_flow(
          stream, tracking, chain, stream.timestamps[idx]);
      set.images[led] = warp(stream.frames[idx], flow, params.threads);
    }
    result.sets.push_back(std::move(set));
    result.provenance.push_back(std::move(prov));
  }
  return result;
}

}  // namespace olat
