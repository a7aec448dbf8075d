// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/storage.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "olat/image_io.hpp"

namespace fs = std::filesystem;

namespace olat {

namespace {

std::string zero_pad(std::int64_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*lld", width,
                static_cast<long long>(value));
  return buf;
}

}  // namespace

std::string set_directory_name(std::int64_t anchor_ts) {
  return "set_" + zero_pad(anchor_ts, 6);
}

void write_olat_set(const std::string& parent_dir, const OlatSet& set) {
  validate_olat_set(set);
  const fs::path dir = fs::path(parent_dir) / set_directory_name(set.anchor_ts);
  fs::create_directories(dir);

  for (int i = 0; i < set.led_count(); ++i) {
    const std::string led = "led_" + zero_pad(i, 3) + ".pfm";
    write_pfm((dir / led).string(), set.images[i]);
  }

  std::ostringstream manifest;
  manifest << "rig " << (set.rig_name.empty() ? "unknown" : set.rig_name)
           << "\n";
  manifest << "anchor " << set.anchor_ts << "\n";
  manifest << "leds " << set.led_count() << "\n";
  manifest << "order";
  for (int i = 0; i < set.led_count(); ++i) manifest << " " << i;
  manifest << "\n";
  atomic_write_file((dir / "manifest.txt").string(), manifest.str());
}

OlatSet read_olat_set(const std::string& set_dir) {
  const fs::path dir(set_dir);
  const fs::path manifest_path = dir / "manifest.txt";
  std::ifstream manifest(manifest_path);
  if (!manifest)
    throw IoError("missing OLAT set manifest: " + manifest_path.string());

  OlatSet set;
  int leds = -1;
  std::vector<int> order;
  std::string line;
  while (std::getline(manifest, line)) {
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "rig") ss >> set.rig_name;
    else if (key == "anchor") ss >> set.anchor_ts;
    else if (key == "leds") ss >> leds;
    else if (key == "order") {
      int v;
      while (ss >> v) order.push_back(v);
    }
  }
  if (leds <= 0)
    throw IoError("OLAT set manifest lacks a led count: " +
                  manifest_path.string());
  if (!order.empty() && static_cast<int>(order.size()) != leds)
    throw IoError("OLAT set manifest order length mismatch");

  set.images.resize(leds);
  for (int i = 0; i < leds; ++i) {
    const int file_index = order.empty() ? i : order[i];
    const fs::path led = dir / ("led_" + zero_pad(file_index, 3) + ".pfm");
    set.images[i] = read_pfm(led.string());
  }
  validate_olat_set(set);
  return set;
}

std::vector<std::string> find_set_directories(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::exists(root)) throw IoError("no such directory: " + dir);
  if (fs::exists(root / "manifest.txt")) return {root.string()};

  std::vector<std::string> sets;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() &&
        entry.path().filename().string().starts_with("set_") &&
        fs::exists(entry.path() / "manifest.txt"))
      sets.push_back(entry.path().string());
  }
  std::sort(sets.begin(), sets.end());
  if (sets.empty()) throw IoError("no OLAT sets under " + dir);
  return sets;
}

void write_capture_stream(const std::string& dir, const CaptureStream& stream,
                          const CaptureSchedule& schedule) {
  validate_schedule(schedule);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::string name =
        "frame_" + zero_pad(stream.timestamps[i], 6) + ".pfm";
    write_pfm((fs::path(dir) / name).string(), stream.frames[i]);
  }

  std::ostringstream manifest;
  manifest << "fps " << schedule.capture_fps << "\n";
  manifest << "cycle " << schedule.cycle << "\n";
  manifest << "leds " << schedule.led_count() << "\n";
  manifest << "frames " << stream.size() << "\n";
  manifest << "order";
  for (int led : schedule.led_order) manifest << " " << led;
  manifest << "\n";
  atomic_write_file((fs::path(dir) / "stream.txt").string(), manifest.str());
}

StreamManifest read_stream_manifest(const std::string& dir) {
  const fs::path path = fs::path(dir) / "stream.txt";
  std::ifstream in(path);
  if (!in) throw IoError("missing stream manifest: " + path.string());

  StreamManifest m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "fps") ss >> m.fps;
    else if (key == "cycle") ss >> m.cycle;
    else if (key == "leds") ss >> m.leds;
    else if (key == "frames") ss >> m.frame_count;
    else if (key == "order") {
      int v;
      while (ss >> v) m.led_order.push_back(v);
    }
  }
  if (m.leds <= 0 || m.frame_count == 0)
    throw IoError("malformed stream manifest: " + path.string());
  return m;
}

CaptureStream read_capture_stream(const std::string& dir,
                                  StreamManifest* manifest_out) {
  const StreamManifest m = read_stream_manifest(dir);
  if (manifest_out) *manifest_out = m;

  CaptureSchedule schedule;
  schedule.cycle = m.cycle;
  schedule.capture_fps = m.fps;
  if (m.led_order.empty()) {
    schedule = CaptureSchedule::with_identity_order(m.leds, m.cycle, m.fps,
                                                    schedule.output_stride);
  } else {
    schedule.led_order = m.led_order;
  }

  std::vector<RadianceImage> frames;
  frames.reserve(m.frame_count);
  for (std::size_t i = 0; i < m.frame_count; ++i) {
    const fs::path frame =
        fs::path(dir) / ("frame_" + zero_pad(static_cast<std::int64_t>(i), 6) +
                         ".pfm");
    frames.push_back(read_pfm(frame.string()));
  }
  return label_stream(std::move(frames), schedule);
}

}  // namespace olat
