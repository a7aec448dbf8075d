// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "olat/relight.hpp"
#include "olat/rig.hpp"
#include "olat/schedule.hpp"

namespace olat {

// Synthetic Lambertian ground truth. A matte sphere floats in front of a
// textured wall facing the camera; LEDs act as directional lights with no
// falloff, so rendering is exactly linear in illumination and a weighted
// OLAT sum reproduces any environment render up to direction quantization.
//
// Image axes map to the rig frame as +x right, +y up equals -row, camera on
// +Z: the sphere normal at the disc center is +Z and an LED at +Z lights it
// at full albedo.

/// Rigid 2D pose of the scene content for one frame: translation in pixels
/// plus an in-plane rotation (radians) about the image center.
struct ScenePose {
  double tx = 0.0;
  double ty = 0.0;
  double rot = 0.0;
};

/// Per-frame pose track driving render_capture_stream.
using MotionTrack = std::vector<ScenePose>;

void validate_track(const MotionTrack& track, int width, int height);

struct SyntheticScene {
  int width = 256;
  int height = 256;
  double sphere_cx = 128.0;  // reference-pose center, pixels
  double sphere_cy = 128.0;
  double sphere_radius = 48.0;
  RadianceImage albedo;   // full-frame albedo in [0,1], moves with the pose
  Rgb background{0.25, 0.25, 0.25};  // flat ambient color behind everything
  double ambient = 0.08;             // ambient strength on background pixels
};

void validate_scene(const SyntheticScene& scene);

/// Lambertian shading for one directional light `dir` at pose `pose`:
/// sphere pixels get albedo * max(0, n . dir); wall pixels get
/// albedo * max(0, dir.z) plus background * ambient * (dir.z + 1) / 2 (the
/// flat term keeps rear-lit frames from going fully black).
RadianceImage render_led(const SyntheticScene& scene, const Vec3& dir,
                         const ScenePose& pose = {}, int threads = 0);

/// One image per rig LED plus the ground-truth normal and albedo maps at
/// the same pose. Normals are zero (masked) off the sphere.
struct OlatRender {
  OlatSet set;
  RadianceImage normals;
  RadianceImage albedo;
};

OlatRender render_olat(const SyntheticScene& scene, const LightRig& rig,
                       const ScenePose& pose = {}, int threads = 0);

/// Brute-force environment render: every env texel contributes
/// radiance * solid angle * shading, summed per pixel. This is the oracle a
/// weights-based relight is judged against.
RadianceImage render_env_direct(const SyntheticScene& scene,
                                const EnvironmentMap& env,
                                const ScenePose& pose = {}, int threads = 0);

/// Full-lit tracking illumination: every LED on at unit weight.
RadianceImage render_full_lit(const SyntheticScene& scene, const LightRig& rig,
                              const ScenePose& pose = {}, int threads = 0);

/// Renders a labeled capture stream along the motion track (tracking frames
/// full-lit, OLAT frames per led_order). The track must cover the frame
/// count.
CaptureStream render_capture_stream(const SyntheticScene& scene,
                                    const LightRig& rig,
                                    const CaptureSchedule& schedule,
                                    const MotionTrack& track, int threads = 0);

// Deterministic content generators used by tests and the synth CLI.

/// Band-limited random texture: base brightness plus a fixed number of
/// random sinusoidal ripples, clamped into [lo, hi].
RadianceImage make_smooth_texture(int width, int height, unsigned seed,
                                  float lo = 0.15f, float hi = 0.95f);

/// Texture faded to a constant outside a centered rectangle with `margin`
/// pixels of border; rigid motion inside the margin then never drags
/// content across the frame edge.
RadianceImage make_bordered_texture(int width, int height, unsigned seed,
                                    int margin, float lo = 0.15f,
                                    float hi = 0.95f);

SyntheticScene make_default_scene(int width, int height, unsigned seed);

/// Smooth nonnegative environment map built from a few random cosine lobes.
EnvironmentMap make_smooth_env(int width, int height, unsigned seed,
                               int lobes = 4);

/// Constant-velocity track of `frames` poses stepping (vx, vy) per frame.
MotionTrack constant_velocity_track(std::size_t frames, double vx, double vy);

// Track file: one `frame tx ty rot` line per pose.
void save_track(const std::string& path, const MotionTrack& track);
MotionTrack load_track(const std::string& path);

}  // namespace olat
