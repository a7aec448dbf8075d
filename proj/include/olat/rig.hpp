// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "olat/image.hpp"
#include "olat/vec.hpp"

namespace olat {

/// Spherical light-stage geometry: one unit direction per LED, indexed
/// densely from 0. The frame is right-handed with the camera on the +Z axis
/// looking toward the origin, so LEDs with positive z face the subject from
/// the camera side and LEDs with negative z sit behind the subject.
struct LightRig {
  std::vector<Vec3> leds;  // unit directions
  double radius = 0.0;     // meters
  std::string name;

  int led_count() const { return static_cast<int>(leds.size()); }
};

/// Throws ValidationError unless every direction is unit length within 1e-6,
/// the rig is nonempty, the radius is positive, and no two directions
/// coincide within 1e-6 angular distance.
void validate_rig(const LightRig& rig);

/// Parses the rig text format: a `radius <meters>` header plus one
/// `index x y z` line per LED, `#` comments ignored. Directions are
/// re-normalized; zero-length directions, duplicate or missing indices, and
/// malformed lines are errors.
LightRig load_rig(const std::string& path);
void save_rig(const std::string& path, const LightRig& rig);

/// Golden-angle spiral of `count` LEDs over the full sphere; the default
/// test geometry when no measured rig file is supplied.
LightRig fibonacci_rig(int count, double radius, const std::string& name);

/// Target illumination as an equirectangular latitude-longitude raster.
/// Row 0 spans the +Z pole (the camera axis) and the last row the -Z pole;
/// column c covers azimuth 2*pi*(c+0.5)/W around +Z starting from +X.
/// `rotation` offsets the azimuth of the whole map in radians.
struct EnvironmentMap {
  RadianceImage pixels;
  double rotation = 0.0;
};

/// Throws ValidationError unless the raster is at least 2x2 with finite
/// nonnegative radiance.
void validate_env(const EnvironmentMap& env);

/// Per-LED RGB combination coefficients (radiance integrated against solid
/// angle, in steradian-weighted units).
using LightWeights = std::vector<Rgb>;

/// Throws ValidationError unless `weights` has `expected` finite
/// nonnegative entries. Pass expected < 0 to skip the length check.
void validate_weights(const LightWeights& weights, int expected);

/// Direction of the pixel center at (col, row) for a WxH map after applying
/// the azimuthal rotation.
Vec3 env_pixel_direction(int col, int row, int width, int height,
                         double rotation);

/// Solid angle subtended by any pixel in `row` of a WxH map.
double env_pixel_solid_angle(int row, int width, int height);

/// Projects an environment map onto the rig: every texel's radiance times
/// its solid angle accumulates into the angularly nearest LED (spherical
/// Voronoi binning). The per-channel weight totals therefore equal the
/// map's total radiance-times-solid-angle integral exactly up to rounding.
LightWeights env_to_weights(const EnvironmentMap& env, const LightRig& rig);

/// Constant-intensity weights on every LED within `cone_half_angle` of the
/// -Z pole (behind the subject as seen from the camera), zero elsewhere.
/// If the cone captures no LED a warning is written to *warning when given.
LightWeights rim_preset(const LightRig& rig, double cone_half_angle,
                        const Rgb& intensity, std::string* warning = nullptr);

/// Weight-file text format: `leds <N>` header plus `index r g b` lines.
void save_weights(const std::string& path, const LightWeights& weights);
LightWeights load_weights(const std::string& path);

}  // namespace olat
