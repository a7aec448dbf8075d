// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "olat/image_io.hpp"
#include "olat/parallel.hpp"

namespace olat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Reference-pose coordinates of a posed pixel: the forward pose rotates the
// content about the image center and then translates, all in image coords.
struct PoseInverse {
  double cx, cy, tx, ty, cos_r, sin_r;

  explicit PoseInverse(const ScenePose& pose, int width, int height)
      : cx((width - 1) * 0.5),
        cy((height - 1) * 0.5),
        tx(pose.tx),
        ty(pose.ty),
        cos_r(std::cos(pose.rot)),
        sin_r(std::sin(pose.rot)) {}

  void map(double px, double py, double& rx, double& ry) const {
    const double dx = px - cx - tx;
    const double dy = py - cy - ty;
    rx = cos_r * dx + sin_r * dy + cx;   // R(-rot)
    ry = -sin_r * dx + cos_r * dy + cy;
  }
};

// Shared per-pixel geometry for one pose.
struct PixelGeom {
  bool on_sphere = false;
  Vec3 normal;        // world frame; zero off the sphere
  float albedo[3];    // bilinear sample of the scene albedo
};

PixelGeom pixel_geom(const SyntheticScene& scene, const PoseInverse& inv,
                     double cos_r, double sin_r, int x, int y) {
  PixelGeom g;
  double rx, ry;
  inv.map(x, y, rx, ry);
  for (int c = 0; c < 3; ++c)
    g.albedo[c] = sample_bilinear(scene.albedo, static_cast<float>(rx),
                                  static_cast<float>(ry), c);

  const double ox = (rx - scene.sphere_cx) / scene.sphere_radius;
  const double oy = (ry - scene.sphere_cy) / scene.sphere_radius;
  const double rho2 = ox * ox + oy * oy;
  if (rho2 <= 1.0) {
    g.on_sphere = true;
    // The in-plane offset rotates with the content; image +y is world -y.
    const double px = cos_r * ox - sin_r * oy;
    const double py = sin_r * ox + cos_r * oy;
    g.normal = {px, -py, std::sqrt(std::max(0.0, 1.0 - rho2))};
  }
  return g;
}

}  // namespace

void validate_scene(const SyntheticScene& scene) {
  if (scene.width < 2 || scene.height < 2)
    throw ValidationError("scene frame too small");
  if (scene.albedo.width() != scene.width ||
      scene.albedo.height() != scene.height)
    throw ValidationError("scene albedo must match the frame size");
  for (float v : scene.albedo.values()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw ValidationError("scene albedo must lie in [0,1]");
  }
  if (!(scene.sphere_radius > 0.0) ||
      scene.sphere_cx - scene.sphere_radius < 0.0 ||
      scene.sphere_cy - scene.sphere_radius < 0.0 ||
      scene.sphere_cx + scene.sphere_radius > scene.width - 1 ||
      scene.sphere_cy + scene.sphere_radius > scene.height - 1)
    throw ValidationError("sphere must fit inside the frame");
  if (!(scene.ambient >= 0.0) || !std::isfinite(scene.ambient))
    throw ValidationError("scene ambient must be nonnegative");
}

void validate_track(const MotionTrack& track, int width, int height) {
  const double limit = 0.25 * std::hypot(width, height);
  for (std::size_t i = 0; i < track.size(); ++i) {
    const ScenePose& p = track[i];
    if (!std::isfinite(p.tx) || !std::isfinite(p.ty) || !std::isfinite(p.rot))
      throw ValidationError("motion track has non-finite pose");
    if (i > 0) {
      const double step =
          std::hypot(p.tx - track[i - 1].tx, p.ty - track[i - 1].ty);
      if (step >= limit)
        throw ValidationError("motion track step exceeds frame diagonal/4");
    }
  }
}

RadianceImage render_led(const SyntheticScene& scene, const Vec3& dir,
                         const ScenePose& pose, int threads) {
  validate_scene(scene);
  const PoseInverse inv(pose, scene.width, scene.height);
  const double cr = std::cos(pose.rot), sr = std::sin(pose.rot);
  const double wall = std::max(0.0, dir.z);
  const double amb = scene.ambient * (dir.z + 1.0) * 0.5;

  RadianceImage out(scene.width, scene.height);
  parallel_for(
      0, scene.height,
      [&](int y) {
        for (int x = 0; x < scene.width; ++x) {
          const PixelGeom g = pixel_geom(scene, inv, cr, sr, x, y);
          if (g.on_sphere) {
            const double shade = std::max(0.0, dot(g.normal, dir));
            for (int c = 0; c < 3; ++c)
              out.at(x, y, c) = static_cast<float>(g.albedo[c] * shade);
          } else {
            const Rgb& bg = scene.background;
            for (int c = 0; c < 3; ++c)
              out.at(x, y, c) =
                  static_cast<float>(g.albedo[c] * wall + bg[c] * amb);
          }
        }
      },
      threads);
  return out;
}

OlatRender render_olat(const SyntheticScene& scene, const LightRig& rig,
                       const ScenePose& pose, int threads) {
  validate_scene(scene);
  validate_rig(rig);

  OlatRender render;
  render.set.rig_name = rig.name;
  render.set.anchor_ts = 0;
  render.set.images.reserve(rig.leds.size());
  for (const Vec3& dir : rig.leds)
    render.set.images.push_back(render_led(scene, dir, pose, threads));

  const PoseInverse inv(pose, scene.width, scene.height);
  const double cr = std::cos(pose.rot), sr = std::sin(pose.rot);
  render.normals = RadianceImage(scene.width, scene.height);
  render.albedo = RadianceImage(scene.width, scene.height);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      const PixelGeom g = pixel_geom(scene, inv, cr, sr, x, y);
      for (int c = 0; c < 3; ++c) render.albedo.at(x, y, c) = g.albedo[c];
      if (g.on_sphere) {
        render.normals.at(x, y, 0) = static_cast<float>(g.normal.x);
        render.normals.at(x, y, 1) = static_cast<float>(g.normal.y);
        render.normals.at(x, y, 2) = static_cast<float>(g.normal.z);
      }
    }
  }
  return render;
}

RadianceImage render_env_direct(const SyntheticScene& scene,
                                const EnvironmentMap& env,
                                const ScenePose& pose, int threads) {
  validate_scene(scene);
  validate_env(env);

  // Flatten the env into (direction, radiance * solid angle) samples once;
  // wall shading and the ambient term do not depend on the pixel, so only
  // sphere pixels pay for the full sum.
  const int ew = env.pixels.width();
  const int eh = env.pixels.height();
  std::vector<Vec3> dirs;
  std::vector<Rgb> energy;
  dirs.reserve(static_cast<std::size_t>(ew) * eh);
  energy.reserve(dirs.capacity());
  Rgb wall_light{};     // sum of L * dOmega * max(0, w_z)
  Rgb ambient_light{};  // sum of L * dOmega * (w_z + 1) / 2
  for (int row = 0; row < eh; ++row) {
    const double d_omega = env_pixel_solid_angle(row, ew, eh);
    for (int col = 0; col < ew; ++col) {
      const Vec3 dir = env_pixel_direction(col, row, ew, eh, env.rotation);
      const Rgb e{env.pixels.at(col, row, 0) * d_omega,
                  env.pixels.at(col, row, 1) * d_omega,
                  env.pixels.at(col, row, 2) * d_omega};
      dirs.push_back(dir);
      energy.push_back(e);
      wall_light += e * std::max(0.0, dir.z);
      ambient_light += e * ((dir.z + 1.0) * 0.5);
    }
  }

  const PoseInverse inv(pose, scene.width, scene.height);
  const double cr = std::cos(pose.rot), sr = std::sin(pose.rot);
  RadianceImage out(scene.width, scene.height);
  parallel_for(
      0, scene.height,
      [&](int y) {
        for (int x = 0; x < scene.width; ++x) {
          const PixelGeom g = pixel_geom(scene, inv, cr, sr, x, y);
          if (g.on_sphere) {
            Rgb irradiance{};
            for (std::size_t i = 0; i < dirs.size(); ++i) {
              const double cosine = dot(g.normal, dirs[i]);
              if (cosine > 0.0) irradiance += energy[i] * cosine;
            }
            for (int c = 0; c < 3; ++c)
              out.at(x, y, c) =
                  static_cast<float>(g.albedo[c] * irradiance[c]);
          } else {
            for (int c = 0; c < 3; ++c)
              out.at(x, y, c) = static_cast<float>(
                  g.albedo[c] * wall_light[c] +
                  scene.background[c] * scene.ambient * ambient_light[c]);
          }
        }
      },
      threads);
  return out;
}

RadianceImage render_full_lit(const SyntheticScene& scene, const LightRig& rig,
                              const ScenePose& pose, int threads) {
  validate_scene(scene);
  validate_rig(rig);

  double wall = 0.0;
  double amb = 0.0;
  for (const Vec3& d : rig.leds) {
    wall += std::max(0.0, d.z);
    amb += scene.ambient * (d.z + 1.0) * 0.5;
  }

  const PoseInverse inv(pose, scene.width, scene.height);
  const double cr = std::cos(pose.rot), sr = std::sin(pose.rot);
  RadianceImage out(scene.width, scene.height);
  parallel_for(
      0, scene.height,
      [&](int y) {
        for (int x = 0; x < scene.width; ++x) {
          const PixelGeom g = pixel_geom(scene, inv, cr, sr, x, y);
          if (g.on_sphere) {
            double shade = 0.0;
            for (const Vec3& d : rig.leds)
              shade += std::max(0.0, dot(g.normal, d));
            for (int c = 0; c < 3; ++c)
              out.at(x, y, c) = static_cast<float>(g.albedo[c] * shade);
          } else {
            for (int c = 0; c < 3; ++c)
              out.at(x, y, c) = static_cast<float>(
                  g.albedo[c] * wall + scene.background[c] * amb);
          }
        }
      },
      threads);
  return out;
}

CaptureStream render_capture_stream(const SyntheticScene& scene,
                                    const LightRig& rig,
                                    const CaptureSchedule& schedule,
                                    const MotionTrack& track, int threads) {
  validate_scene(scene);
  validate_rig(rig);
  validate_schedule(schedule);
  validate_track(track, scene.width, scene.height);
  if (schedule.led_count() != rig.led_count())
    throw ValidationError("schedule LED order does not match the rig");

  const std::size_t n = track.size();
  CaptureStream stream;
  stream.labels = make_labels(n, schedule);
  stream.frames.resize(n);
  stream.timestamps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    stream.timestamps[i] = static_cast<std::int64_t>(i);
    if (stream.labels[i].is_tracking())
      stream.frames[i] = render_full_lit(scene, rig, track[i], threads);
    else
      stream.frames[i] =
          render_led(scene, rig.leds[stream.labels[i].led], track[i], threads);
  }
  return stream;
}

RadianceImage make_smooth_texture(int width, int height, unsigned seed,
                                  float lo, float hi) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> freq(0.5, 3.5);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> orient(0.0, kTwoPi);

  constexpr int kWaves = 6;
  struct Wave {
    double fx, fy, phase, amp;
  };
  Wave waves[kWaves];
  for (int k = 0; k < kWaves; ++k) {
    const double f = freq(rng);
    const double o = orient(rng);
    waves[k] = {f * std::cos(o), f * std::sin(o), phase(rng),
                1.0 / (1.0 + k)};
  }

  // Slight per-channel gains keep the texture colorful without changing
  // its band limit.
  const double gain[3] = {1.0, 0.92, 0.85};
  const double mid = 0.5 * (lo + hi);
  const double amp = 0.5 * (hi - lo) / 2.45;  // sum of 1/(1+k) amplitudes

  RadianceImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      for (const Wave& wv : waves) {
        v += wv.amp * std::sin(kTwoPi * (wv.fx * x / width +
                                         wv.fy * y / height) +
                               wv.phase);
      }
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = static_cast<float>(
            std::clamp(mid + amp * v * gain[c], static_cast<double>(lo),
                       static_cast<double>(hi)));
      }
    }
  }
  return img;
}

RadianceImage make_bordered_texture(int width, int height, unsigned seed,
                                    int margin, float lo, float hi) {
  RadianceImage tex = make_smooth_texture(width, height, seed, lo, hi);
  const float flat = 0.5f * (lo + hi);
  const double taper = std::max(4.0, margin * 0.5);

  auto envelope = [&](double dist_from_edge) {
    // 0 inside the margin band, raised-cosine ramp to 1 over `taper`.
    const double t = (dist_from_edge - margin) / taper;
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return 0.5 * (1.0 - std::cos(t * 3.14159265358979323846));
  };

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double edge = std::min(std::min(x, width - 1 - x),
                                   std::min(y, height - 1 - y));
      const double e = envelope(edge);
      for (int c = 0; c < 3; ++c) {
        const float t = tex.at(x, y, c);
        tex.at(x, y, c) = static_cast<float>(flat + e * (t - flat));
      }
    }
  }
  return tex;
}

SyntheticScene make_default_scene(int width, int height, unsigned seed) {
  SyntheticScene scene;
  scene.width = width;
  scene.height = height;
  scene.sphere_cx = (width - 1) * 0.5;
  scene.sphere_cy = (height - 1) * 0.5;
  scene.sphere_radius = 0.19 * std::min(width, height);
  scene.albedo = make_smooth_texture(width, height, seed);
  scene.background = {0.20, 0.22, 0.25};
  scene.ambient = 0.08;
  return scene;
}

EnvironmentMap make_smooth_env(int width, int height, unsigned seed,
                               int lobes) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(0.2, 1.5);
  std::uniform_real_distribution<double> power(1.0, 4.0);

  struct Lobe {
    Vec3 axis;
    Rgb color;
    double p;
  };
  std::vector<Lobe> lobe_list;
  for (int j = 0; j < lobes; ++j) {
    Vec3 axis;
    do {
      axis = {unit(rng), unit(rng), unit(rng)};
    } while (norm(axis) < 1e-3);
    lobe_list.push_back(
        {normalized(axis), Rgb{amp(rng), amp(rng), amp(rng)}, power(rng)});
  }

  EnvironmentMap env;
  env.pixels = RadianceImage(width, height);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const Vec3 dir = env_pixel_direction(col, row, width, height, 0.0);
      Rgb radiance{};
      for (const Lobe& lobe : lobe_list) {
        const double c = std::pow(0.5 * (1.0 + dot(dir, lobe.axis)), lobe.p);
        radiance += lobe.color * c;
      }
      env.pixels.at(col, row, 0) = static_cast<float>(radiance.r);
      env.pixels.at(col, row, 1) = static_cast<float>(radiance.g);
      env.pixels.at(col, row, 2) = static_cast<float>(radiance.b);
    }
  }
  return env;
}

MotionTrack constant_velocity_track(std::size_t frames, double vx, double vy) {
  MotionTrack track(frames);
  for (std::size_t i = 0; i < frames; ++i)
    track[i] = {vx * static_cast<double>(i), vy * static_cast<double>(i), 0.0};
  return track;
}

void save_track(const std::string& path, const MotionTrack& track) {
  std::ostringstream out;
  out.precision(17);
  out << "# frame tx ty rot\n";
  for (std::size_t i = 0; i < track.size(); ++i) {
    out << i << " " << track[i].tx << " " << track[i].ty << " "
        << track[i].rot << "\n";
  }
  atomic_write_file(path, out.str());
}

MotionTrack load_track(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open track file " + path);
  MotionTrack track;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::size_t frame = 0;
    ScenePose pose;
    if (!(ss >> frame)) continue;
    if (!(ss >> pose.tx >> pose.ty >> pose.rot))
      throw IoError("track line " + std::to_string(line_no) + ": malformed");
    if (frame != track.size())
      throw IoError("track line " + std::to_string(line_no) +
                    ": frames must be consecutive from 0");
    track.push_back(pose);
  }
  return track;
}

}  // namespace olat
