// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/rig.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "olat/image_io.hpp"

namespace olat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-6;

std::string strip_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

}  // namespace

void validate_rig(const LightRig& rig) {
  if (rig.leds.empty()) throw ValidationError("rig has no LEDs");
  if (!(rig.radius > 0.0)) throw ValidationError("rig radius must be positive");
  for (std::size_t i = 0; i < rig.leds.size(); ++i) {
    const double n = norm(rig.leds[i]);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol)
      throw ValidationError("rig LED " + std::to_string(i) +
                            " is not unit length");
  }
  // Pairwise separation; 96^2/2 dot products is nothing.
  for (std::size_t i = 0; i < rig.leds.size(); ++i) {
    for (std::size_t j = i + 1; j < rig.leds.size(); ++j) {
      if (std::acos(std::clamp(dot(rig.leds[i], rig.leds[j]), -1.0, 1.0)) <
          kUnitTol)
        throw ValidationError("rig LEDs " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
    }
  }
}

LightRig load_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rig file " + path);

  LightRig rig;
  rig.name = "rig";
  std::map<int, Vec3> by_index;
  bool have_radius = false;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;  // blank or comment-only

    if (first == "radius") {
      if (!(ss >> rig.radius) || !(rig.radius > 0.0))
        throw IoError("rig line " + std::to_string(line_no) +
                      ": bad radius");
      have_radius = true;
      continue;
    }
    if (first == "name") {
      ss >> rig.name;
      continue;
    }

    int index = -1;
    Vec3 d;
    try {
      index = std::stoi(first);
    } catch (const std::exception&) {
      throw IoError("rig line " + std::to_string(line_no) +
                    ": malformed line");
    }
    if (!(ss >> d.x >> d.y >> d.z))
      throw IoError("rig line " + std::to_string(line_no) +
                    ": malformed line");
    if (index < 0)
      throw IoError("rig line " + std::to_string(line_no) +
                    ": negative LED index");
    const double n = norm(d);
    if (!std::isfinite(n) || n < 1e-12)
      throw IoError("rig line " + std::to_string(line_no) +
                    ": zero-length direction");
    if (by_index.count(index))
      throw IoError("rig line " + std::to_string(line_no) +
                    ": duplicate LED index " + std::to_string(index));
    by_index[index] = normalized(d);
  }

  if (!have_radius) throw IoError("rig file missing radius header: " + path);
  if (by_index.empty()) throw IoError("rig file has no LEDs: " + path);

  // Indices must be dense 0..N-1.
  rig.leds.resize(by_index.size());
  int expected = 0;
  for (const auto& [index, dir] : by_index) {
    if (index != expected)
      throw IoError("rig file missing LED index " + std::to_string(expected));
    rig.leds[index] = dir;
    ++expected;
  }
  validate_rig(rig);
  return rig;
}

void save_rig(const std::string& path, const LightRig& rig) {
  validate_rig(rig);
  std::ostringstream out;
  out.precision(17);
  out << "# light rig: one `index x y z` line per LED\n";
  if (!rig.name.empty()) out << "name " << rig.name << "\n";
  out << "radius " << rig.radius << "\n";
  for (std::size_t i = 0; i < rig.leds.size(); ++i) {
    const Vec3& d = rig.leds[i];
    out << i << " " << d.x << " " << d.y << " " << d.z << "\n";
  }
  atomic_write_file(path, out.str());
}

LightRig fibonacci_rig(int count, double radius, const std::string& name) {
  if (count < 1) throw ValidationError("rig needs at least one LED");
  LightRig rig;
  rig.radius = radius;
  rig.name = name;
  rig.leds.resize(count);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    rig.leds[i] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  validate_rig(rig);
  return rig;
}

void validate_env(const EnvironmentMap& env) {
  if (env.pixels.width() < 2 || env.pixels.height() < 2)
    throw ValidationError("environment map must be at least 2x2");
  require_finite_nonnegative(env.pixels, "environment map");
  if (!std::isfinite(env.rotation))
    throw ValidationError("environment rotation must be finite");
}

void validate_weights(const LightWeights& weights, int expected) {
  if (expected >= 0 && static_cast<int>(weights.size()) != expected)
    throw ValidationError("weight count " + std::to_string(weights.size()) +
                          " does not match LED count " +
                          std::to_string(expected));
  for (const Rgb& w : weights) {
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(w[c]))
        throw ValidationError("non-finite light weight");
      if (w[c] < 0.0) throw ValidationError("negative light weight");
    }
  }
}

Vec3 env_pixel_direction(int col, int row, int width, int height,
                         double rotation) {
  const double theta = kPi * (row + 0.5) / height;        // polar from +Z
  const double phi = 2.0 * kPi * (col + 0.5) / width + rotation;
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

double env_pixel_solid_angle(int row, int width, int height) {
  const double theta = kPi * (row + 0.5) / height;
  return (2.0 * kPi / width) * (kPi / height) * std::sin(theta);
}

LightWeights env_to_weights(const EnvironmentMap& env, const LightRig& rig) {
  validate_env(env);
  validate_rig(rig);

  const RadianceImage& px = env.pixels;
  const int w = px.width();
  const int h = px.height();
  LightWeights weights(rig.leds.size());

  for (int row = 0; row < h; ++row) {
    const double d_omega = env_pixel_solid_angle(row, w, h);
    for (int col = 0; col < w; ++col) {
      const Vec3 dir = env_pixel_direction(col, row, w, h, env.rotation);
      // Nearest LED by angular distance == largest dot product; ties break
      // to the lowest index.
      int best = 0;
      double best_dot = dot(dir, rig.leds[0]);
      for (std::size_t i = 1; i < rig.leds.size(); ++i) {
        const double d = dot(dir, rig.leds[i]);
        if (d > best_dot) {
          best_dot = d;
          best = static_cast<int>(i);
        }
      }
      weights[best] += Rgb{px.at(col, row, 0) * d_omega,
                           px.at(col, row, 1) * d_omega,
                           px.at(col, row, 2) * d_omega};
    }
  }
  return weights;
}

LightWeights rim_preset(const LightRig& rig, double cone_half_angle,
                        const Rgb& intensity, std::string* warning) {
  validate_rig(rig);
  if (!(cone_half_angle > 0.0) || !(cone_half_angle < kPi / 2.0))
    throw ValidationError("rim cone half-angle must lie in (0, pi/2)");
  for (int c = 0; c < 3; ++c) {
    if (!std::isfinite(intensity[c]) || intensity[c] < 0.0)
      throw ValidationError("rim intensity must be finite and nonnegative");
  }

  // LEDs within the cone around -Z, i.e. behind the subject as seen from
  // the camera on +Z.
  const double cos_cone = std::cos(cone_half_angle);
  LightWeights weights(rig.leds.size());
  int selected = 0;
  for (std::size_t i = 0; i < rig.leds.size(); ++i) {
    if (rig.leds[i].z < -cos_cone) {
      weights[i] = intensity;
      ++selected;
    }
  }
  if (selected == 0 && warning)
    *warning = "rim cone selects no LED on rig '" + rig.name + "'";
  return weights;
}

void save_weights(const std::string& path, const LightWeights& weights) {
  validate_weights(weights, -1);
  std::ostringstream out;
  out.precision(17);
  out << "leds " << weights.size() << "\n";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out << i << " " << weights[i].r << " " << weights[i].g << " "
        << weights[i].b << "\n";
  }
  atomic_write_file(path, out.str());
}

LightWeights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weights file " + path);
  std::string raw;
  LightWeights weights;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "leds") {
      std::size_t n = 0;
      if (!(ss >> n)) throw IoError("weights: bad header in " + path);
      weights.assign(n, Rgb{});
      have_header = true;
      continue;
    }
    if (!have_header) throw IoError("weights: missing `leds` header: " + path);
    std::size_t index = 0;
    Rgb w;
    try {
      index = std::stoul(first);
    } catch (const std::exception&) {
      throw IoError("weights line " + std::to_string(line_no) +
                    ": malformed");
    }
    if (!(ss >> w.r >> w.g >> w.b) || index >= weights.size())
      throw IoError("weights line " + std::to_string(line_no) + ": malformed");
    weights[index] = w;
  }
  validate_weights(weights, -1);
  return weights;
}

}  // namespace olat
