// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "olat/image_io.hpp"
#include "olat/rig.hpp"
#include "olat/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace olat;
using namespace olat::testutil;

namespace {

constexpr double kPi = std::numbers::pi;

EnvironmentMap constant_env(int w, int h, float value, double rotation = 0.0) {
  EnvironmentMap env;
  env.pixels = RadianceImage(w, h, value);
  env.rotation = rotation;
  return env;
}

}  // namespace

TEST_CASE("load_rig reads the shipped 96-LED dome") {
  const LightRig rig = load_rig(std::string(OLAT_DATA_DIR) + "/rig96.txt");
  CHECK(rig.led_count() == 96);
  CHECK(rig.radius == doctest::Approx(1.3));
  for (const Vec3& d : rig.leds)
    CHECK(std::abs(norm(d) - 1.0) < 1e-6);
}

TEST_CASE("load_rig handles a minimal rig and the error cases") {
  TempDir tmp("rig");

  atomic_write_file(tmp.file("one.txt"), "radius 2.0\n0 0 0 1\n");
  const LightRig one = load_rig(tmp.file("one.txt"));
  CHECK(one.led_count() == 1);
  CHECK(one.leds[0].z == doctest::Approx(1.0));

  atomic_write_file(tmp.file("renorm.txt"), "radius 1\n0 0 0 3\n1 2 0 0\n");
  const LightRig renorm = load_rig(tmp.file("renorm.txt"));
  CHECK(norm(renorm.leds[0]) == doctest::Approx(1.0));
  CHECK(norm(renorm.leds[1]) == doctest::Approx(1.0));

  atomic_write_file(tmp.file("zero.txt"), "radius 1\n0 0 0 0\n");
  CHECK_THROWS_WITH_AS(load_rig(tmp.file("zero.txt")),
                       doctest::Contains("zero-length direction"), IoError);

  atomic_write_file(tmp.file("dup.txt"), "radius 1\n0 0 0 1\n0 1 0 0\n");
  CHECK_THROWS_WITH_AS(load_rig(tmp.file("dup.txt")),
                       doctest::Contains("duplicate"), IoError);

  atomic_write_file(tmp.file("gap.txt"), "radius 1\n0 0 0 1\n2 1 0 0\n");
  CHECK_THROWS_AS(load_rig(tmp.file("gap.txt")), IoError);

  atomic_write_file(tmp.file("noradius.txt"), "0 0 0 1\n");
  CHECK_THROWS_AS(load_rig(tmp.file("noradius.txt")), IoError);

  atomic_write_file(tmp.file("mangled.txt"), "radius 1\n0 0 banana 1\n");
  CHECK_THROWS_AS(load_rig(tmp.file("mangled.txt")), IoError);
}

TEST_CASE("rig save/load round-trips") {
  TempDir tmp("rigrt");
  const LightRig rig = fibonacci_rig(17, 1.3, "t17");
  save_rig(tmp.file("r.txt"), rig);
  const LightRig back = load_rig(tmp.file("r.txt"));
  REQUIRE(back.led_count() == 17);
  CHECK(back.name == "t17");
  for (int i = 0; i < 17; ++i)
    CHECK(norm(back.leds[i] - rig.leds[i]) < 1e-15);
}

TEST_CASE("constant env weights integrate to the full sphere") {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  const LightWeights w = env_to_weights(constant_env(64, 32, 1.0f), rig);
  Rgb total{};
  for (const Rgb& lw : w) total += lw;
  CHECK(total.r == doctest::Approx(4.0 * kPi).epsilon(1e-3));
  CHECK(total.g == doctest::Approx(4.0 * kPi).epsilon(1e-3));
  CHECK(total.b == doctest::Approx(4.0 * kPi).epsilon(1e-3));
}

TEST_CASE("a single lit texel feeds exactly the nearest LED") {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  EnvironmentMap env = constant_env(32, 16, 0.0f);
  env.pixels.at(9, 4, 0) = 3.0f;
  env.pixels.at(9, 4, 1) = 1.0f;
  env.pixels.at(9, 4, 2) = 2.0f;

  // Expected nearest LED, recomputed here from scratch.
  const Vec3 dir = env_pixel_direction(9, 4, 32, 16, 0.0);
  int expected = 0;
  double best = -2.0;
  for (int i = 0; i < rig.led_count(); ++i) {
    if (dot(dir, rig.leds[i]) > best) {
      best = dot(dir, rig.leds[i]);
      expected = i;
    }
  }

  const LightWeights w = env_to_weights(env, rig);
  for (int i = 0; i < rig.led_count(); ++i) {
    if (i == expected) {
      CHECK(w[i].r > 0.0);
      CHECK(w[i].r == doctest::Approx(3.0 * w[i].g / 1.0));
    } else {
      CHECK(w[i].r == 0.0);
      CHECK(w[i].g == 0.0);
      CHECK(w[i].b == 0.0);
    }
  }
}

TEST_CASE("env_to_weights matches the brute-force accumulation oracle") {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  EnvironmentMap env = make_smooth_env(48, 24, 42);
  env.rotation = 0.37;
  const LightWeights w = env_to_weights(env, rig);
  const LightWeights ref = oracle::env_weights_brute_force(env, rig);
  REQUIRE(w.size() == ref.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::abs(w[i].r - ref[i].r) < 1e-6);
    CHECK(std::abs(w[i].g - ref[i].g) < 1e-6);
    CHECK(std::abs(w[i].b - ref[i].b) < 1e-6);
  }
}

TEST_CASE("env_to_weights is linear in the map") {
  const LightRig rig = fibonacci_rig(24, 1.0, "t24");
  const EnvironmentMap e1 = make_smooth_env(24, 12, 5);
  const EnvironmentMap e2 = make_smooth_env(24, 12, 6);
  const double a = 0.7, b = 1.9;

  EnvironmentMap mix = constant_env(24, 12, 0.0f);
  for (std::size_t i = 0; i < mix.pixels.values().size(); ++i)
    mix.pixels.values()[i] =
        static_cast<float>(a) * e1.pixels.values()[i] +
        static_cast<float>(b) * e2.pixels.values()[i];

  const LightWeights w1 = env_to_weights(e1, rig);
  const LightWeights w2 = env_to_weights(e2, rig);
  const LightWeights wm = env_to_weights(mix, rig);
  for (std::size_t i = 0; i < wm.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(wm[i][c] ==
            doctest::Approx(a * w1[i][c] + b * w2[i][c]).epsilon(1e-6));
}

TEST_CASE("rotating the env by a full turn changes nothing") {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  EnvironmentMap env = make_smooth_env(32, 16, 11);
  const LightWeights base = env_to_weights(env, rig);
  env.rotation = 2.0 * kPi;
  const LightWeights turned = env_to_weights(env, rig);
  for (std::size_t i = 0; i < base.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(base[i][c] - turned[i][c]) < 1e-6);
}

TEST_CASE("permuting rig LEDs permutes the weights identically") {
  const LightRig rig = fibonacci_rig(17, 1.0, "t17");
  LightRig shuffled = rig;
  std::vector<int> perm(17);
  for (int i = 0; i < 17; ++i) perm[i] = (i * 5 + 3) % 17;
  for (int i = 0; i < 17; ++i) shuffled.leds[i] = rig.leds[perm[i]];

  const EnvironmentMap env = make_smooth_env(32, 16, 8);
  const LightWeights w = env_to_weights(env, rig);
  const LightWeights ws = env_to_weights(env, shuffled);
  for (int i = 0; i < 17; ++i)
    for (int c = 0; c < 3; ++c) CHECK(ws[i][c] == w[perm[i]][c]);
}

TEST_CASE("rim preset selects the rear cone") {
  // Camera sits on +Z, so the LED on -Z is the rim light.
  TempDir tmp("rim");
  atomic_write_file(tmp.file("pair.txt"), "radius 1\n0 0 0 1\n1 0 0 -1\n");
  const LightRig pair = load_rig(tmp.file("pair.txt"));

  const LightWeights w = rim_preset(pair, 30.0 * kPi / 180.0, {1, 1, 1});
  CHECK(w[0].r == 0.0);
  CHECK(w[1].r == 1.0);
}

TEST_CASE("wide rim cone captures the rear hemisphere of the dome") {
  const LightRig rig = load_rig(std::string(OLAT_DATA_DIR) + "/rig96.txt");
  const double cone = kPi / 2.0 - 1e-6;
  const LightWeights w = rim_preset(rig, cone, {2, 2, 2});

  // Count by direct enumeration of the rig directions.
  int expected = 0;
  for (const Vec3& d : rig.leds)
    if (d.z < -std::cos(cone)) ++expected;
  CHECK(expected == 48);  // even layout: half the dome

  int selected = 0;
  for (const Rgb& lw : w)
    if (lw.r > 0.0) ++selected;
  CHECK(selected == expected);
}

TEST_CASE("zero rim intensity produces all-zero weights") {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  const LightWeights w = rim_preset(rig, 0.4, {0, 0, 0});
  for (const Rgb& lw : w) {
    CHECK(lw.r == 0.0);
    CHECK(lw.g == 0.0);
    CHECK(lw.b == 0.0);
  }
}

TEST_CASE("rim cone outside (0, pi/2) is rejected; empty cones warn") {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  CHECK_THROWS_AS(rim_preset(rig, 0.0, {1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(rim_preset(rig, kPi / 2.0, {1, 1, 1}), ValidationError);

  // A cone tighter than the most rearward LED selects nothing.
  double max_rear = -2.0;
  for (const Vec3& d : rig.leds) max_rear = std::max(max_rear, -d.z);
  const double cone = std::acos(max_rear) / 2.0 + 1e-9;
  std::string warning;
  const LightWeights w = rim_preset(rig, cone, {1, 1, 1}, &warning);
  CHECK(!warning.empty());
  for (const Rgb& lw : w) CHECK(lw.r == 0.0);
}

TEST_CASE("weight files round-trip") {
  TempDir tmp("weights");
  LightWeights w(5);
  for (int i = 0; i < 5; ++i) w[i] = {i * 0.5, i * 0.25, 1.0};
  save_weights(tmp.file("w.txt"), w);
  const LightWeights back = load_weights(tmp.file("w.txt"));
  REQUIRE(back.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(back[i].r == w[i].r);
    CHECK(back[i].g == w[i].g);
    CHECK(back[i].b == w[i].b);
  }
}

TEST_CASE("shipped studio presets parse and fit the dome") {
  const LightRig rig = load_rig(std::string(OLAT_DATA_DIR) + "/rig96.txt");
  for (const char* name : {"/presets/rembrandt.txt", "/presets/cyberpunk.txt"}) {
    const LightWeights w = load_weights(std::string(OLAT_DATA_DIR) + name);
    CHECK(static_cast<int>(w.size()) == rig.led_count());
    double total = 0.0;
    for (const Rgb& lw : w) total += lw.r + lw.g + lw.b;
    CHECK(total > 0.0);
  }
}
