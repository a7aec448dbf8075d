// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "olat/demosaic.hpp"
#include "olat/image_io.hpp"
#include "test_util.hpp"

using namespace olat;
using namespace olat::testutil;

TEST_CASE("pfm round-trip is bitwise for finite nonnegative images") {
  TempDir tmp("pfm");
  const RadianceImage img = random_image(37, 23, 99);
  write_pfm(tmp.file("a.pfm"), img);
  ReadStats stats;
  const RadianceImage back = read_pfm(tmp.file("a.pfm"), &stats);
  CHECK(stats.clamped_negative == 0);
  CHECK(bitwise_equal(img, back));
}

TEST_CASE("pfm read clamps negative values and reports the count") {
  TempDir tmp("pfmneg");
  // Hand-rolled 2x1 file with one negative sample per pixel.
  const float values[6] = {-0.5f, 0.25f, 1.0f, 2.0f, -3.0f, 0.0f};
  std::string buf = "PF\n2 1\n-1.0\n";
  buf.append(reinterpret_cast<const char*>(values), sizeof(values));
  atomic_write_file(tmp.file("neg.pfm"), buf);

  ReadStats stats;
  const RadianceImage img = read_pfm(tmp.file("neg.pfm"), &stats);
  CHECK(stats.clamped_negative == 2);
  CHECK(img.at(0, 0, 0) == 0.0f);
  CHECK(img.at(0, 0, 1) == 0.25f);
  CHECK(img.at(1, 0, 1) == 0.0f);
}

TEST_CASE("pfm rejects truncated payloads and unknown extensions") {
  TempDir tmp("pfmbad");
  const RadianceImage img = random_image(8, 8, 1);
  write_pfm(tmp.file("a.pfm"), img);

  std::ifstream in(tmp.file("a.pfm"), std::ios::binary);
  std::string whole((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  atomic_write_file(tmp.file("cut.pfm"), whole.substr(0, whole.size() / 2));
  CHECK_THROWS_AS(read_pfm(tmp.file("cut.pfm")), IoError);

  CHECK_THROWS_AS(read_image(tmp.file("a.bmp")), IoError);
  CHECK_THROWS_AS(read_pfm(tmp.file("missing.pfm")), IoError);
}

TEST_CASE("16-bit preview stores round(65535 * v^(1/2.2))") {
  TempDir tmp("png16");
  RadianceImage img(4, 4, 0.5f);
  write_png(tmp.file("half.png"), img, ImageEncoding::kPng16);
  const RadianceImage back = read_png(tmp.file("half.png"));

  const double expected_code = std::round(65535.0 * std::pow(0.5, 1.0 / 2.2));
  CHECK(expected_code == 47824.0);
  const double expected_linear = std::pow(expected_code / 65535.0, 2.2);
  CHECK(back.at(2, 2, 0) == doctest::Approx(expected_linear).epsilon(1e-6));
}

TEST_CASE("8-bit png survives an encode/decode cycle within a code step") {
  TempDir tmp("png8");
  const RadianceImage img = random_image(16, 12, 7);
  write_png(tmp.file("p.png"), img, ImageEncoding::kPng8);
  const RadianceImage back = read_image(tmp.file("p.png"));
  // One 8-bit code step around v maps to roughly gamma * v / 255 linear.
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(back.at(x, y, c) - img.at(x, y, c)) < 0.012f);
}

TEST_CASE("alpha mattes round-trip through grayscale pfm") {
  TempDir tmp("alpha");
  AlphaMatte matte(9, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 9; ++x) matte.at(x, y) = (x + y * 9) / 44.0f;
  write_alpha(tmp.file("m.pfm"), matte);
  const AlphaMatte back = read_alpha(tmp.file("m.pfm"));
  REQUIRE(back.width() == 9);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 9; ++x) CHECK(back.at(x, y) == matte.at(x, y));
}

TEST_CASE("pgm round-trip preserves the mosaic") {
  TempDir tmp("pgm");
  BayerFrame frame;
  frame.width = 6;
  frame.height = 4;
  frame.pattern = BayerPattern::kRggb;
  frame.data.resize(24);
  for (std::size_t i = 0; i < frame.data.size(); ++i)
    frame.data[i] = static_cast<std::uint8_t>(i * 10);
  write_pgm(tmp.file("b.pgm"), frame);
  const BayerFrame back = read_pgm_bayer(tmp.file("b.pgm"),
                                         BayerPattern::kRggb);
  CHECK(back.width == 6);
  CHECK(back.data == frame.data);
}

// ---------------------------------------------------------------------------
// demosaic

namespace {

BayerFrame uniform_frame(int w, int h, std::uint8_t value,
                         BayerPattern pattern) {
  BayerFrame f;
  f.width = w;
  f.height = h;
  f.pattern = pattern;
  f.data.assign(static_cast<std::size_t>(w) * h, value);
  return f;
}

}  // namespace

TEST_CASE("demosaic of a constant mosaic is constant RGB") {
  const RadianceImage img = demosaic(uniform_frame(8, 6, 255,
                                                   BayerPattern::kRggb));
  for (float v : img.values()) CHECK(v == 1.0f);
}

TEST_CASE("demosaic impulse matches the hand-computed bilinear stencil") {
  // RGGB, red site impulse at (2,2), everything else black.
  BayerFrame f = uniform_frame(8, 8, 0, BayerPattern::kRggb);
  f.data[2 * 8 + 2] = 255;
  const RadianceImage img = demosaic(f);

  const float one = 1.0f;
  CHECK(img.at(2, 2, 0) == one);          // the red sample itself
  CHECK(img.at(2, 2, 1) == 0.0f);
  CHECK(img.at(2, 2, 2) == 0.0f);
  CHECK(img.at(1, 2, 0) == one / 2);      // green sites: 2-tap average
  CHECK(img.at(3, 2, 0) == one / 2);
  CHECK(img.at(2, 1, 0) == one / 2);
  CHECK(img.at(2, 3, 0) == one / 2);
  CHECK(img.at(1, 1, 0) == one / 4);      // blue sites: diagonal average
  CHECK(img.at(3, 3, 0) == one / 4);
  CHECK(img.at(4, 2, 0) == 0.0f);         // next red site unaffected
}

TEST_CASE("demosaic preserves the sensor resolution") {
  const RadianceImage img =
      demosaic(uniform_frame(2048, 1440, 128, BayerPattern::kGrbg));
  CHECK(img.width() == 2048);
  CHECK(img.height() == 1440);
}

TEST_CASE("demosaic rejects odd dimensions") {
  CHECK_THROWS_AS(demosaic(uniform_frame(7, 8, 0, BayerPattern::kRggb)),
                  ValidationError);
}

TEST_CASE("demosaic commutes with horizontal mirroring") {
  std::mt19937 rng(1234);
  BayerFrame f = uniform_frame(16, 12, 0, BayerPattern::kRggb);
  for (auto& v : f.data) v = static_cast<std::uint8_t>(rng() & 0xff);

  BayerFrame mirrored = f;
  mirrored.pattern = mirrored_pattern(f.pattern);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      mirrored.data[static_cast<std::size_t>(y) * f.width + x] =
          f.at(f.width - 1 - x, y);

  const RadianceImage a = demosaic(mirrored);
  const RadianceImage b = demosaic(f);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(a.at(x, y, c) == b.at(f.width - 1 - x, y, c));
}

TEST_CASE("pfm headers with absurd dimensions are rejected") {
  TempDir tmp("pfmdim");
  atomic_write_file(tmp.file("huge.pfm"), "PF\n2000000 2000000\n-1.0\n");
  CHECK_THROWS_WITH_AS(read_pfm(tmp.file("huge.pfm")),
                       doctest::Contains("overflow"), IoError);
  atomic_write_file(tmp.file("zero.pfm"), "PF\n0 4\n-1.0\n");
  CHECK_THROWS_AS(read_pfm(tmp.file("zero.pfm")), IoError);
}

TEST_CASE("pfm round-trip holds across shapes and seeds") {
  TempDir tmp("pfmprop");
  int case_id = 0;
  for (auto [w, h] : {std::pair{1, 1}, {2, 3}, {64, 64}, {33, 7}, {5, 128}}) {
    const RadianceImage img = random_image(w, h, 1000 + case_id, 0.0f, 32.0f);
    const std::string path = tmp.file("p" + std::to_string(case_id) + ".pfm");
    write_pfm(path, img);
    CHECK(bitwise_equal(img, read_pfm(path)));
    ++case_id;
  }
}

TEST_CASE("mirror commutation holds for every bayer pattern") {
  std::mt19937 rng(4321);
  for (BayerPattern pattern :
       {BayerPattern::kRggb, BayerPattern::kBggr, BayerPattern::kGrbg,
        BayerPattern::kGbrg}) {
    BayerFrame f;
    f.width = 12;
    f.height = 10;
    f.pattern = pattern;
    f.data.resize(120);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(rng() & 0xff);

    BayerFrame mirrored = f;
    mirrored.pattern = mirrored_pattern(pattern);
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x)
        mirrored.data[static_cast<std::size_t>(y) * f.width + x] =
            f.at(f.width - 1 - x, y);

    const RadianceImage a = demosaic(mirrored);
    const RadianceImage b = demosaic(f);
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x)
        for (int c = 0; c < 3; ++c)
          CHECK(a.at(x, y, c) == b.at(f.width - 1 - x, y, c));
  }
}
