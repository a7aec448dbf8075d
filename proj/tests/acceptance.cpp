// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any fail. Tolerances are fixed here, not
// tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "olat/align.hpp"
#include "olat/image_io.hpp"
#include "olat/metrics.hpp"
#include "olat/normalize.hpp"
#include "olat/relight.hpp"
#include "olat/rig.hpp"
#include "olat/storage.hpp"
#include "olat/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace olat;
using namespace olat::testutil;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double peak_of(const RadianceImage& img) {
  float peak = 0.0f;
  for (float v : img.values()) peak = std::max(peak, v);
  return std::max(1e-12, static_cast<double>(peak));
}

LightWeights random_weights(int leds, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  LightWeights w(leds);
  for (Rgb& lw : w) lw = {dist(rng), dist(rng), dist(rng)};
  return w;
}

// ---------------------------------------------------------------------------
// 1. Superposition: relight(a+b) == relight(a) + relight(b) to 1e-5
//    relative on a 96-LED 256x256 synthetic set, 20 random weight pairs,
//    under 10 s.
bool superposition(std::string& detail) {
  const auto start = Clock::now();
  const SyntheticScene scene = make_default_scene(256, 256, 101);
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  const OlatSet set = render_olat(scene, rig).set;

  double worst = 0.0;
  for (unsigned pair = 0; pair < 20; ++pair) {
    const LightWeights a = random_weights(96, 1000 + 2 * pair);
    const LightWeights b = random_weights(96, 1001 + 2 * pair);
    const RadianceImage lit_sum = relight(set, add_rim(a, b));
    const RadianceImage lit_a = relight(set, a);
    const RadianceImage lit_b = relight(set, b);
    for (std::size_t i = 0; i < lit_sum.values().size(); ++i) {
      const double lhs = lit_sum.values()[i];
      const double rhs =
          static_cast<double>(lit_a.values()[i]) + lit_b.values()[i];
      const double rel =
          std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
      worst = std::max(worst, rel);
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream ss;
  ss << "max rel err " << worst << ", " << elapsed << " s";
  detail = ss.str();
  return worst < 1e-5 && elapsed < 10.0;
}

// ---------------------------------------------------------------------------
// 2. Environment-relighting oracle: weights-based relight against the
//    brute-force env render, PSNR >= 30 dB for 5 smooth maps, under 60 s.
bool env_relight_oracle(std::string& detail) {
  const auto start = Clock::now();
  const SyntheticScene scene = make_default_scene(256, 256, 102);
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  const OlatSet set = render_olat(scene, rig).set;

  double worst = 1e9;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const EnvironmentMap env = make_smooth_env(64, 32, 200 + seed);
    const RadianceImage via_weights = relight(set, env_to_weights(env, rig));
    const RadianceImage direct = render_env_direct(scene, env);
    worst = std::min(worst, psnr(via_weights, direct, peak_of(direct)));
  }
  const double elapsed = seconds_since(start);
  std::ostringstream ss;
  ss << "min PSNR " << worst << " dB, " << elapsed << " s";
  detail = ss.str();
  return worst >= 30.0 && elapsed < 60.0;
}

// ---------------------------------------------------------------------------
// 3. Conservation: per-channel weight totals equal the map's brute-force
//    radiance * solid-angle integral within 1e-4 relative, 10 random maps.
bool weight_conservation(std::string& detail) {
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  double worst = 0.0;
  for (unsigned seed = 0; seed < 10; ++seed) {
    const EnvironmentMap env = make_smooth_env(48, 24, 300 + seed);
    const LightWeights weights = env_to_weights(env, rig);
    Rgb total{};
    for (const Rgb& w : weights) total += w;

    // Independent integral, straight over the texels.
    const double pi = std::acos(-1.0);
    double integral[3] = {0, 0, 0};
    for (int row = 0; row < 24; ++row) {
      const double theta = pi * (row + 0.5) / 24;
      const double solid = (2.0 * pi / 48) * (pi / 24) * std::sin(theta);
      for (int col = 0; col < 48; ++col)
        for (int c = 0; c < 3; ++c)
          integral[c] += env.pixels.at(col, row, c) * solid;
    }
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst,
                       std::abs(total[c] - integral[c]) / integral[c]);
  }
  std::ostringstream ss;
  ss << "max rel err " << worst;
  detail = ss.str();
  return worst < 1e-4;
}

// ---------------------------------------------------------------------------
// 4. Alignment recovery on a constant-velocity stream (1 px/frame diagonal,
//    cycle 6, 96 LEDs, stride 40): re-rendered full-lit sets match the
//    static anchor-pose render at >= 35 dB; single-pair flow errors stay
//    under 0.25 px (integer) / 0.5 px (subpixel); under 5 minutes.
bool alignment_recovery(std::string& detail) {
  const auto start = Clock::now();

  // Scene with a texture patch and sphere that stay in frame across every
  // window the two interior anchors use.
  SyntheticScene scene;
  scene.width = 256;
  scene.height = 256;
  scene.sphere_cx = 64.0;
  scene.sphere_cy = 64.0;
  scene.sphere_radius = 40.0;
  scene.background = {0.20, 0.22, 0.25};
  scene.ambient = 0.08;
  scene.albedo = RadianceImage(256, 256, 0.55f);
  {
    const RadianceImage tex = make_smooth_texture(256, 256, 104, 0.2f, 0.9f);
    // Raised-cosine window over [8,120]^2 with a 16 px taper.
    auto envelope = [](double p) {
      const double lo = 8.0, hi = 120.0, taper = 16.0;
      if (p < lo || p > hi) return 0.0;
      const double edge = std::min(p - lo, hi - p);
      if (edge >= taper) return 1.0;
      return 0.5 * (1.0 - std::cos(edge / taper * std::acos(-1.0)));
    };
    for (int y = 0; y < 256; ++y) {
      for (int x = 0; x < 256; ++x) {
        const float e = static_cast<float>(envelope(x) * envelope(y));
        for (int c = 0; c < 3; ++c)
          scene.albedo.at(x, y, c) =
              0.55f + e * (tex.at(x, y, c) - 0.55f);
      }
    }
  }

  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  const CaptureSchedule schedule = CaptureSchedule::with_identity_order(96, 6);
  const double v = 1.0 / std::sqrt(2.0);  // 1 px/frame along the diagonal
  const MotionTrack track = constant_velocity_track(208, v, v);
  const CaptureStream stream =
      render_capture_stream(scene, rig, schedule, track);

  AlignParams params;
  params.window_frames = 62;
  params.skip_incomplete = true;
  params.rig_name = "dome96";
  const AssembleResult result = assemble_sets(stream, schedule, params);
  if (result.sets.size() < 2) {
    detail = "expected at least 2 assembled sets, got " +
             std::to_string(result.sets.size());
    return false;
  }

  const LightWeights ones(96, Rgb{1.0, 1.0, 1.0});
  double worst_psnr = 1e9;
  for (const OlatSet& set : result.sets) {
    const RadianceImage rendered = relight(set, ones);
    const std::size_t anchor_index = static_cast<std::size_t>(set.anchor_ts);
    const RadianceImage truth =
        render_full_lit(scene, rig, track[anchor_index]);
    worst_psnr = std::min(worst_psnr, psnr(rendered, truth, peak_of(truth)));
  }

  // Single-pair flow accuracy on a fully textured scene.
  const SyntheticScene flat = make_default_scene(256, 256, 105);
  const RadianceImage base = render_full_lit(flat, rig);
  auto epe = [&](double tx, double ty) {
    const RadianceImage moved =
        render_full_lit(flat, rig, ScenePose{tx, ty, 0.0});
    const FlowField flow = compute_flow(base, moved);
    double acc = 0.0;
    std::size_t n = 0;
    for (int y = 32; y < 224; ++y) {
      for (int x = 32; x < 224; ++x) {
        acc += std::hypot(flow.u(x, y) + tx, flow.v(x, y) + ty);
        ++n;
      }
    }
    return acc / static_cast<double>(n);
  };
  const double epe_integer = epe(3.0, -2.0);
  const double epe_subpixel = epe(0.5, 0.0);

  const double elapsed = seconds_since(start);
  std::ostringstream ss;
  ss << result.sets.size() << " sets, min PSNR " << worst_psnr
     << " dB, EPE int " << epe_integer << " px, subpx " << epe_subpixel
     << " px, " << elapsed << " s";
  detail = ss.str();
  return worst_psnr >= 35.0 && epe_integer < 0.25 && epe_subpixel < 0.5 &&
         elapsed < 300.0;
}

// ---------------------------------------------------------------------------
// 5. Multiplexing rate: 1000 frames at stride 40 yield exactly 25 sets.
bool multiplexing_rate(std::string& detail) {
  const CaptureSchedule schedule = CaptureSchedule::with_identity_order(96, 6);
  std::vector<RadianceImage> frames(1000, RadianceImage(16, 16, 0.5f));
  const CaptureStream stream = label_stream(std::move(frames), schedule);
  const AssembleResult result = assemble_sets(stream, schedule, {});
  std::ostringstream ss;
  ss << result.sets.size() << " sets from 1000 frames (rate "
     << schedule.output_rate() << "/s)";
  detail = ss.str();
  return result.sets.size() == 25;
}

// ---------------------------------------------------------------------------
// 6. Normalization round-trip identities.
bool normalization_roundtrip(std::string& detail) {
  std::mt19937 rng(106);
  std::normal_distribution<double> dist(0.0, 1.5);
  double worst = 0.0;

  for (int trial = 0; trial < 100; ++trial) {
    ParamStream src;
    src.dim = 6;
    src.tag = "pose";
    const std::size_t frames = 20 + rng() % 80;
    for (std::size_t i = 0; i < frames; ++i) {
      std::vector<double> v(6);
      for (double& x : v) x = dist(rng);
      src.vectors.push_back(std::move(v));
    }
    StreamStats tgt;
    tgt.count = 1;
    tgt.mean.resize(6);
    tgt.std_dev.resize(6);
    for (int k = 0; k < 6; ++k) {
      tgt.mean[k] = dist(rng);
      tgt.std_dev[k] = 0.25 + std::abs(dist(rng));
    }

    const StreamStats got =
        estimate_stats(normalize_stream(src, estimate_stats(src), tgt));
    for (int k = 0; k < 6; ++k) {
      worst = std::max(worst, std::abs(got.mean[k] - tgt.mean[k]));
      worst = std::max(worst, std::abs(got.std_dev[k] - tgt.std_dev[k]));
    }
  }

  // A->B->C equals A->C.
  ParamStream a;
  a.dim = 4;
  a.tag = "expression";
  for (int i = 0; i < 64; ++i) {
    std::vector<double> v(4);
    for (double& x : v) x = dist(rng);
    a.vectors.push_back(std::move(v));
  }
  StreamStats sb, sc;
  sb.count = sc.count = 1;
  for (int k = 0; k < 4; ++k) {
    sb.mean.push_back(dist(rng));
    sb.std_dev.push_back(0.5 + std::abs(dist(rng)));
    sc.mean.push_back(dist(rng));
    sc.std_dev.push_back(0.5 + std::abs(dist(rng)));
  }
  const StreamStats sa = estimate_stats(a);
  const ParamStream via_b = normalize_stream(normalize_stream(a, sa, sb), sb, sc);
  const ParamStream direct = normalize_stream(a, sa, sc);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst,
                       std::abs(via_b.vectors[i][k] - direct.vectors[i][k]));

  // Scalar worked example is exact.
  ParamStream scalar;
  scalar.dim = 1;
  scalar.tag = "pose";
  scalar.vectors = {{2.0}};
  const ParamStream mapped = normalize_stream(
      scalar, StreamStats{{1.0}, {1.0}, 1}, StreamStats{{0.0}, {2.0}, 1});
  const bool scalar_exact = mapped.vectors[0][0] == 2.0;

  std::ostringstream ss;
  ss << "max deviation " << worst << ", scalar case "
     << (scalar_exact ? "exact" : "WRONG");
  detail = ss.str();
  return worst < 1e-6 && scalar_exact;
}

// ---------------------------------------------------------------------------
// 7. Metric identities and the independent MS-SSIM reference.
bool metric_identities(std::string& detail) {
  double worst_ref = 0.0;
  for (unsigned seed = 0; seed < 5; ++seed) {
    RadianceImage a = make_smooth_texture(192, 192, 400 + seed, 0.1f, 0.9f);
    std::mt19937 rng(500 + seed);
    std::normal_distribution<float> noise(0.0f, 0.01f * (seed + 1));
    RadianceImage b = a;
    for (float& v : b.values())
      v = std::clamp(v + noise(rng), 0.0f, 1.0f);
    worst_ref = std::max(
        worst_ref, std::abs(ms_ssim(a, b) - oracle::ms_ssim_reference(a, b)));
  }

  const RadianceImage x = make_smooth_texture(192, 192, 410, 0.1f, 0.9f);
  const bool self_one = std::abs(ms_ssim(x, x) - 1.0) <= 1e-9;
  const bool mae_zero = mae(x, x) == 0.0;
  const bool psnr_inf =
      psnr(x, x, 1.0) == std::numeric_limits<double>::infinity();

  const SyntheticScene scene = make_default_scene(128, 128, 107);
  const RadianceImage normals =
      render_olat(scene, fibonacci_rig(4, 1.0, "t4")).normals;
  const double angle = 10.0 * std::acos(-1.0) / 180.0;
  const double tilt_err = std::abs(
      normal_angular_error(normals, oracle::tilt_normals(normals, angle)) -
      (1.0 - std::cos(angle)));

  std::ostringstream ss;
  ss << "ms_ssim ref gap " << worst_ref << ", tilt gap " << tilt_err
     << (self_one && mae_zero && psnr_inf ? "" : ", identity FAILURE");
  detail = ss.str();
  return worst_ref < 1e-6 && self_one && mae_zero && psnr_inf &&
         tilt_err < 1e-4;
}

// ---------------------------------------------------------------------------
// 8. Rim-light efficacy: a rear cone brightens the 3 px silhouette band
//    while the disc center moves under 1%.
bool rim_efficacy(std::string& detail) {
  const SyntheticScene scene = make_default_scene(256, 256, 108);
  const LightRig rig = fibonacci_rig(96, 1.3, "dome96");
  const OlatSet set = render_olat(scene, rig).set;

  const EnvironmentMap env = make_smooth_env(48, 24, 109);
  const LightWeights base = env_to_weights(env, rig);
  const RadianceImage plain = relight(set, base);
  const RadianceImage rimmed =
      relight(set, add_rim(base, rim_preset(rig, 0.6, {2.0, 2.0, 2.0})));

  auto band_mean = [&](const RadianceImage& img) {
    double acc = 0.0;
    int count = 0;
    for (int y = 0; y < 256; ++y) {
      for (int x = 0; x < 256; ++x) {
        const double r = std::hypot(x - scene.sphere_cx, y - scene.sphere_cy);
        if (std::abs(r - scene.sphere_radius) <= 1.5) {
          acc += luminance(img, x, y);
          ++count;
        }
      }
    }
    return acc / count;
  };

  const double lift = band_mean(rimmed) - band_mean(plain);
  const int cx = static_cast<int>(scene.sphere_cx);
  const int cy = static_cast<int>(scene.sphere_cy);
  const double center_shift =
      std::abs(luminance(rimmed, cx, cy) - luminance(plain, cx, cy)) /
      std::max(1e-12, static_cast<double>(luminance(plain, cx, cy)));

  std::ostringstream ss;
  ss << "band lift " << lift << ", center shift " << center_shift * 100.0
     << "%";
  detail = ss.str();
  return lift > 0.0 && center_shift <= 0.01;
}

// ---------------------------------------------------------------------------
// 9. CLI determinism: byte-identical outputs for 1 and 4 threads.

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(OLAT_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return rc == 0 ? "" : "command failed (" + std::to_string(rc) + "): " + cmd;
}

bool trees_identical(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> rel;
  for (const auto& entry : fs::recursive_directory_iterator(a))
    if (entry.is_regular_file())
      rel.push_back(fs::relative(entry.path(), a));
  std::sort(rel.begin(), rel.end());
  for (const fs::path& r : rel) {
    std::ifstream fa(a / r, std::ios::binary), fb(b / r, std::ios::binary);
    if (!fb) {
      why = "missing " + r.string();
      return false;
    }
    std::string da((std::istreambuf_iterator<char>(fa)), {});
    std::string db((std::istreambuf_iterator<char>(fb)), {});
    if (da != db) {
      why = "differs: " + r.string();
      return false;
    }
  }
  return true;
}

bool cli_determinism(std::string& detail) {
  TempDir tmp("determinism");
  const std::string root = tmp.path.string();

  // Shared inputs.
  {
    BayerFrame bayer;
    bayer.width = 64;
    bayer.height = 48;
    bayer.pattern = BayerPattern::kRggb;
    bayer.data.resize(64 * 48);
    std::mt19937 rng(900);
    for (auto& v : bayer.data) v = static_cast<std::uint8_t>(rng() & 0xff);
    fs::create_directories(root + "/bayer");
    write_pgm(root + "/bayer/shot.pgm", bayer);

    ParamStream src;
    src.dim = 3;
    src.tag = "pose";
    std::mt19937 prng(901);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 40; ++i)
      src.vectors.push_back({dist(prng), dist(prng), dist(prng)});
    ParamStream tgt = src;
    for (auto& v : tgt.vectors)
      for (double& x : v) x = 2.0 * x + 1.0;
    save_param_stream(root + "/src.txt", src);
    save_param_stream(root + "/tgt.txt", tgt);

    AlphaMatte alpha(96, 96);
    for (int y = 0; y < 96; ++y)
      for (int x = 0; x < 96; ++x)
        alpha.at(x, y) = std::clamp((x - 20.0f) / 50.0f, 0.0f, 1.0f);
    write_alpha(root + "/alpha.pfm", alpha);
    write_pfm(root + "/bg.pfm", make_smooth_texture(96, 96, 902));
  }

  struct Step {
    std::string name;
    std::string args;  // @OUT is replaced per thread-count run
  };
  const std::string synth_args =
      "synth --out @OUT/stream --leds 12 --size 96x96 --frames 60 "
      "--velocity 0.5,0.25 --cycle 6 --stride 20 --seed 9 --static-set";
  const std::vector<Step> steps = {
      {"synth", synth_args},
      {"ingest", "ingest --in " + root + "/bayer --pattern rggb --out @OUT/rgb"},
      {"align", "align --stream @OUT/stream --out @OUT/sets --stride 20 "
                "--skip-incomplete --rig-name t12"},
      {"rim", "rim --rig @OUT/stream/rig.txt --cone 40 --rgb 1.5,1.25,1 "
              "--out @OUT/rim.txt"},
      {"relight", "relight --set @OUT/sets --rig @OUT/stream/rig.txt "
                  "--env @OUT/stream/env.pfm --rotate 30 --rim-cone 40 "
                  "--rim-rgb 0.5,0.5,0.5 --out @OUT/relit"},
      {"composite", "composite --fg @OUT/relit/frame_000005.pfm --alpha " +
                        root + "/alpha.pfm --bg " + root +
                        "/bg.pfm --out @OUT/comp.png"},
      {"normalize", "normalize --src " + root + "/src.txt --tgt " + root +
                        "/tgt.txt --out @OUT/norm.txt --stats-out @OUT/stats"},
      {"metrics", "metrics --a @OUT/relit --b @OUT/relit --out @OUT/report.txt"},
  };

  for (int threads : {1, 4}) {
    const std::string out = root + "/t" + std::to_string(threads);
    fs::create_directories(out);
    for (const Step& step : steps) {
      std::string args = step.args;
      std::string::size_type pos;
      while ((pos = args.find("@OUT")) != std::string::npos)
        args.replace(pos, 4, out);
      const std::string err =
          run_cli("--threads " + std::to_string(threads) + " " + args);
      if (!err.empty()) {
        detail = step.name + ": " + err;
        return false;
      }
    }
  }

  std::string why;
  if (!trees_identical(root + "/t1", root + "/t4", why)) {
    detail = why;
    return false;
  }
  detail = std::to_string(steps.size()) + " subcommands byte-identical";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "superposition law", superposition},
      {2, "environment-relighting oracle", env_relight_oracle},
      {3, "env_to_weights conservation", weight_conservation},
      {4, "alignment recovery", alignment_recovery},
      {5, "multiplexing rate", multiplexing_rate},
      {6, "normalization round-trip", normalization_roundtrip},
      {7, "metric identities", metric_identities},
      {8, "rim-light efficacy", rim_efficacy},
      {9, "CLI determinism", cli_determinism},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
