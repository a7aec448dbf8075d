// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// olat: one executable over the capture-to-relight pipeline.
//
//   synth      render a synthetic capture stream with ground truth
//   ingest     demosaic raw Bayer PGM frames into linear PFM
//   align      assemble temporally aligned OLAT sets from a stream
//   relight    relight OLAT sets under an env map, weights, or rim preset
//   rim        write a rear-cone rim-light weight file
//   composite  alpha-composite a foreground over a background
//   normalize  transfer parameter-stream statistics between actors
//   metrics    compare two frame directories and report PSNR/SSIM/MS-SSIM/MAE
//
// Every subcommand writes outputs atomically (temp file, then rename) and
// produces byte-identical results for any --threads value.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "olat/align.hpp"
#include "olat/demosaic.hpp"
#include "olat/image_io.hpp"
#include "olat/metrics.hpp"
#include "olat/normalize.hpp"
#include "olat/parallel.hpp"
#include "olat/relight.hpp"
#include "olat/rig.hpp"
#include "olat/storage.hpp"
#include "olat/synth.hpp"

namespace fs = std::filesystem;
using namespace olat;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

std::string zero_pad(std::int64_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*lld", width,
                static_cast<long long>(value));
  return buf;
}

std::pair<int, int> parse_size(const std::string& text) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos)
    throw ValidationError("--size wants <width>x<height>");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ValidationError("--size wants <width>x<height>");
  }
}

Rgb parse_rgb(const std::string& text) {
  Rgb rgb;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &rgb.r, &rgb.g, &rgb.b) != 3)
    throw ValidationError("expected r,g,b triple, got '" + text + "'");
  return rgb;
}

std::pair<double, double> parse_vec2(const std::string& text) {
  double x = 0.0, y = 0.0;
  if (std::sscanf(text.c_str(), "%lf,%lf", &x, &y) != 2)
    throw ValidationError("expected vx,vy pair, got '" + text + "'");
  return {x, y};
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Expands `--config <file>` into ordinary flag tokens. The file holds one
/// `key = value` pair per line with the same keys as the flags; `#` starts a
/// comment. Flags given on the command line win over the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw ValidationError("--config needs a file argument");
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config file " + config_path);

  auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string()
                                     : s.substr(from, to - from + 1);
  };
  auto already_given = [&](const std::string& flag) {
    for (const std::string& a : args)
      if (a == flag || a.starts_with(flag + "=")) return true;
    return false;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(config_path + " line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw ValidationError(config_path + " line " + std::to_string(line_no) +
                            ": empty key");
    const std::string flag = "--" + key;
    if (already_given(flag)) continue;
    if (value == "true" || value == "yes" || value == "on") {
      args.push_back(flag);
    } else if (value == "false" || value == "no" || value == "off") {
      // absent flag
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

/// Tone-mapped preview: exposure scale, then the writer's gamma encoding.
void write_preview(const std::string& path, const RadianceImage& img,
                   double exposure) {
  RadianceImage scaled = img;
  for (float& v : scaled.values()) v = static_cast<float>(v * exposure);
  write_png(path, scaled, ImageEncoding::kPng8);
}

/// Nearest-neighbor thumbnail grid over a frame sequence.
RadianceImage contact_sheet(const std::vector<RadianceImage>& frames,
                            int thumb_width) {
  const int cols = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(double(frames.size())))));
  const int rows =
      static_cast<int>((frames.size() + cols - 1) / cols);
  const double aspect =
      static_cast<double>(frames[0].height()) / frames[0].width();
  const int tw = thumb_width;
  const int th = std::max(1, static_cast<int>(std::lround(tw * aspect)));

  RadianceImage sheet(cols * tw, rows * th, 0.0f);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const int ox = static_cast<int>(i % cols) * tw;
    const int oy = static_cast<int>(i / cols) * th;
    const RadianceImage& f = frames[i];
    for (int y = 0; y < th; ++y) {
      const int sy = std::min(f.height() - 1,
                              static_cast<int>(y * f.height() / th));
      for (int x = 0; x < tw; ++x) {
        const int sx = std::min(f.width() - 1,
                                static_cast<int>(x * f.width() / tw));
        for (int c = 0; c < 3; ++c)
          sheet.at(ox + x, oy + y, c) = f.at(sx, sy, c);
      }
    }
  }
  return sheet;
}

// ---------------------------------------------------------------------------

struct SynthOptions {
  std::string out;
  std::string rig_path;
  int leds = 96;
  std::string size = "256x256";
  int frames = 240;
  std::string velocity = "1,0";
  int cycle = 6;
  double fps = 1000.0;
  int stride = 40;
  unsigned seed = 7;
  int border_margin = 0;
  bool static_set = false;
};

int run_synth(const SynthOptions& opt) {
  const auto [width, height] = parse_size(opt.size);
  const auto [vx, vy] = parse_vec2(opt.velocity);

  LightRig rig = opt.rig_path.empty()
                     ? fibonacci_rig(opt.leds, 1.3, "dome" +
                                     std::to_string(opt.leds))
                     : load_rig(opt.rig_path);

  SyntheticScene scene = make_default_scene(width, height, opt.seed);
  if (opt.border_margin > 0)
    scene.albedo = make_bordered_texture(width, height, opt.seed,
                                         opt.border_margin);

  const CaptureSchedule schedule = CaptureSchedule::with_identity_order(
      rig.led_count(), opt.cycle, opt.fps, opt.stride);
  const MotionTrack track =
      constant_velocity_track(static_cast<std::size_t>(opt.frames), vx, vy);

  fs::create_directories(opt.out);
  const CaptureStream stream =
      render_capture_stream(scene, rig, schedule, track);
  write_capture_stream(opt.out, stream, schedule);
  save_track((fs::path(opt.out) / "track.txt").string(), track);
  save_rig((fs::path(opt.out) / "rig.txt").string(), rig);

  // Ground-truth sidecars at the reference pose. Normal components span
  // [-1,1]; files store (n+1)/2 so the float map stays nonnegative.
  const OlatRender gt = render_olat(scene, rig);
  RadianceImage encoded_normals(gt.normals.width(), gt.normals.height());
  for (std::size_t i = 0; i < encoded_normals.values().size(); ++i)
    encoded_normals.values()[i] = 0.5f * (gt.normals.values()[i] + 1.0f);
  write_pfm((fs::path(opt.out) / "normal_gt.pfm").string(), encoded_normals);
  write_pfm((fs::path(opt.out) / "albedo_gt.pfm").string(), gt.albedo);

  if (opt.static_set) write_olat_set(opt.out, gt.set);

  // A smooth sample illumination to relight against.
  write_pfm((fs::path(opt.out) / "env.pfm").string(),
            make_smooth_env(64, 32, opt.seed).pixels);

  std::cout << "stream " << opt.out << " frames " << stream.size() << " leds "
            << rig.led_count() << "\n";
  return 0;
}

struct IngestOptions {
  std::string in;
  std::string out;
  std::string pattern = "rggb";
};

int run_ingest(const IngestOptions& opt) {
  const BayerPattern pattern = bayer_pattern_from_string(opt.pattern);
  std::vector<fs::path> inputs;
  if (fs::is_directory(opt.in)) {
    for (const auto& entry : fs::directory_iterator(opt.in))
      if (entry.path().extension() == ".pgm") inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
  } else {
    inputs.push_back(opt.in);
  }
  if (inputs.empty()) throw IoError("no .pgm frames under " + opt.in);

  fs::create_directories(opt.out);
  for (const fs::path& path : inputs) {
    const BayerFrame frame = read_pgm_bayer(path.string(), pattern);
    const RadianceImage rgb = demosaic(frame);
    const fs::path out =
        fs::path(opt.out) / (path.stem().string() + ".pfm");
    write_pfm(out.string(), rgb);
  }
  std::cout << "demosaiced " << inputs.size() << " frames\n";
  return 0;
}

struct AlignOptions {
  std::string stream_dir;
  std::string out;
  int stride = 0;   // 0: manifest value
  int cycle = 0;    // 0: manifest value
  int window = 0;   // 0: derived default
  int pyramid_levels = 4;
  bool skip_incomplete = false;
  std::string rig_name;
};

int run_align(const AlignOptions& opt) {
  StreamManifest manifest;
  CaptureStream stream = read_capture_stream(opt.stream_dir, &manifest);

  CaptureSchedule schedule;
  schedule.cycle = opt.cycle > 0 ? opt.cycle : manifest.cycle;
  schedule.capture_fps = manifest.fps;
  schedule.output_stride = opt.stride > 0 ? opt.stride : 40;
  schedule.led_order = manifest.led_order;
  if (schedule.led_order.empty())
    schedule = CaptureSchedule::with_identity_order(
        manifest.leds, schedule.cycle, schedule.capture_fps,
        schedule.output_stride);
  if (opt.cycle > 0 && opt.cycle != manifest.cycle) {
    // Relabel under the requested cycle.
    stream = label_stream(std::move(stream.frames), schedule);
  }

  AlignParams params;
  params.window_frames = opt.window;
  params.flow.pyramid_levels = opt.pyramid_levels;
  params.skip_incomplete = opt.skip_incomplete;
  params.rig_name = opt.rig_name;

  const AssembleResult result = assemble_sets(stream, schedule, params);
  fs::create_directories(opt.out);
  for (const OlatSet& set : result.sets) write_olat_set(opt.out, set);

  for (const auto& [anchor, missing] : result.skipped) {
    std::cerr << "warning: skipped anchor " << anchor << " (missing "
              << missing.size() << " LEDs)\n";
  }
  std::cout << "assembled " << result.sets.size() << " sets at "
            << schedule.output_rate() << " sets/s\n";
  return 0;
}

struct RelightOptions {
  std::string set_path;
  std::string out;
  std::string env_path;
  std::string weights_path;
  std::string rig_path;
  double rotate_deg = 0.0;
  double rim_cone_deg = 0.0;
  std::string rim_rgb = "1,1,1";
  std::string bg_path;
  std::string alpha_path;
  double exposure = 1.0;
  int sheet_width = 160;
};

int run_relight(const RelightOptions& opt) {
  if (opt.env_path.empty() == opt.weights_path.empty())
    throw ValidationError("pass exactly one of --env or --weights");

  const std::vector<std::string> set_dirs = find_set_directories(opt.set_path);
  std::vector<OlatSet> sets;
  sets.reserve(set_dirs.size());
  for (const std::string& dir : set_dirs) sets.push_back(read_olat_set(dir));

  LightWeights weights;
  std::optional<LightRig> rig;
  if (!opt.rig_path.empty()) rig = load_rig(opt.rig_path);
  if (!opt.env_path.empty()) {
    if (!rig) throw ValidationError("--env needs --rig for the LED geometry");
    EnvironmentMap env;
    env.pixels = read_image(opt.env_path);
    env.rotation = deg_to_rad(opt.rotate_deg);
    weights = env_to_weights(env, *rig);
  } else {
    weights = load_weights(opt.weights_path);
  }

  if (opt.rim_cone_deg > 0.0) {
    if (!rig) throw ValidationError("--rim-cone needs --rig");
    std::string warning;
    const LightWeights rim = rim_preset(*rig, deg_to_rad(opt.rim_cone_deg),
                                        parse_rgb(opt.rim_rgb), &warning);
    if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
    weights = add_rim(weights, rim);
  }

  std::optional<RadianceImage> bg;
  std::optional<AlphaMatte> alpha;
  if (!opt.bg_path.empty() != !opt.alpha_path.empty())
    throw ValidationError("--bg and --alpha go together");
  if (!opt.bg_path.empty()) {
    bg = read_image(opt.bg_path);
    alpha = read_alpha(opt.alpha_path);
  }

  fs::create_directories(opt.out);
  std::vector<RadianceImage> outputs;
  for (const OlatSet& set : sets) {
    RadianceImage frame = relight(set, weights);
    if (bg) frame = composite(frame, *alpha, *bg);
    const std::string stem = "frame_" + zero_pad(set.anchor_ts, 6);
    write_pfm((fs::path(opt.out) / (stem + ".pfm")).string(), frame);
    write_preview((fs::path(opt.out) / (stem + ".png")).string(), frame,
                  opt.exposure);
    outputs.push_back(std::move(frame));
  }
  write_preview((fs::path(opt.out) / "contact_sheet.png").string(),
                contact_sheet(outputs, opt.sheet_width), opt.exposure);
  std::cout << "relit " << outputs.size() << " frames\n";
  return 0;
}

struct RimOptions {
  std::string rig_path;
  double cone_deg = 35.0;
  std::string rgb = "1,1,1";
  std::string out;
};

int run_rim(const RimOptions& opt) {
  const LightRig rig = load_rig(opt.rig_path);
  std::string warning;
  const LightWeights w =
      rim_preset(rig, deg_to_rad(opt.cone_deg), parse_rgb(opt.rgb), &warning);
  if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
  save_weights(opt.out, w);
  int selected = 0;
  for (const Rgb& lw : w)
    if (lw.r > 0.0 || lw.g > 0.0 || lw.b > 0.0) ++selected;
  std::cout << "rim weights " << opt.out << " leds " << selected << "/"
            << rig.led_count() << "\n";
  return 0;
}

struct CompositeOptions {
  std::string fg, alpha, bg, out;
  int depth = 8;
};

int run_composite(const CompositeOptions& opt) {
  const RadianceImage fg = read_image(opt.fg);
  const AlphaMatte matte = read_alpha(opt.alpha);
  const RadianceImage bg = read_image(opt.bg);
  const RadianceImage out = composite(fg, matte, bg);

  const std::string ext = fs::path(opt.out).extension().string();
  if (ext == ".pfm")
    write_pfm(opt.out, out);
  else if (ext == ".png")
    write_png(opt.out, out,
              opt.depth == 16 ? ImageEncoding::kPng16 : ImageEncoding::kPng8);
  else
    throw IoError("unsupported output extension: " + opt.out);
  std::cout << "composited " << opt.out << "\n";
  return 0;
}

struct NormalizeOptions {
  std::string src, tgt, out;
  std::string stats_out;
};

int run_normalize(const NormalizeOptions& opt) {
  const ParamStream src = load_param_stream(opt.src);
  const ParamStream tgt = load_param_stream(opt.tgt);
  if (src.dim != tgt.dim)
    throw ValidationError("source and target streams differ in dimension");

  const StreamStats src_stats = estimate_stats(src);
  const StreamStats tgt_stats = estimate_stats(tgt);
  const ParamStream normalized = normalize_stream(src, src_stats, tgt_stats);
  save_param_stream(opt.out, normalized);

  std::cout << "source stats\n" << format_stats(src_stats);
  std::cout << "target stats\n" << format_stats(tgt_stats);
  if (!opt.stats_out.empty()) {
    fs::create_directories(opt.stats_out);
    atomic_write_file((fs::path(opt.stats_out) / "src_stats.txt").string(),
                      format_stats(src_stats));
    atomic_write_file((fs::path(opt.stats_out) / "tgt_stats.txt").string(),
                      format_stats(tgt_stats));
  }
  return 0;
}

struct MetricsOptions {
  std::string a, b, out;
};

int run_metrics(const MetricsOptions& opt) {
  auto list_frames = [](const std::string& dir) {
    std::vector<fs::path> frames;
    if (!fs::is_directory(dir)) throw IoError("no such directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".pfm") frames.push_back(entry.path());
    std::sort(frames.begin(), frames.end());
    if (frames.empty()) throw IoError("no .pfm frames under " + dir);
    return frames;
  };

  const std::vector<fs::path> fa = list_frames(opt.a);
  const std::vector<fs::path> fb = list_frames(opt.b);
  if (fa.size() != fb.size())
    throw ValidationError("frame counts differ: " + std::to_string(fa.size()) +
                          " vs " + std::to_string(fb.size()));

  std::vector<RadianceImage> a, b;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i].filename() != fb[i].filename())
      throw ValidationError("frame names diverge at " +
                            fa[i].filename().string());
    a.push_back(read_pfm(fa[i].string()));
    b.push_back(read_pfm(fb[i].string()));
    names.push_back(fa[i].stem().string());
  }

  const MetricReport report = compare_frames(a, b, names);
  const std::string text = format_report(report);
  std::cout << text;
  if (!opt.out.empty()) atomic_write_file(opt.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"olat: OLAT reflectance-field alignment and relighting"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: OLAT_THREADS or hardware)");

  SynthOptions synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "render a synthetic capture stream");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--rig", synth.rig_path, "rig file (default: generated dome)");
  synth_cmd->add_option("--leds", synth.leds, "LED count for the generated dome");
  synth_cmd->add_option("--size", synth.size, "frame size WxH");
  synth_cmd->add_option("--frames", synth.frames, "stream length in frames");
  synth_cmd->add_option("--velocity", synth.velocity, "scene velocity px/frame vx,vy");
  synth_cmd->add_option("--cycle", synth.cycle, "frames per tracking cycle");
  synth_cmd->add_option("--fps", synth.fps, "capture rate in Hz");
  synth_cmd->add_option("--stride", synth.stride, "output stride in frames");
  synth_cmd->add_option("--seed", synth.seed, "texture/env seed");
  synth_cmd->add_option("--border-margin", synth.border_margin,
                        "flatten texture within this border width");
  synth_cmd->add_flag("--static-set", synth.static_set,
                      "also write the reference-pose OLAT set");
  synth_cmd->add_option("--config", "key = value file with the same keys as the flags");

  IngestOptions ingest;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "demosaic Bayer PGM frames");
  ingest_cmd->add_option("--in", ingest.in, "PGM file or directory")->required();
  ingest_cmd->add_option("--out", ingest.out, "output directory")->required();
  ingest_cmd->add_option("--pattern", ingest.pattern, "rggb|bggr|grbg|gbrg");
  ingest_cmd->add_option("--config", "key = value file with the same keys as the flags");

  AlignOptions align;
  CLI::App* align_cmd =
      app.add_subcommand("align", "assemble aligned OLAT sets");
  align_cmd->add_option("--stream", align.stream_dir, "stream directory")->required();
  align_cmd->add_option("--out", align.out, "output directory")->required();
  align_cmd->add_option("--stride", align.stride, "output stride in frames");
  align_cmd->add_option("--cycle", align.cycle, "override the manifest cycle");
  align_cmd->add_option("--window", align.window, "gather window half-width");
  align_cmd->add_option("--pyramid-levels", align.pyramid_levels,
                        "optical-flow pyramid depth");
  align_cmd->add_flag("--skip-incomplete", align.skip_incomplete,
                      "skip anchors with missing LED coverage");
  align_cmd->add_option("--rig-name", align.rig_name, "rig name for manifests");
  align_cmd->add_option("--config", "key = value file with the same keys as the flags");

  RelightOptions relight_opt;
  CLI::App* relight_cmd =
      app.add_subcommand("relight", "relight OLAT sets");
  relight_cmd->add_option("--set", relight_opt.set_path,
                          "set directory or parent of set_* dirs")->required();
  relight_cmd->add_option("--out", relight_opt.out, "output directory")->required();
  relight_cmd->add_option("--env", relight_opt.env_path, "environment map");
  relight_cmd->add_option("--weights", relight_opt.weights_path, "weight file");
  relight_cmd->add_option("--rig", relight_opt.rig_path, "rig file for --env/--rim-cone");
  relight_cmd->add_option("--rotate", relight_opt.rotate_deg,
                          "azimuthal env rotation (degrees)");
  relight_cmd->add_option("--rim-cone", relight_opt.rim_cone_deg,
                          "rear rim cone half-angle (degrees)");
  relight_cmd->add_option("--rim-rgb", relight_opt.rim_rgb, "rim intensity r,g,b");
  relight_cmd->add_option("--bg", relight_opt.bg_path, "background image");
  relight_cmd->add_option("--alpha", relight_opt.alpha_path, "alpha matte");
  relight_cmd->add_option("--exposure", relight_opt.exposure, "preview exposure");
  relight_cmd->add_option("--config", "key = value file with the same keys as the flags");

  RimOptions rim;
  CLI::App* rim_cmd = app.add_subcommand("rim", "write rim-light weights");
  rim_cmd->add_option("--rig", rim.rig_path, "rig file")->required();
  rim_cmd->add_option("--cone", rim.cone_deg, "cone half-angle (degrees)");
  rim_cmd->add_option("--rgb", rim.rgb, "intensity r,g,b");
  rim_cmd->add_option("--out", rim.out, "weight file")->required();
  rim_cmd->add_option("--config", "key = value file with the same keys as the flags");

  CompositeOptions comp;
  CLI::App* comp_cmd =
      app.add_subcommand("composite", "alpha-composite fg over bg");
  comp_cmd->add_option("--fg", comp.fg, "foreground image")->required();
  comp_cmd->add_option("--alpha", comp.alpha, "alpha matte")->required();
  comp_cmd->add_option("--bg", comp.bg, "background image")->required();
  comp_cmd->add_option("--out", comp.out, "output image (.pfm or .png)")->required();
  comp_cmd->add_option("--depth", comp.depth, "png bit depth (8 or 16)");
  comp_cmd->add_option("--config", "key = value file with the same keys as the flags");

  NormalizeOptions norm;
  CLI::App* norm_cmd =
      app.add_subcommand("normalize", "match parameter distributions");
  norm_cmd->add_option("--src", norm.src, "source stream")->required();
  norm_cmd->add_option("--tgt", norm.tgt, "target stream")->required();
  norm_cmd->add_option("--out", norm.out, "normalized stream")->required();
  norm_cmd->add_option("--stats-out", norm.stats_out, "stats directory");
  norm_cmd->add_option("--config", "key = value file with the same keys as the flags");

  MetricsOptions metrics_opt;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "compare two frame directories");
  metrics_cmd->add_option("--a", metrics_opt.a, "first directory")->required();
  metrics_cmd->add_option("--b", metrics_opt.b, "second directory")->required();
  metrics_cmd->add_option("--out", metrics_opt.out, "report file");
  metrics_cmd->add_option("--config", "key = value file with the same keys as the flags");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  }
  std::reverse(args.begin(), args.end());  // CLI11 wants a reversed vector

  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  set_default_thread_count(threads);

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (ingest_cmd->parsed()) return run_ingest(ingest);
    if (align_cmd->parsed()) return run_align(align);
    if (relight_cmd->parsed()) return run_relight(relight_opt);
    if (rim_cmd->parsed()) return run_rim(rim);
    if (comp_cmd->parsed()) return run_composite(comp);
    if (norm_cmd->parsed()) return run_normalize(norm);
    if (metrics_cmd->parsed()) return run_metrics(metrics_opt);
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
