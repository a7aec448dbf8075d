// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// olatkit._core: numpy-facing bindings over the C++ pipeline.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "olat/align.hpp"
#include "olat/demosaic.hpp"
#include "olat/flow.hpp"
#include "olat/image_io.hpp"
#include "olat/metrics.hpp"
#include "olat/normalize.hpp"
#include "olat/relight.hpp"
#include "olat/rig.hpp"
#include "olat/synth.hpp"

namespace py = pybind11;
using namespace olat;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray =
    py::array_t<double, py::array::c_style | py::array::forcecast>;

RadianceImage image_from_array(const FloatArray& arr, const char* what) {
  if (arr.ndim() != 3 || arr.shape(2) != 3)
    throw ValidationError(std::string(what) + ": expected an (H, W, 3) array");
  RadianceImage img(static_cast<int>(arr.shape(1)),
                    static_cast<int>(arr.shape(0)));
  std::memcpy(img.values().data(), arr.data(),
              img.value_count() * sizeof(float));
  return img;
}

py::array_t<float> array_from_image(const RadianceImage& img) {
  py::array_t<float> arr({img.height(), img.width(), 3});
  std::memcpy(arr.mutable_data(), img.values().data(),
              img.value_count() * sizeof(float));
  return arr;
}

AlphaMatte matte_from_array(const FloatArray& arr) {
  if (arr.ndim() != 2)
    throw ValidationError("alpha: expected an (H, W) array");
  std::vector<float> data(arr.data(), arr.data() + arr.size());
  return AlphaMatte(static_cast<int>(arr.shape(1)),
                    static_cast<int>(arr.shape(0)), std::move(data));
}

LightWeights weights_from_array(const DoubleArray& arr) {
  if (arr.ndim() != 2 || arr.shape(1) != 3)
    throw ValidationError("weights: expected an (N, 3) array");
  LightWeights w(arr.shape(0));
  for (py::ssize_t i = 0; i < arr.shape(0); ++i)
    w[i] = {arr.at(i, 0), arr.at(i, 1), arr.at(i, 2)};
  return w;
}

py::array_t<double> array_from_weights(const LightWeights& w) {
  py::array_t<double> arr({static_cast<py::ssize_t>(w.size()),
                           static_cast<py::ssize_t>(3)});
  auto view = arr.mutable_unchecked<2>();
  for (std::size_t i = 0; i < w.size(); ++i) {
    view(i, 0) = w[i].r;
    view(i, 1) = w[i].g;
    view(i, 2) = w[i].b;
  }
  return arr;
}

OlatSet set_from_array(const FloatArray& arr) {
  if (arr.ndim() != 4 || arr.shape(3) != 3)
    throw ValidationError("olat set: expected an (N, H, W, 3) array");
  OlatSet set;
  const std::size_t frame_values =
      static_cast<std::size_t>(arr.shape(1)) * arr.shape(2) * 3;
  for (py::ssize_t i = 0; i < arr.shape(0); ++i) {
    RadianceImage img(static_cast<int>(arr.shape(2)),
                      static_cast<int>(arr.shape(1)));
    std::memcpy(img.values().data(), arr.data() + i * frame_values,
                frame_values * sizeof(float));
    set.images.push_back(std::move(img));
  }
  return set;
}

ParamStream stream_from_array(const DoubleArray& arr, const std::string& tag) {
  if (arr.ndim() != 2)
    throw ValidationError("parameter stream: expected a (T, D) array");
  ParamStream s;
  s.dim = static_cast<int>(arr.shape(1));
  s.tag = tag;
  for (py::ssize_t t = 0; t < arr.shape(0); ++t)
    s.vectors.emplace_back(arr.data() + t * arr.shape(1),
                           arr.data() + (t + 1) * arr.shape(1));
  return s;
}

py::array_t<double> array_from_stream(const ParamStream& s) {
  py::array_t<double> arr({static_cast<py::ssize_t>(s.size()),
                           static_cast<py::ssize_t>(s.dim)});
  auto view = arr.mutable_unchecked<2>();
  for (std::size_t t = 0; t < s.size(); ++t)
    for (int k = 0; k < s.dim; ++k) view(t, k) = s.vectors[t][k];
  return arr;
}

py::array_t<double> vector_to_array(const std::vector<double>& v) {
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
  py::array_t<double> arr(shape);
  std::memcpy(arr.mutable_data(), v.data(), v.size() * sizeof(double));
  return arr;
}

StreamStats stats_from_arrays(const DoubleArray& mean, const DoubleArray& std) {
  if (mean.ndim() != 1 || std.ndim() != 1 || mean.shape(0) != std.shape(0))
    throw ValidationError("stats: mean and std must be equal-length vectors");
  StreamStats stats;
  stats.count = 1;
  stats.mean.assign(mean.data(), mean.data() + mean.shape(0));
  stats.std_dev.assign(std.data(), std.data() + std.shape(0));
  return stats;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OLAT reflectance-field alignment and relighting";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  py::class_<LightRig>(m, "LightRig")
      .def_property_readonly("directions",
                             [](const LightRig& rig) {
                               py::array_t<double> arr(
                                   {static_cast<py::ssize_t>(rig.leds.size()),
                                    static_cast<py::ssize_t>(3)});
                               auto view = arr.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < rig.leds.size();
                                    ++i) {
                                 view(i, 0) = rig.leds[i].x;
                                 view(i, 1) = rig.leds[i].y;
                                 view(i, 2) = rig.leds[i].z;
                               }
                               return arr;
                             })
      .def_readonly("radius", &LightRig::radius)
      .def_readonly("name", &LightRig::name)
      .def("__len__", &LightRig::led_count);

  m.def("load_rig", &load_rig, py::arg("path"));
  m.def("fibonacci_rig", &fibonacci_rig, py::arg("count"), py::arg("radius"),
        py::arg("name") = "dome");

  m.def(
      "env_to_weights",
      [](const FloatArray& env, const LightRig& rig, double rotation) {
        EnvironmentMap map;
        map.pixels = image_from_array(env, "env");
        map.rotation = rotation;
        return array_from_weights(env_to_weights(map, rig));
      },
      py::arg("env"), py::arg("rig"), py::arg("rotation") = 0.0,
      "Project an equirectangular (H, W, 3) radiance map onto the rig LEDs.");

  m.def(
      "rim_preset",
      [](const LightRig& rig, double cone_half_angle,
         std::array<double, 3> rgb) {
        return array_from_weights(
            rim_preset(rig, cone_half_angle, {rgb[0], rgb[1], rgb[2]}));
      },
      py::arg("rig"), py::arg("cone_half_angle"),
      py::arg("intensity") = std::array<double, 3>{1.0, 1.0, 1.0});

  m.def(
      "relight",
      [](const FloatArray& images, const DoubleArray& weights) {
        return array_from_image(
            relight(set_from_array(images), weights_from_array(weights)));
      },
      py::arg("images"), py::arg("weights"),
      "Weighted superposition of an (N, H, W, 3) OLAT stack.");

  m.def(
      "composite",
      [](const FloatArray& fg, const FloatArray& alpha, const FloatArray& bg) {
        return array_from_image(composite(image_from_array(fg, "fg"),
                                          matte_from_array(alpha),
                                          image_from_array(bg, "bg")));
      },
      py::arg("fg"), py::arg("alpha"), py::arg("bg"));

  m.def(
      "compute_flow",
      [](const FloatArray& src, const FloatArray& dst, int levels,
         int iterations, int window_radius) {
        FlowParams params;
        params.pyramid_levels = levels;
        params.iterations_per_level = iterations;
        params.window_radius = window_radius;
        const FlowField flow = compute_flow(image_from_array(src, "src"),
                                            image_from_array(dst, "dst"),
                                            params);
        py::array_t<float> arr({flow.height, flow.width, 2});
        std::memcpy(arr.mutable_data(), flow.data.data(),
                    flow.data.size() * sizeof(float));
        return arr;
      },
      py::arg("src"), py::arg("dst"), py::arg("levels") = 4,
      py::arg("iterations") = 4, py::arg("window_radius") = 7,
      "Dense backward flow from dst to src: dst(p) ~ src(p + flow(p)).");

  m.def(
      "warp",
      [](const FloatArray& image, const FloatArray& flow) {
        if (flow.ndim() != 3 || flow.shape(2) != 2)
          throw ValidationError("flow: expected an (H, W, 2) array");
        FlowField field(static_cast<int>(flow.shape(1)),
                        static_cast<int>(flow.shape(0)));
        std::memcpy(field.data.data(), flow.data(),
                    field.data.size() * sizeof(float));
        validate_flow(field);
        return array_from_image(warp(image_from_array(image, "image"), field));
      },
      py::arg("image"), py::arg("flow"));

  m.def(
      "demosaic",
      [](const py::array_t<std::uint8_t,
                           py::array::c_style | py::array::forcecast>& mosaic,
         const std::string& pattern) {
        if (mosaic.ndim() != 2)
          throw ValidationError("mosaic: expected an (H, W) uint8 array");
        BayerFrame frame;
        frame.width = static_cast<int>(mosaic.shape(1));
        frame.height = static_cast<int>(mosaic.shape(0));
        frame.pattern = bayer_pattern_from_string(pattern);
        frame.data.assign(mosaic.data(), mosaic.data() + mosaic.size());
        return array_from_image(demosaic(frame));
      },
      py::arg("mosaic"), py::arg("pattern") = "rggb");

  // Metrics.
  m.def(
      "psnr",
      [](const FloatArray& a, const FloatArray& b, double peak) {
        return psnr(image_from_array(a, "a"), image_from_array(b, "b"), peak);
      },
      py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);
  m.def(
      "mae",
      [](const FloatArray& a, const FloatArray& b) {
        return mae(image_from_array(a, "a"), image_from_array(b, "b"));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "mse",
      [](const FloatArray& a, const FloatArray& b) {
        return mse(image_from_array(a, "a"), image_from_array(b, "b"));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "ssim",
      [](const FloatArray& a, const FloatArray& b) {
        return ssim(image_from_array(a, "a"), image_from_array(b, "b"));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "ms_ssim",
      [](const FloatArray& a, const FloatArray& b) {
        return ms_ssim(image_from_array(a, "a"), image_from_array(b, "b"));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "normal_angular_error",
      [](const FloatArray& a, const FloatArray& b) {
        return normal_angular_error(image_from_array(a, "a"),
                                    image_from_array(b, "b"));
      },
      py::arg("n_pred"), py::arg("n_gt"));
  m.def(
      "photometric_loss",
      [](const FloatArray& pred, const FloatArray& gt) {
        const PhotometricLoss loss =
            photometric_loss(set_from_array(pred), set_from_array(gt));
        return py::make_tuple(loss.mse, loss.ms_ssim_term, loss.total());
      },
      py::arg("pred"), py::arg("gt"),
      "Returns (mse, 1 - mean ms_ssim, total) over two OLAT stacks.");

  // Parameter normalization.
  m.def(
      "estimate_stats",
      [](const DoubleArray& stream) {
        const StreamStats stats =
            estimate_stats(stream_from_array(stream, "pose"));
        return py::make_tuple(vector_to_array(stats.mean),
                              vector_to_array(stats.std_dev));
      },
      py::arg("stream"),
      "Per-dimension population mean and (floored) standard deviation.");
  m.def(
      "normalize_stream",
      [](const DoubleArray& stream, const DoubleArray& src_mean,
         const DoubleArray& src_std, const DoubleArray& tgt_mean,
         const DoubleArray& tgt_std) {
        return array_from_stream(normalize_stream(
            stream_from_array(stream, "pose"),
            stats_from_arrays(src_mean, src_std),
            stats_from_arrays(tgt_mean, tgt_std)));
      },
      py::arg("stream"), py::arg("src_mean"), py::arg("src_std"),
      py::arg("tgt_mean"), py::arg("tgt_std"));
  m.def(
      "mean_param",
      [](const DoubleArray& stream) {
        return vector_to_array(mean_param(stream_from_array(stream, "pose")));
      },
      py::arg("stream"));

  // Synthetic oracle scene.
  py::class_<SyntheticScene>(m, "SyntheticScene")
      .def_readwrite("sphere_cx", &SyntheticScene::sphere_cx)
      .def_readwrite("sphere_cy", &SyntheticScene::sphere_cy)
      .def_readwrite("sphere_radius", &SyntheticScene::sphere_radius)
      .def_readwrite("ambient", &SyntheticScene::ambient)
      .def_property_readonly("width", [](const SyntheticScene& s) {
        return s.width;
      })
      .def_property_readonly("height", [](const SyntheticScene& s) {
        return s.height;
      });

  m.def("default_scene", &make_default_scene, py::arg("width"),
        py::arg("height"), py::arg("seed") = 7);
  m.def(
      "render_olat",
      [](const SyntheticScene& scene, const LightRig& rig) {
        const OlatRender render = render_olat(scene, rig);
        py::array_t<float> stack({static_cast<py::ssize_t>(rig.led_count()),
                                  static_cast<py::ssize_t>(scene.height),
                                  static_cast<py::ssize_t>(scene.width),
                                  static_cast<py::ssize_t>(3)});
        const std::size_t frame_values = render.set.images[0].value_count();
        for (int i = 0; i < rig.led_count(); ++i)
          std::memcpy(stack.mutable_data() + i * frame_values,
                      render.set.images[i].values().data(),
                      frame_values * sizeof(float));
        return py::make_tuple(stack, array_from_image(render.normals),
                              array_from_image(render.albedo));
      },
      py::arg("scene"), py::arg("rig"),
      "Returns (olat_stack, normals, albedo) for the scene under the rig.");
  m.def(
      "render_env_direct",
      [](const SyntheticScene& scene, const FloatArray& env, double rotation) {
        EnvironmentMap map;
        map.pixels = image_from_array(env, "env");
        map.rotation = rotation;
        return array_from_image(render_env_direct(scene, map));
      },
      py::arg("scene"), py::arg("env"), py::arg("rotation") = 0.0);
  m.def(
      "smooth_env",
      [](int width, int height, unsigned seed) {
        return array_from_image(make_smooth_env(width, height, seed).pixels);
      },
      py::arg("width"), py::arg("height"), py::arg("seed") = 7);

  // File I/O.
  m.def(
      "read_pfm",
      [](const std::string& path) {
        return array_from_image(read_pfm(path));
      },
      py::arg("path"));
  m.def(
      "write_pfm",
      [](const std::string& path, const FloatArray& image) {
        write_pfm(path, image_from_array(image, "image"));
      },
      py::arg("path"), py::arg("image"));
  m.def(
      "write_png",
      [](const std::string& path, const FloatArray& image, int depth) {
        write_png(path, image_from_array(image, "image"),
                  depth == 16 ? ImageEncoding::kPng16 : ImageEncoding::kPng8);
      },
      py::arg("path"), py::arg("image"), py::arg("depth") = 8);
  m.def(
      "read_image",
      [](const std::string& path) {
        return array_from_image(read_image(path));
      },
      py::arg("path"));
}
