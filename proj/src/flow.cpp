// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/flow.hpp"

#include <algorithm>
#include <cmath>

#include "olat/parallel.hpp"

namespace olat {

namespace {

constexpr int kMinLevelSize = 12;

struct Gray {
  int w = 0;
  int h = 0;
  std::vector<float> v;

  float at(int x, int y) const {
    return v[static_cast<std::size_t>(y) * w + x];
  }
  float& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
};

float gsample(const Gray& g, float x, float y) {
  x = std::clamp(x, 0.0f, static_cast<float>(g.w - 1));
  y = std::clamp(y, 0.0f, static_cast<float>(g.h - 1));
  const int x0 = std::min(static_cast<int>(x), g.w - 1);
  const int y0 = std::min(static_cast<int>(y), g.h - 1);
  const int x1 = std::min(x0 + 1, g.w - 1);
  const int y1 = std::min(y0 + 1, g.h - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);
  const float top = g.at(x0, y0) * (1.0f - fx) + g.at(x1, y0) * fx;
  const float bot = g.at(x0, y1) * (1.0f - fx) + g.at(x1, y1) * fx;
  return top * (1.0f - fy) + bot * fy;
}

// Binomial 5-tap blur then 2:1 decimation.
Gray downsample(const Gray& src) {
  static constexpr float k[5] = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16,
                                 1.0f / 16};
  Gray blur_h{src.w, src.h, std::vector<float>(src.v.size())};
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.0f;
      for (int i = -2; i <= 2; ++i)
        acc += k[i + 2] * src.at(std::clamp(x + i, 0, src.w - 1), y);
      blur_h.at(x, y) = acc;
    }
  }
  Gray blur{src.w, src.h, std::vector<float>(src.v.size())};
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.0f;
      for (int i = -2; i <= 2; ++i)
        acc += k[i + 2] * blur_h.at(x, std::clamp(y + i, 0, src.h - 1));
      blur.at(x, y) = acc;
    }
  }
  Gray out{(src.w + 1) / 2, (src.h + 1) / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.w) * out.h);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) out.at(x, y) = blur.at(2 * x, 2 * y);
  return out;
}

// Integral image over doubles; mean over the clipped window around (x, y).
struct BoxMean {
  int w, h, radius;
  std::vector<double> integral;  // (w+1) x (h+1)

  BoxMean(const std::vector<float>& values, int width, int height, int r)
      : w(width), h(height), radius(r),
        integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0) {
    for (int y = 0; y < h; ++y) {
      double row_sum = 0.0;
      for (int x = 0; x < w; ++x) {
        row_sum += values[static_cast<std::size_t>(y) * w + x];
        integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
            integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row_sum;
      }
    }
  }

  double mean(int x, int y) const {
    const int x0 = std::max(0, x - radius);
    const int y0 = std::max(0, y - radius);
    const int x1 = std::min(w - 1, x + radius);
    const int y1 = std::min(h - 1, y + radius);
    const auto idx = [&](int xx, int yy) {
      return integral[static_cast<std::size_t>(yy) * (w + 1) + xx];
    };
    const double sum =
        idx(x1 + 1, y1 + 1) - idx(x0, y1 + 1) - idx(x1 + 1, y0) + idx(x0, y0);
    return sum / ((x1 - x0 + 1) * (y1 - y0 + 1));
  }
};

FlowField resize_flow(const FlowField& flow, int w, int h) {
  FlowField out(w, h);
  const double fx = static_cast<double>(flow.width) / w;
  const double fy = static_cast<double>(flow.height) / h;
  const double su = static_cast<double>(w) / flow.width;
  const double sv = static_cast<double>(h) / flow.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float sxp = static_cast<float>((x + 0.5) * fx - 0.5);
      const float syp = static_cast<float>((y + 0.5) * fy - 0.5);
      // Bilinear on each channel of the coarse field.
      const auto sample = [&](bool vert) {
        const float cx = std::clamp(sxp, 0.0f, static_cast<float>(flow.width - 1));
        const float cy = std::clamp(syp, 0.0f, static_cast<float>(flow.height - 1));
        const int x0 = std::min(static_cast<int>(cx), flow.width - 1);
        const int y0 = std::min(static_cast<int>(cy), flow.height - 1);
        const int x1 = std::min(x0 + 1, flow.width - 1);
        const int y1 = std::min(y0 + 1, flow.height - 1);
        const float gx = cx - x0;
        const float gy = cy - y0;
        auto val = [&](int xx, int yy) {
          return vert ? flow.v(xx, yy) : flow.u(xx, yy);
        };
        const float top = val(x0, y0) * (1 - gx) + val(x1, y0) * gx;
        const float bot = val(x0, y1) * (1 - gx) + val(x1, y1) * gx;
        return top * (1 - gy) + bot * gy;
      };
      out.u(x, y) = static_cast<float>(sample(false) * su);
      out.v(x, y) = static_cast<float>(sample(true) * sv);
    }
  }
  return out;
}

void box_smooth_flow(FlowField& flow, int radius) {
  if (radius <= 0) return;
  std::vector<float> u(static_cast<std::size_t>(flow.width) * flow.height);
  std::vector<float> v(u.size());
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      u[static_cast<std::size_t>(y) * flow.width + x] = flow.u(x, y);
      v[static_cast<std::size_t>(y) * flow.width + x] = flow.v(x, y);
    }
  }
  const BoxMean bu(u, flow.width, flow.height, radius);
  const BoxMean bv(v, flow.width, flow.height, radius);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      flow.u(x, y) = static_cast<float>(bu.mean(x, y));
      flow.v(x, y) = static_cast<float>(bv.mean(x, y));
    }
  }
}

int usable_levels(int w, int h, int requested) {
  int levels = 1;
  while (levels < requested) {
    w = (w + 1) / 2;
    h = (h + 1) / 2;
    if (std::min(w, h) < kMinLevelSize) break;
    ++levels;
  }
  return levels;
}

// One incremental least-squares pass at a single pyramid level.
void lk_iteration(const Gray& src, const Gray& dst, FlowField& flow,
                  const FlowParams& params, int threads) {
  const int w = dst.w;
  const int h = dst.h;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<float> warped(n), gx(n), gy(n), it(n);
  parallel_for(
      0, h,
      [&](int y) {
        for (int x = 0; x < w; ++x) {
          warped[static_cast<std::size_t>(y) * w + x] =
              gsample(src, x + flow.u(x, y), y + flow.v(x, y));
        }
      },
      threads);

  Gray wsrc{w, h, std::move(warped)};
  parallel_for(
      0, h,
      [&](int y) {
        const int ym = std::max(0, y - 1);
        const int yp = std::min(h - 1, y + 1);
        for (int x = 0; x < w; ++x) {
          const int xm = std::max(0, x - 1);
          const int xp = std::min(w - 1, x + 1);
          const float dxw = (wsrc.at(xp, y) - wsrc.at(xm, y)) / (xp - xm);
          const float dxd = (dst.at(xp, y) - dst.at(xm, y)) / (xp - xm);
          const float dyw = (wsrc.at(x, yp) - wsrc.at(x, ym)) / (yp - ym);
          const float dyd = (dst.at(x, yp) - dst.at(x, ym)) / (yp - ym);
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          gx[i] = 0.5f * (dxw + dxd);
          gy[i] = 0.5f * (dyw + dyd);
          it[i] = wsrc.at(x, y) - dst.at(x, y);
        }
      },
      threads);

  std::vector<float> gxx(n), gxy(n), gyy(n), gxt(n), gyt(n);
  for (std::size_t i = 0; i < n; ++i) {
    gxx[i] = gx[i] * gx[i];
    gxy[i] = gx[i] * gy[i];
    gyy[i] = gy[i] * gy[i];
    gxt[i] = gx[i] * it[i];
    gyt[i] = gy[i] * it[i];
  }
  const int r = params.window_radius;
  const BoxMean mxx(gxx, w, h, r), mxy(gxy, w, h, r), myy(gyy, w, h, r);
  const BoxMean mxt(gxt, w, h, r), myt(gyt, w, h, r);

  const float diag = std::hypot(static_cast<float>(w), static_cast<float>(h));
  parallel_for(
      0, h,
      [&](int y) {
        for (int x = 0; x < w; ++x) {
          const double a = mxx.mean(x, y);
          const double b = mxy.mean(x, y);
          const double c = myy.mean(x, y);
          // Smallest eigenvalue of the structure tensor gates textureless
          // windows; their flow keeps the coarse-level estimate.
          const double half_trace = 0.5 * (a + c);
          const double root =
              std::sqrt(0.25 * (a - c) * (a - c) + b * b);
          if (half_trace - root < params.min_eigenvalue) continue;

          const double bt = -mxt.mean(x, y);
          const double bu = -myt.mean(x, y);
          const double det = a * c - b * b;
          if (det <= 0.0) continue;
          double du = (c * bt - b * bu) / det;
          double dv = (a * bu - b * bt) / det;
          du = std::clamp(du, -1.5, 1.5);
          dv = std::clamp(dv, -1.5, 1.5);
          const float nu = flow.u(x, y) + static_cast<float>(du);
          const float nv = flow.v(x, y) + static_cast<float>(dv);
          flow.u(x, y) = std::clamp(nu, -diag, diag);
          flow.v(x, y) = std::clamp(nv, -diag, diag);
        }
      },
      threads);

  box_smooth_flow(flow, params.smooth_radius);
}

}  // namespace

void validate_flow(const FlowField& flow) {
  if (flow.width <= 0 || flow.height <= 0 ||
      flow.data.size() != static_cast<std::size_t>(flow.width) * flow.height * 2)
    throw ValidationError("flow field shape mismatch");
  const float diag =
      std::hypot(static_cast<float>(flow.width), static_cast<float>(flow.height));
  for (std::size_t i = 0; i < flow.data.size(); i += 2) {
    const float u = flow.data[i];
    const float v = flow.data[i + 1];
    if (!std::isfinite(u) || !std::isfinite(v))
      throw ValidationError("non-finite flow value");
    if (std::hypot(u, v) > diag)
      throw ValidationError("flow magnitude exceeds the image diagonal");
  }
}

FlowField compute_flow(const RadianceImage& src, const RadianceImage& dst,
                       const FlowParams& params, int threads) {
  if (!src.same_shape(dst) || src.empty())
    throw ValidationError("compute_flow: dimension mismatch");
  if (std::min(src.width(), src.height()) < kMinLevelSize)
    throw ValidationError(
        "compute_flow: image smaller than the coarsest pyramid level");
  if (params.pyramid_levels < 1 || params.iterations_per_level < 1 ||
      params.window_radius < 1)
    throw ValidationError("compute_flow: bad parameters");

  // Luma pyramids, level 0 at full resolution.
  const int levels =
      usable_levels(src.width(), src.height(), params.pyramid_levels);
  std::vector<Gray> src_pyr(levels), dst_pyr(levels);
  src_pyr[0] = Gray{src.width(), src.height(), to_luminance(src)};
  dst_pyr[0] = Gray{dst.width(), dst.height(), to_luminance(dst)};
  for (int l = 1; l < levels; ++l) {
    src_pyr[l] = downsample(src_pyr[l - 1]);
    dst_pyr[l] = downsample(dst_pyr[l - 1]);
  }

  FlowField flow(src_pyr[levels - 1].w, src_pyr[levels - 1].h);
  for (int l = levels - 1; l >= 0; --l) {
    if (l != levels - 1) flow = resize_flow(flow, src_pyr[l].w, src_pyr[l].h);
    for (int i = 0; i < params.iterations_per_level; ++i)
      lk_iteration(src_pyr[l], dst_pyr[l], flow, params, threads);
  }
  return flow;
}

RadianceImage warp(const RadianceImage& image, const FlowField& flow,
                   int threads) {
  if (image.width() != flow.width || image.height() != flow.height)
    throw ValidationError("warp: dimension mismatch");

  RadianceImage out(image.width(), image.height());
  parallel_for(
      0, image.height(),
      [&](int y) {
        for (int x = 0; x < image.width(); ++x) {
          const float sx = x + flow.u(x, y);
          const float sy = y + flow.v(x, y);
          for (int c = 0; c < 3; ++c)
            out.at(x, y, c) = sample_bilinear(image, sx, sy, c);
        }
      },
      threads);
  return out;
}

FlowField compose_flow(const FlowField& outer, const FlowField& inner) {
  if (outer.width != inner.width || outer.height != inner.height)
    throw ValidationError("compose_flow: dimension mismatch");

  FlowField out(outer.width, outer.height);
  auto sample_channel = [&](const FlowField& f, float x, float y, bool vert) {
    x = std::clamp(x, 0.0f, static_cast<float>(f.width - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(f.height - 1));
    const int x0 = std::min(static_cast<int>(x), f.width - 1);
    const int y0 = std::min(static_cast<int>(y), f.height - 1);
    const int x1 = std::min(x0 + 1, f.width - 1);
    const int y1 = std::min(y0 + 1, f.height - 1);
    const float fx = x - x0;
    const float fy = y - y0;
    auto val = [&](int xx, int yy) {
      return vert ? f.v(xx, yy) : f.u(xx, yy);
    };
    const float top = val(x0, y0) * (1 - fx) + val(x1, y0) * fx;
    const float bot = val(x0, y1) * (1 - fx) + val(x1, y1) * fx;
    return top * (1 - fy) + bot * fy;
  };

  for (int y = 0; y < outer.height; ++y) {
    for (int x = 0; x < outer.width; ++x) {
      const float ox = outer.u(x, y);
      const float oy = outer.v(x, y);
      out.u(x, y) = ox + sample_channel(inner, x + ox, y + oy, false);
      out.v(x, y) = oy + sample_channel(inner, x + ox, y + oy, true);
    }
  }
  return out;
}

FlowField lerp_flow(const FlowField& a, const FlowField& b, double t) {
  if (a.width != b.width || a.height != b.height)
    throw ValidationError("lerp_flow: dimension mismatch");
  FlowField out(a.width, a.height);
  const float tf = static_cast<float>(t);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = (1.0f - tf) * a.data[i] + tf * b.data[i];
  return out;
}

}  // namespace olat
