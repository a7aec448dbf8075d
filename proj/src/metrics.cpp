// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace olat {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;  // (K2 * L)^2
constexpr double kMsWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

Plane extract_channel(const RadianceImage& img, int c) {
  Plane p{img.width(), img.height(), {}};
  p.data.resize(img.pixel_count());
  const float* src = img.values().data();
  for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = src[i * 3 + c];
  return p;
}

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kWindow);
  const int r = kWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - r;
    k[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable valid-mode convolution: output is (w-10) x (h-10).
Plane conv_valid(const Plane& p, const std::vector<double>& k) {
  const int ow = p.width - kWindow + 1;
  const int oh = p.height - kWindow + 1;
  Plane horiz{ow, p.height, std::vector<double>(
                                static_cast<std::size_t>(ow) * p.height)};
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * p.at(x + i, y);
      horiz.data[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  Plane out{ow, oh,
            std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * horiz.at(x, y + i);
      out.data[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

Plane multiply(const Plane& a, const Plane& b) {
  Plane out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

// 2x2 block average with odd tails truncated.
Plane downsample2(const Plane& p) {
  const int ow = p.width / 2;
  const int oh = p.height / 2;
  Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      out.data[static_cast<std::size_t>(y) * ow + x] =
          0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) +
                  p.at(2 * x, 2 * y + 1) + p.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

struct SsimMeans {
  double ssim = 0.0;  // luminance * contrast-structure
  double cs = 0.0;    // contrast-structure only
};

SsimMeans ssim_pass(const Plane& x, const Plane& y) {
  static const std::vector<double> kernel = gaussian_kernel();
  const Plane mu_x = conv_valid(x, kernel);
  const Plane mu_y = conv_valid(y, kernel);
  const Plane xx = conv_valid(multiply(x, x), kernel);
  const Plane yy = conv_valid(multiply(y, y), kernel);
  const Plane xy = conv_valid(multiply(x, y), kernel);

  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  const std::size_t n = mu_x.data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = mu_x.data[i];
    const double my = mu_y.data[i];
    const double var_x = xx.data[i] - mx * mx;
    const double var_y = yy.data[i] - my * my;
    const double cov = xy.data[i] - mx * my;
    const double l = (2.0 * mx * my + kC1) / (mx * mx + my * my + kC1);
    const double cs = (2.0 * cov + kC2) / (var_x + var_y + kC2);
    ssim_sum += l * cs;
    cs_sum += cs;
  }
  return {ssim_sum / static_cast<double>(n), cs_sum / static_cast<double>(n)};
}

void require_same_shape(const RadianceImage& a, const RadianceImage& b,
                        const char* what) {
  if (!a.same_shape(b) || a.empty())
    throw ValidationError(std::string(what) + ": dimension mismatch");
}

double population_std(const std::vector<double>& xs, double mean) {
  if (xs.empty() || !std::isfinite(mean)) return 0.0;  // inf PSNR frames
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

double mse(const RadianceImage& a, const RadianceImage& b) {
  require_same_shape(a, b, "mse");
  const float* pa = a.values().data();
  const float* pb = b.values().data();
  double acc = 0.0;
  const std::size_t n = a.value_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(pa[i]) - pb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(n);
}

double psnr(const RadianceImage& a, const RadianceImage& b, double peak) {
  if (!(peak > 0.0)) throw ValidationError("psnr: peak must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

double mae(const RadianceImage& a, const RadianceImage& b) {
  require_same_shape(a, b, "mae");
  const float* pa = a.values().data();
  const float* pb = b.values().data();
  double acc = 0.0;
  const std::size_t n = a.value_count();
  for (std::size_t i = 0; i < n; ++i)
    acc += std::abs(static_cast<double>(pa[i]) - pb[i]);
  return acc / static_cast<double>(n);
}

double ssim(const RadianceImage& a, const RadianceImage& b) {
  require_same_shape(a, b, "ssim");
  if (std::min(a.width(), a.height()) < kWindow)
    throw ValidationError("ssim: image smaller than the 11x11 window");
  double acc = 0.0;
  for (int c = 0; c < 3; ++c)
    acc += ssim_pass(extract_channel(a, c), extract_channel(b, c)).ssim;
  return acc / 3.0;
}

int ms_ssim_supported_scales(int min_side) {
  int scales = 0;
  while (scales < 5 && min_side >= kWindow) {
    ++scales;
    min_side /= 2;
  }
  return scales;
}

double ms_ssim(const RadianceImage& a, const RadianceImage& b,
               std::string* warning) {
  require_same_shape(a, b, "ms_ssim");
  const int scales = ms_ssim_supported_scales(std::min(a.width(), a.height()));
  if (scales == 0)
    throw ValidationError("ms_ssim: image smaller than the 11x11 window");
  if (scales < 5 && warning) {
    *warning = "ms_ssim: smaller side " +
               std::to_string(std::min(a.width(), a.height())) +
               " px supports only " + std::to_string(scales) +
               " of 5 scales; exponents renormalized";
  }

  // The published exponents apply verbatim at five scales (their sum is
  // 1.0001, which is part of the constants); reduced scale counts
  // renormalize the leading exponents instead.
  double weights[5];
  for (int s = 0; s < scales; ++s) weights[s] = kMsWeights[s];
  if (scales < 5) {
    double wsum = 0.0;
    for (int s = 0; s < scales; ++s) wsum += kMsWeights[s];
    for (int s = 0; s < scales; ++s) weights[s] /= wsum;
  }

  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    Plane x = extract_channel(a, c);
    Plane y = extract_channel(b, c);
    double value = 1.0;
    for (int s = 0; s < scales; ++s) {
      if (s > 0) {
        x = downsample2(x);
        y = downsample2(y);
      }
      const SsimMeans m = ssim_pass(x, y);
      // Coarsest scale carries the luminance term; anticorrelated windows
      // can drive the means negative, which the exponent form cannot
      // represent, so they clamp to zero.
      const double term =
          std::max(s == scales - 1 ? m.ssim : m.cs, 0.0);
      value *= std::pow(term, weights[s]);
    }
    acc += value;
  }
  return acc / 3.0;
}

PhotometricLoss photometric_loss(const OlatSet& pred, const OlatSet& gt) {
  if (pred.led_count() != gt.led_count() || pred.led_count() == 0)
    throw ValidationError("photometric_loss: set size mismatch");
  PhotometricLoss loss;
  double ms_acc = 0.0;
  for (int i = 0; i < pred.led_count(); ++i) {
    require_same_shape(pred.images[i], gt.images[i], "photometric_loss");
    loss.mse += mse(pred.images[i], gt.images[i]);
    ms_acc += ms_ssim(pred.images[i], gt.images[i]);
  }
  const double n = pred.led_count();
  loss.mse /= n;
  loss.ms_ssim_term = 1.0 - ms_acc / n;
  return loss;
}

double normal_angular_error(const RadianceImage& n_pred,
                            const RadianceImage& n_gt) {
  require_same_shape(n_pred, n_gt, "normal_angular_error");
  const float* pa = n_pred.values().data();
  const float* pb = n_gt.values().data();
  double acc = 0.0;
  std::size_t valid = 0;
  const std::size_t n = n_pred.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = pa[i * 3], ay = pa[i * 3 + 1], az = pa[i * 3 + 2];
    const double bx = pb[i * 3], by = pb[i * 3 + 1], bz = pb[i * 3 + 2];
    const double na = std::sqrt(ax * ax + ay * ay + az * az);
    const double nb = std::sqrt(bx * bx + by * by + bz * bz);
    if (na < 1e-12 || nb < 1e-12) continue;  // masked
    // Rounding can push the cosine a hair past 1; the distance is >= 0.
    acc += std::max(0.0, 1.0 - (ax * bx + ay * by + az * bz) / (na * nb));
    ++valid;
  }
  if (valid == 0)
    throw ValidationError("normal_angular_error: all pixels masked");
  return acc / static_cast<double>(valid);
}

MetricReport compare_frames(const std::vector<RadianceImage>& a,
                            const std::vector<RadianceImage>& b,
                            const std::vector<std::string>& names) {
  if (a.size() != b.size() || a.empty())
    throw ValidationError("compare_frames: sequence length mismatch");

  MetricReport report;
  std::vector<double> psnrs, ssims, ms_ssims, maes;
  for (std::size_t i = 0; i < a.size(); ++i) {
    FrameMetrics fm;
    fm.name = i < names.size() ? names[i] : "frame_" + std::to_string(i);
    fm.psnr = psnr(a[i], b[i], 1.0);
    fm.ssim = ssim(a[i], b[i]);
    fm.ms_ssim = ms_ssim(a[i], b[i]);
    fm.mae = mae(a[i], b[i]);
    psnrs.push_back(fm.psnr);
    ssims.push_back(fm.ssim);
    ms_ssims.push_back(fm.ms_ssim);
    maes.push_back(fm.mae);
    report.frames.push_back(std::move(fm));
  }
  auto mean_of = [](const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
  };
  report.mean_psnr = mean_of(psnrs);
  report.std_psnr = population_std(psnrs, report.mean_psnr);
  report.mean_ssim = mean_of(ssims);
  report.std_ssim = population_std(ssims, report.mean_ssim);
  report.mean_ms_ssim = mean_of(ms_ssims);
  report.std_ms_ssim = population_std(ms_ssims, report.mean_ms_ssim);
  report.mean_mae = mean_of(maes);
  report.std_mae = population_std(maes, report.mean_mae);
  return report;
}

std::string format_report(const MetricReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "frames " << report.frames.size() << "\n";
  out << "PSNR(dB)  " << report.mean_psnr << " +- " << report.std_psnr << "\n";
  out << "SSIM      " << report.mean_ssim << " +- " << report.std_ssim << "\n";
  out << "MS-SSIM   " << report.mean_ms_ssim << " +- " << report.std_ms_ssim
      << "\n";
  out << "MAE       " << report.mean_mae << " +- " << report.std_mae << "\n";
  out << "\nper-frame PSNR SSIM MS-SSIM MAE\n";
  for (const FrameMetrics& fm : report.frames) {
    out << fm.name << " " << fm.psnr << " " << fm.ssim << " " << fm.ms_ssim
        << " " << fm.mae << "\n";
  }
  return out.str();
}

}  // namespace olat
