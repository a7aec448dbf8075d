// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "olat/image.hpp"
#include "olat/relight.hpp"

namespace olat {

/// 10*log10(peak^2 / MSE) in dB. Identical images return +infinity. The
/// peak convention is the caller's; PSNR is the one metric here that is not
/// symmetric under swapping a/b conventions for peak.
double psnr(const RadianceImage& a, const RadianceImage& b, double peak);

/// Mean absolute error over all pixels and channels.
double mae(const RadianceImage& a, const RadianceImage& b);

/// Mean squared error over all pixels and channels.
double mse(const RadianceImage& a, const RadianceImage& b);

// Structural similarity with the standard parameters: 11x11 Gaussian window
// (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1.0 for linear [0,1]
// images, statistics over the valid (un-padded) window positions, averaged
// over the three channels.

/// Single-scale SSIM.
double ssim(const RadianceImage& a, const RadianceImage& b);

/// Multi-scale SSIM over five dyadic scales with the published exponents
/// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333); the coarsest scale uses the
/// full luminance-contrast-structure index, finer scales the
/// contrast-structure term only. Images whose smaller side is under 176 px
/// cannot support five scales; the scale count is reduced, the exponents
/// renormalized, and a note written to *warning when given.
double ms_ssim(const RadianceImage& a, const RadianceImage& b,
               std::string* warning = nullptr);

/// Scale count usable for a given smaller-side length (1..5).
int ms_ssim_supported_scales(int min_side);

struct PhotometricLoss {
  double mse = 0.0;          // mean over images of per-image MSE
  double ms_ssim_term = 0.0; // 1 - mean over images of MS-SSIM
  double total() const { return mse + ms_ssim_term; }
};

/// Reflectance-field reproduction error: per-image MSE averaged over the
/// set plus the dissimilarity form of MS-SSIM averaged the same way. Both
/// terms are reported separately and summed unweighted.
PhotometricLoss photometric_loss(const OlatSet& pred, const OlatSet& gt);

/// Mean per-pixel cosine distance 1 - dot(n_pred, n_gt) between two normal
/// maps. Vectors are renormalized; pixels where either map is zero-length
/// are masked out. Throws if every pixel is masked.
double normal_angular_error(const RadianceImage& n_pred,
                            const RadianceImage& n_gt);

struct FrameMetrics {
  std::string name;
  double psnr = 0.0;
  double ssim = 0.0;
  double ms_ssim = 0.0;
  double mae = 0.0;
};

/// Aggregate report over a frame sequence: per-frame values plus mean and
/// standard deviation per metric.
struct MetricReport {
  std::vector<FrameMetrics> frames;

  double mean_psnr = 0.0, std_psnr = 0.0;
  double mean_ssim = 0.0, std_ssim = 0.0;
  double mean_ms_ssim = 0.0, std_ms_ssim = 0.0;
  double mean_mae = 0.0, std_mae = 0.0;
};

/// Compares paired frames (same order, same shapes) with PSNR peak 1.0.
MetricReport compare_frames(const std::vector<RadianceImage>& a,
                            const std::vector<RadianceImage>& b,
                            const std::vector<std::string>& names);

/// Renders the report as text, one `metric mean+-std` line per metric plus
/// the per-frame breakdown.
std::string format_report(const MetricReport& report);

}  // namespace olat
