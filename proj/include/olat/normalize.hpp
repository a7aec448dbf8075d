// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace olat {

/// Time series of D-dimensional model parameters (head pose or expression
/// coefficients, unitless).
struct ParamStream {
  std::vector<std::vector<double>> vectors;
  int dim = 0;
  std::string tag;  // "pose" or "expression"

  std::size_t size() const { return vectors.size(); }
};

void validate_param_stream(const ParamStream& stream);

/// Per-dimension first and second moments of a stream. Standard deviations
/// are population (divide by N) and floored at kStdFloor, so zero-variance
/// dimensions still map through the normalization formula.
struct StreamStats {
  std::vector<double> mean;
  std::vector<double> std_dev;
  std::size_t count = 0;

  static constexpr double kStdFloor = 1e-6;
  int dim() const { return static_cast<int>(mean.size()); }
};

StreamStats estimate_stats(const ParamStream& stream);

/// Distribution transfer: x_hat = (sigma_t / sigma_s) * (x - mu_s) + mu_t,
/// element-wise per dimension. Matching source/target stats is the identity
/// and swapping them inverts the transform.
ParamStream normalize_stream(const ParamStream& src,
                             const StreamStats& src_stats,
                             const StreamStats& tgt_stats);

/// Arithmetic mean vector of the stream.
std::vector<double> mean_param(const ParamStream& stream);

// Text format: header `dim <D> tag <pose|expression>`, one frame per line of
// whitespace-separated decimals.
ParamStream load_param_stream(const std::string& path);
void save_param_stream(const std::string& path, const ParamStream& stream);

/// Stats block as text: `count`, `mean`, and `std` lines.
std::string format_stats(const StreamStats& stats);

}  // namespace olat
