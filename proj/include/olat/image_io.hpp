// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "olat/image.hpp"

namespace olat {

/// Counters surfaced by the readers. Negative samples are clamped to zero on
/// ingest rather than rejected; callers that care inspect the count.
struct ReadStats {
  std::int64_t clamped_negative = 0;
};

enum class ImageEncoding {
  kPfm,    // 32-bit float map, lossless
  kPng8,   // 8-bit PNG, gamma 2.2
  kPng16,  // 16-bit PNG, gamma 2.2
};

// Portable float map. Header "PF\n<w> <h>\n-1.0\n", little-endian float32
// scanlines stored bottom-to-top. write_pfm / read_pfm round-trip bitwise
// for finite nonnegative images. Grayscale "Pf" files are accepted on read
// (replicated across channels) and used for mattes.
void write_pfm(const std::string& path, const RadianceImage& img);
RadianceImage read_pfm(const std::string& path, ReadStats* stats = nullptr);

void write_pfm_gray(const std::string& path, const AlphaMatte& matte);

// LDR previews. Linear radiance is gamma-2.2 encoded and clamped to [0,1]
// on write; reads invert the transfer back to linear.
void write_png(const std::string& path, const RadianceImage& img,
               ImageEncoding depth);
RadianceImage read_png(const std::string& path);

/// Dispatches on extension: .pfm is lossless float, .png is gamma-encoded
/// LDR. Throws IoError for anything else.
RadianceImage read_image(const std::string& path, ReadStats* stats = nullptr);
void write_image(const std::string& path, const RadianceImage& img,
                 ImageEncoding encoding);

/// Mattes are stored linearly (no gamma): grayscale PFM ("Pf") or PNG where
/// the integer code maps straight to coverage. Values clamp into [0,1].
AlphaMatte read_alpha(const std::string& path);
void write_alpha(const std::string& path, const AlphaMatte& matte);

/// 8-bit binary PGM (P5) sensor dump; the caller names the mosaic layout.
BayerFrame read_pgm_bayer(const std::string& path, BayerPattern pattern);
void write_pgm(const std::string& path, const BayerFrame& frame);

/// Writes `contents` to `path` via a temporary file in the same directory
/// followed by a rename, so readers never observe partial output.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace olat
