// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/image_io.hpp"

#include <png.h>

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace olat {

namespace {

constexpr double kGamma = 2.2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failed: " + path);
  return std::move(buf).str();
}

std::string lower_extension(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void check_dimensions(long w, long h) {
  if (w < 1 || h < 1) throw IoError("non-positive image dimensions");
  if (w > 1 << 20 || h > 1 << 20 || w * h > (1L << 31) / 16)
    throw IoError("image dimensions overflow");
}

// ---------------------------------------------------------------------------
// PFM

struct PfmHeader {
  bool gray = false;
  int width = 0;
  int height = 0;
  bool little_endian = true;
  std::size_t data_offset = 0;
};

PfmHeader parse_pfm_header(const std::string& buf, const std::string& path) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos])))
      ++pos;
    const std::size_t start = pos;
    while (pos < buf.size() &&
           !std::isspace(static_cast<unsigned char>(buf[pos])))
      ++pos;
    if (start == pos) throw IoError("truncated PFM header: " + path);
    return buf.substr(start, pos - start);
  };

  PfmHeader h;
  const std::string magic = next_token();
  if (magic == "PF")
    h.gray = false;
  else if (magic == "Pf")
    h.gray = true;
  else
    throw IoError("not a PFM file: " + path);

  long w = 0, hgt = 0;
  double scale = 0.0;
  try {
    w = std::stol(next_token());
    hgt = std::stol(next_token());
    scale = std::stod(next_token());
  } catch (const std::exception&) {
    throw IoError("malformed PFM header: " + path);
  }
  check_dimensions(w, hgt);
  if (scale == 0.0) throw IoError("PFM scale must be nonzero: " + path);
  h.width = static_cast<int>(w);
  h.height = static_cast<int>(hgt);
  h.little_endian = scale < 0.0;
  if (pos >= buf.size()) throw IoError("truncated PFM header: " + path);
  h.data_offset = pos + 1;  // exactly one whitespace byte after the scale
  return h;
}

float clamp_ingest(float v, const std::string& path, ReadStats* stats) {
  if (!std::isfinite(v)) throw IoError("non-finite value in " + path);
  if (v < 0.0f) {
    if (stats) ++stats->clamped_negative;
    return 0.0f;
  }
  return v;
}

// ---------------------------------------------------------------------------
// PNG

struct PngCodes {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb)
  int max_code = 255;
  std::vector<std::uint16_t> codes;  // interleaved
};

void png_error_to_longjmp(png_structp png, png_const_charp) {
  longjmp(png_jmpbuf(png), 1);
}
void png_warning_ignore(png_structp, png_const_charp) {}

PngCodes decode_png_codes(const std::string& buf, const std::string& path) {
  if (buf.size() < 8 ||
      png_sig_cmp(reinterpret_cast<png_const_bytep>(buf.data()), 0, 8) != 0)
    throw IoError("not a PNG file: " + path);

  struct Cursor {
    const char* data;
    std::size_t size;
    std::size_t pos;
  } cursor{buf.data(), buf.size(), 0};

  PngCodes out;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  bool truncated = false;

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_to_longjmp,
                                           png_warning_ignore);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(truncated ? "truncated PNG file: " + path
                            : "PNG decode failed: " + path);
  }

  png_set_read_fn(png, &cursor, [](png_structp p, png_bytep dst,
                                   png_size_t n) {
    auto* c = static_cast<Cursor*>(png_get_io_ptr(p));
    if (c->pos + n > c->size) png_error(p, "eof");
    std::memcpy(dst, c->data + c->pos, n);
    c->pos += n;
  });
  truncated = true;  // any libpng failure past this point is likely EOF

  png_read_info(png, info);
  png_uint_32 w = 0, h = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr,
               nullptr);
  check_dimensions(w, h);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // host is little-endian
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.channels = channels;
  out.max_code = bit_depth == 16 ? 65535 : 255;
  out.codes.resize(static_cast<std::size_t>(w) * h * channels);
  if (bit_depth == 16) {
    const auto* src = reinterpret_cast<const std::uint16_t*>(pixels.data());
    std::copy(src, src + out.codes.size(), out.codes.begin());
  } else {
    for (std::size_t i = 0; i < out.codes.size(); ++i)
      out.codes[i] = pixels[i];
  }
  return out;
}

std::string encode_png(const RadianceImage& img, bool sixteen) {
  const int w = img.width();
  const int h = img.height();
  const int bytes_per_value = sixteen ? 2 : 1;
  const std::size_t stride =
      static_cast<std::size_t>(w) * 3 * bytes_per_value;

  // Gamma 2.2 encode into integer codes (little-endian in memory; libpng
  // swaps 16-bit values on write).
  std::vector<png_byte> pixels(stride * h);
  const double max_code = sixteen ? 65535.0 : 255.0;
  for (int y = 0; y < h; ++y) {
    png_byte* row = pixels.data() + y * stride;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double lin = std::clamp<double>(img.at(x, y, c), 0.0, 1.0);
        const double enc = std::pow(lin, 1.0 / kGamma);
        const auto code =
            static_cast<std::uint32_t>(std::lround(enc * max_code));
        if (sixteen) {
          reinterpret_cast<std::uint16_t*>(row)[x * 3 + c] =
              static_cast<std::uint16_t>(code);
        } else {
          row[x * 3 + c] = static_cast<png_byte>(code);
        }
      }
    }
  }

  std::string out;
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = pixels.data() + y * stride;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_to_longjmp,
                                            png_warning_ignore);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        static_cast<std::string*>(png_get_io_ptr(p))
            ->append(reinterpret_cast<char*>(data), n);
      },
      nullptr);
  png_set_IHDR(png, info, w, h, sixteen ? 16 : 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (sixteen) png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void atomic_write_file(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path()))
    throw IoError("no such directory: " + target.parent_path().string());
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(contents.data(),
              static_cast<std::streamsize>(contents.size()));
    if (!out.good()) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed for " + path);
  }
}

void write_pfm(const std::string& path, const RadianceImage& img) {
  if (img.empty()) throw ValidationError("cannot write empty image");
  std::string buf;
  buf.reserve(64 + img.value_count() * sizeof(float));
  buf += "PF\n" + std::to_string(img.width()) + " " +
         std::to_string(img.height()) + "\n-1.0\n";
  // Scanlines bottom-to-top.
  for (int y = img.height() - 1; y >= 0; --y) {
    buf.append(reinterpret_cast<const char*>(img.row(y)),
               static_cast<std::size_t>(img.width()) * 3 * sizeof(float));
  }
  atomic_write_file(path, buf);
}

void write_pfm_gray(const std::string& path, const AlphaMatte& matte) {
  if (matte.width() <= 0) throw ValidationError("cannot write empty matte");
  std::string buf;
  buf += "Pf\n" + std::to_string(matte.width()) + " " +
         std::to_string(matte.height()) + "\n-1.0\n";
  for (int y = matte.height() - 1; y >= 0; --y) {
    buf.append(
        reinterpret_cast<const char*>(matte.values().data() +
                                      static_cast<std::size_t>(y) *
                                          matte.width()),
        static_cast<std::size_t>(matte.width()) * sizeof(float));
  }
  atomic_write_file(path, buf);
}

RadianceImage read_pfm(const std::string& path, ReadStats* stats) {
  const std::string buf = read_file(path);
  const PfmHeader h = parse_pfm_header(buf, path);
  const int ch = h.gray ? 1 : 3;
  const std::size_t values =
      static_cast<std::size_t>(h.width) * h.height * ch;
  if (h.data_offset + values * sizeof(float) > buf.size())
    throw IoError("truncated PFM file: " + path);

  RadianceImage img(h.width, h.height);
  const char* src = buf.data() + h.data_offset;
  for (int y = h.height - 1; y >= 0; --y) {
    for (int x = 0; x < h.width; ++x) {
      float px[3];
      for (int c = 0; c < ch; ++c) {
        std::uint32_t bits;
        std::memcpy(&bits, src, sizeof(bits));
        src += sizeof(bits);
        if (!h.little_endian) bits = __builtin_bswap32(bits);
        float v;
        std::memcpy(&v, &bits, sizeof(v));
        px[c] = clamp_ingest(v, path, stats);
      }
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = px[ch == 1 ? 0 : c];
    }
  }
  return img;
}

void write_png(const std::string& path, const RadianceImage& img,
               ImageEncoding depth) {
  if (depth == ImageEncoding::kPfm)
    throw ValidationError("write_png wants a PNG encoding");
  atomic_write_file(path, encode_png(img, depth == ImageEncoding::kPng16));
}

RadianceImage read_png(const std::string& path) {
  const PngCodes codes = decode_png_codes(read_file(path), path);
  RadianceImage img(codes.width, codes.height);
  const double max_code = codes.max_code;
  const std::uint16_t* src = codes.codes.data();
  float* dst = img.values().data();
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const std::uint16_t code = codes.channels == 1 ? src[0] : src[c];
      dst[c] = static_cast<float>(std::pow(code / max_code, kGamma));
    }
    src += codes.channels;
    dst += 3;
  }
  return img;
}

RadianceImage read_image(const std::string& path, ReadStats* stats) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") return read_pfm(path, stats);
  if (ext == ".png") return read_png(path);
  throw IoError("unsupported image extension: " + path);
}

void write_image(const std::string& path, const RadianceImage& img,
                 ImageEncoding encoding) {
  if (encoding == ImageEncoding::kPfm)
    write_pfm(path, img);
  else
    write_png(path, img, encoding);
}

AlphaMatte read_alpha(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") {
    const std::string buf = read_file(path);
    const PfmHeader h = parse_pfm_header(buf, path);
    const int ch = h.gray ? 1 : 3;
    const std::size_t values =
        static_cast<std::size_t>(h.width) * h.height * ch;
    if (h.data_offset + values * sizeof(float) > buf.size())
      throw IoError("truncated PFM file: " + path);
    std::vector<float> data(static_cast<std::size_t>(h.width) * h.height);
    const char* src = buf.data() + h.data_offset;
    for (int y = h.height - 1; y >= 0; --y) {
      for (int x = 0; x < h.width; ++x) {
        float acc = 0.0f;
        for (int c = 0; c < ch; ++c) {
          std::uint32_t bits;
          std::memcpy(&bits, src, sizeof(bits));
          src += sizeof(bits);
          if (!h.little_endian) bits = __builtin_bswap32(bits);
          float v;
          std::memcpy(&v, &bits, sizeof(v));
          if (!std::isfinite(v)) throw IoError("non-finite value in " + path);
          acc += v;
        }
        data[static_cast<std::size_t>(y) * h.width + x] =
            acc / static_cast<float>(ch);
      }
    }
    return AlphaMatte(h.width, h.height, std::move(data));
  }
  if (ext == ".png") {
    // Coverage maps straight from the integer code, no gamma.
    const PngCodes codes = decode_png_codes(read_file(path), path);
    std::vector<float> data(static_cast<std::size_t>(codes.width) *
                            codes.height);
    for (std::size_t i = 0; i < data.size(); ++i) {
      float acc = 0.0f;
      for (int c = 0; c < codes.channels; ++c)
        acc += codes.codes[i * codes.channels + c];
      data[i] = acc / (static_cast<float>(codes.channels) *
                       static_cast<float>(codes.max_code));
    }
    return AlphaMatte(codes.width, codes.height, std::move(data));
  }
  throw IoError("unsupported matte extension: " + path);
}

void write_alpha(const std::string& path, const AlphaMatte& matte) {
  const std::string ext = lower_extension(path);
  if (ext != ".pfm") throw IoError("mattes are written as .pfm: " + path);
  write_pfm_gray(path, matte);
}

BayerFrame read_pgm_bayer(const std::string& path, BayerPattern pattern) {
  const std::string buf = read_file(path);
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < buf.size()) {
      if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
        ++pos;
      } else if (buf[pos] == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < buf.size() &&
           !std::isspace(static_cast<unsigned char>(buf[pos])))
      ++pos;
    if (start == pos) throw IoError("truncated PGM header: " + path);
    return buf.substr(start, pos - start);
  };

  if (next_token() != "P5") throw IoError("not a binary PGM: " + path);
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(next_token());
    h = std::stol(next_token());
    maxval = std::stol(next_token());
  } catch (const std::exception&) {
    throw IoError("malformed PGM header: " + path);
  }
  check_dimensions(w, h);
  if (maxval != 255) throw IoError("only 8-bit PGM supported: " + path);

  const std::size_t offset = pos + 1;
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (offset + count > buf.size())
    throw IoError("truncated PGM file: " + path);

  BayerFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.pattern = pattern;
  frame.data.resize(count);
  std::memcpy(frame.data.data(), buf.data() + offset, count);
  return frame;
}

void write_pgm(const std::string& path, const BayerFrame& frame) {
  std::string buf = "P5\n" + std::to_string(frame.width) + " " +
                    std::to_string(frame.height) + "\n255\n";
  buf.append(reinterpret_cast<const char*>(frame.data.data()),
             frame.data.size());
  atomic_write_file(path, buf);
}

}  // namespace olat
