// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/normalize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "olat/errors.hpp"
#include "olat/image_io.hpp"

namespace olat {

void validate_param_stream(const ParamStream& stream) {
  if (stream.dim <= 0) throw ValidationError("parameter stream dim must be positive");
  for (const auto& v : stream.vectors) {
    if (static_cast<int>(v.size()) != stream.dim)
      throw ValidationError("parameter vector length mismatch");
    for (double x : v) {
      if (!std::isfinite(x))
        throw ValidationError("non-finite parameter value");
    }
  }
}

StreamStats estimate_stats(const ParamStream& stream) {
  validate_param_stream(stream);
  if (stream.vectors.empty())
    throw ValidationError("cannot estimate stats of an empty stream");

  const int d = stream.dim;
  const double n = static_cast<double>(stream.vectors.size());
  StreamStats stats;
  stats.count = stream.vectors.size();
  stats.mean.assign(d, 0.0);
  stats.std_dev.assign(d, 0.0);

  for (const auto& v : stream.vectors)
    for (int k = 0; k < d; ++k) stats.mean[k] += v[k];
  for (int k = 0; k < d; ++k) stats.mean[k] /= n;

  // Population variance about the mean.
  for (const auto& v : stream.vectors) {
    for (int k = 0; k < d; ++k) {
      const double dx = v[k] - stats.mean[k];
      stats.std_dev[k] += dx * dx;
    }
  }
  for (int k = 0; k < d; ++k)
    stats.std_dev[k] =
        std::max(std::sqrt(stats.std_dev[k] / n), StreamStats::kStdFloor);
  return stats;
}

ParamStream normalize_stream(const ParamStream& src,
                             const StreamStats& src_stats,
                             const StreamStats& tgt_stats) {
  validate_param_stream(src);
  if (src_stats.dim() != src.dim || tgt_stats.dim() != src.dim)
    throw ValidationError("stats dimension mismatch");
  for (int k = 0; k < src.dim; ++k) {
    if (!std::isfinite(src_stats.mean[k]) || !std::isfinite(tgt_stats.mean[k]) ||
        !std::isfinite(src_stats.std_dev[k]) ||
        !std::isfinite(tgt_stats.std_dev[k]))
      throw ValidationError("non-finite stats");
    if (src_stats.std_dev[k] <= 0.0)
      throw ValidationError("source std must be positive");
  }

  ParamStream out;
  out.dim = src.dim;
  out.tag = src.tag;
  out.vectors.reserve(src.vectors.size());
  for (const auto& v : src.vectors) {
    std::vector<double> r(src.dim);
    for (int k = 0; k < src.dim; ++k) {
      r[k] = (tgt_stats.std_dev[k] / src_stats.std_dev[k]) *
                 (v[k] - src_stats.mean[k]) +
             tgt_stats.mean[k];
    }
    out.vectors.push_back(std::move(r));
  }
  return out;
}

std::vector<double> mean_param(const ParamStream& stream) {
  validate_param_stream(stream);
  if (stream.vectors.empty())
    throw ValidationError("cannot average an empty stream");
  std::vector<double> mean(stream.dim, 0.0);
  for (const auto& v : stream.vectors)
    for (int k = 0; k < stream.dim; ++k) mean[k] += v[k];
  for (double& m : mean) m /= static_cast<double>(stream.vectors.size());
  return mean;
}

ParamStream load_param_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter stream " + path);

  ParamStream stream;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;

    if (!have_header) {
      std::string tag_kw;
      if (first != "dim" || !(ss >> stream.dim >> tag_kw >> stream.tag) ||
          tag_kw != "tag" || stream.dim <= 0 ||
          (stream.tag != "pose" && stream.tag != "expression"))
        throw IoError("parameter stream " + path +
                      ": expected header `dim <D> tag <pose|expression>`");
      have_header = true;
      continue;
    }

    std::vector<double> v(stream.dim);
    try {
      v[0] = std::stod(first);
    } catch (const std::exception&) {
      throw IoError("parameter stream line " + std::to_string(line_no) +
                    ": malformed value");
    }
    for (int k = 1; k < stream.dim; ++k) {
      if (!(ss >> v[k]))
        throw IoError("parameter stream line " + std::to_string(line_no) +
                      ": expected " + std::to_string(stream.dim) + " values");
    }
    double extra;
    if (ss >> extra)
      throw IoError("parameter stream line " + std::to_string(line_no) +
                    ": too many values");
    stream.vectors.push_back(std::move(v));
  }
  if (!have_header) throw IoError("parameter stream " + path + ": empty file");
  validate_param_stream(stream);
  return stream;
}

void save_param_stream(const std::string& path, const ParamStream& stream) {
  validate_param_stream(stream);
  std::ostringstream out;
  out.precision(17);
  out << "dim " << stream.dim << " tag "
      << (stream.tag.empty() ? "pose" : stream.tag) << "\n";
  for (const auto& v : stream.vectors) {
    for (int k = 0; k < stream.dim; ++k) out << (k ? " " : "") << v[k];
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

std::string format_stats(const StreamStats& stats) {
  std::ostringstream out;
  out.precision(12);
  out << "count " << stats.count << "\nmean";
  for (double m : stats.mean) out << " " << m;
  out << "\nstd";
  for (double s : stats.std_dev) out << " " << s;
  out << "\n";
  return out.str();
}

}  // namespace olat
