//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_FMB_HPP
#define KINLAB_FMB_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "kinlab/error.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

// FMB1 feature-matrix container: magic "FMB1", rows:u64 LE, cols:u64 LE,
// then row-major f64 LE payload. Round trips are bit-exact.

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "FMB1 I/O assumes a little-endian host");

inline void put_u64(std::ostream &out, std::uint64_t v) {
  out.write(reinterpret_cast<const char *>(&v), 8);
}

inline std::uint64_t get_u64(std::istream &in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char *>(&v), 8);
  if (!in) throw Error("Truncated", "unexpected end of FMB1 header");
  return v;
}

}  // namespace detail

inline void write_fmb(const FeatureSeries &series, const std::string &path) {
  series.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open '" + path + "' for write");
  out.write("FMB1", 4);
  const auto rows = static_cast<std::uint64_t>(series.values.rows());
  const auto cols = static_cast<std::uint64_t>(series.values.cols());
  detail::put_u64(out, rows);
  detail::put_u64(out, cols);
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c) {
      double v = series.values(static_cast<Eigen::Index>(r),
                               static_cast<Eigen::Index>(c));
      out.write(reinterpret_cast<const char *>(&v), 8);
    }
  if (!out) throw Error("IoFailure", "short write to '" + path + "'");
}

inline FeatureSeries read_fmb(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open '" + path + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::memcmp(magic.data(), "FMB1", 4) != 0)
    throw Error("BadMagic", "not an FMB1 file: '" + path + "'");
  std::uint64_t rows = detail::get_u64(in);
  std::uint64_t cols = detail::get_u64(in);
  if (rows < 2) throw Error("EmptySeries", "FMB1 rows < 2");
  if (cols == 0) throw Error("EmptySeries", "FMB1 with zero columns");
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols)
    throw Error("SizeOverflow", "FMB1 dimensions overflow");
  std::uint64_t n = rows * cols;
  if (n > (std::uint64_t(1) << 33))  // 64 GiB payload guard
    throw Error("SizeOverflow", "FMB1 payload too large");

  FeatureSeries series;
  series.values.resize(static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(cols));
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c) {
      double v = 0;
      in.read(reinterpret_cast<char *>(&v), 8);
      if (!in) throw Error("Truncated", "FMB1 payload ends early");
      series.values(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(c)) = v;
    }
  return series;
}

}  // namespace kinlab

#endif  // KINLAB_FMB_HPP
