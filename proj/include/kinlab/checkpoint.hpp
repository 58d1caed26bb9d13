//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_CHECKPOINT_HPP
#define KINLAB_CHECKPOINT_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "kinlab/descriptor.hpp"
#include "kinlab/error.hpp"

namespace kinlab {

// Binary checkpoint helpers. All kinlab checkpoint formats are a 4-byte
// magic, u64 LE header integers, then f64 LE tensor payloads in a fixed
// order; round trips are bit-exact.

namespace detail {

inline void write_magic(std::ostream &out, const char magic[4]) {
  out.write(magic, 4);
}

inline void expect_magic(std::istream &in, const char magic[4],
                         const std::string &what) {
  std::array<char, 4> got{};
  in.read(got.data(), 4);
  if (!in || std::memcmp(got.data(), magic, 4) != 0)
    throw Error("BadMagic", "not a " + what + " file");
}

inline void write_f64s(std::ostream &out, const double *data,
                       std::int64_t n) {
  out.write(reinterpret_cast<const char *>(data),
            static_cast<std::streamsize>(n * 8));
}

inline void read_f64s(std::istream &in, double *data, std::int64_t n) {
  in.read(reinterpret_cast<char *>(data),
          static_cast<std::streamsize>(n * 8));
  if (!in) throw Error("Truncated", "checkpoint payload ends early");
}

}  // namespace detail

/// GDM1 descriptor checkpoint: magic, then width/depth/n_rbf/n_elements as
/// u64 LE, cutoff as f64 LE, then the flattened parameter vector.
inline void save_descriptor(const DescriptorModel &model,
                            const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open '" + path + "' for write");
  detail::write_magic(out, "GDM1");
  const auto &cfg = model.config;
  for (std::uint64_t v : {static_cast<std::uint64_t>(cfg.width),
                          static_cast<std::uint64_t>(cfg.depth),
                          static_cast<std::uint64_t>(cfg.n_rbf),
                          static_cast<std::uint64_t>(cfg.n_elements)})
    out.write(reinterpret_cast<const char *>(&v), 8);
  out.write(reinterpret_cast<const char *>(&cfg.cutoff), 8);
  Eigen::VectorXd flat = model.params.flatten();
  detail::write_f64s(out, flat.data(), flat.size());
  if (!out) throw Error("IoFailure", "short write to '" + path + "'");
}

inline DescriptorModel load_descriptor(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open '" + path + "'");
  detail::expect_magic(in, "GDM1", "GDM1 descriptor checkpoint");
  std::uint64_t dims[4];
  for (auto &v : dims) {
    in.read(reinterpret_cast<char *>(&v), 8);
    if (!in) throw Error("Truncated", "GDM1 header ends early");
  }
  DescriptorConfig cfg;
  cfg.width = static_cast<int>(dims[0]);
  cfg.depth = static_cast<int>(dims[1]);
  cfg.n_rbf = static_cast<int>(dims[2]);
  cfg.n_elements = static_cast<int>(dims[3]);
  in.read(reinterpret_cast<char *>(&cfg.cutoff), 8);
  if (!in) throw Error("Truncated", "GDM1 header ends early");
  cfg.validate();

  DescriptorModel model{cfg, DescriptorParams::zeros(cfg)};
  Eigen::VectorXd flat(count_parameters(cfg));
  detail::read_f64s(in, flat.data(), flat.size());
  model.params.unflatten(flat);
  return model;
}

}  // namespace kinlab

#endif  // KINLAB_CHECKPOINT_HPP
