//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_MANIFEST_HPP
#define KINLAB_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kinlab/config.hpp"
#include "kinlab/error.hpp"

namespace kinlab {

// Run manifests: one manifest.json per output directory listing the command,
// the full resolved config, and an FNV-1a 64 content hash of every artifact.
// Everything is emitted in sorted order with no timestamps, so a rerun with
// an identical config produces a byte-identical manifest.

inline std::uint64_t fnv1a64(const void *data, std::size_t size) {
  const auto *bytes = static_cast<const unsigned char *>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::uint64_t hash_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open " + path + " for hashing");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  return fnv1a64(bytes.data(), bytes.size());
}

inline std::string hex64(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

inline std::string json_escape(const std::string &s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x",
                        static_cast<unsigned>(static_cast<unsigned char>(ch)));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

/// Writes <out_dir>/manifest.json covering the given artifacts (paths are
/// relative to out_dir). The artifact list is sorted before emission.
inline void write_manifest(const std::string &out_dir,
                           const std::string &command,
                           const RunConfig &config,
                           std::vector<std::string> artifacts) {
  std::sort(artifacts.begin(), artifacts.end());
  std::ostringstream out;
  out << "{\n  \"command\": \"" << json_escape(command) << "\",\n";
  out << "  \"config\": {";
  bool first = true;
  for (const auto &[key, value] : config) {
    out << (first ? "\n" : ",\n") << "    \"" << json_escape(key)
        << "\": \"" << json_escape(value) << "\"";
    first = false;
  }
  out << (first ? "" : "\n  ") << "},\n";
  out << "  \"artifacts\": [";
  first = true;
  for (const auto &name : artifacts) {
    auto full = std::filesystem::path(out_dir) / name;
    out << (first ? "\n" : ",\n") << "    {\"path\": \"" << json_escape(name)
        << "\", \"fnv1a64\": \"" << hex64(hash_file(full.string()))
        << "\"}";
    first = false;
  }
  out << (first ? "" : "\n  ") << "]\n}\n";

  auto path = std::filesystem::path(out_dir) / "manifest.json";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("IoFailure", "cannot write " + path.string());
  file << out.str();
}

}  // namespace kinlab

#endif  // KINLAB_MANIFEST_HPP
