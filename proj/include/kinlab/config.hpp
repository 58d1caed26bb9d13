//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_CONFIG_HPP
#define KINLAB_CONFIG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kinlab/error.hpp"

namespace kinlab {

// Run configuration files: one `key = value` pair per line, `#` comments.
// Keys are validated against a per-command schema before any work happens.

using RunConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string strip(const std::string &s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

inline RunConfig parse_config(const std::string &text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("InvalidConfig", "line " + std::to_string(lineno) +
                                       ": expected key = value");
    std::string key = detail::strip(line.substr(0, eq));
    std::string value = detail::strip(line.substr(eq + 1));
    if (key.empty())
      throw Error("InvalidConfig",
                  "line " + std::to_string(lineno) + ": empty key");
    if (config.count(key))
      throw Error("InvalidConfig", "duplicate key '" + key + "'");
    config[key] = value;
  }
  return config;
}

inline RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("InvalidConfig", "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

struct ConfigSchema {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

inline void validate_schema(const RunConfig &config,
                            const ConfigSchema &schema) {
  for (const auto &[key, value] : config) {
    (void)value;
    bool known =
        std::find(schema.required.begin(), schema.required.end(), key) !=
            schema.required.end() ||
        std::find(schema.optional.begin(), schema.optional.end(), key) !=
            schema.optional.end();
    if (!known) throw Error("InvalidConfig", "unknown key '" + key + "'");
  }
  for (const auto &key : schema.required)
    if (!config.count(key))
      throw Error("InvalidConfig", "missing required key '" + key + "'");
}

inline const std::string &cfg_string(const RunConfig &config,
                                     const std::string &key) {
  auto it = config.find(key);
  if (it == config.end())
    throw Error("InvalidConfig", "missing required key '" + key + "'");
  return it->second;
}

inline std::string cfg_string(const RunConfig &config, const std::string &key,
                              const std::string &fallback) {
  auto it = config.find(key);
  return it == config.end() ? fallback : it->second;
}

inline std::int64_t cfg_int(const RunConfig &config, const std::string &key) {
  const std::string &raw = cfg_string(config, key);
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw Error("InvalidConfig",
                "key '" + key + "': expected integer, got '" + raw + "'");
  return value;
}

inline std::int64_t cfg_int(const RunConfig &config, const std::string &key,
                            std::int64_t fallback) {
  return config.count(key) ? cfg_int(config, key) : fallback;
}

inline double cfg_double(const RunConfig &config, const std::string &key) {
  const std::string &raw = cfg_string(config, key);
  try {
    std::size_t used = 0;
    double value = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception &) {
    throw Error("InvalidConfig",
                "key '" + key + "': expected number, got '" + raw + "'");
  }
}

inline double cfg_double(const RunConfig &config, const std::string &key,
                         double fallback) {
  return config.count(key) ? cfg_double(config, key) : fallback;
}

inline bool cfg_bool(const RunConfig &config, const std::string &key,
                     bool fallback) {
  if (!config.count(key)) return fallback;
  const std::string &raw = config.at(key);
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw Error("InvalidConfig",
              "key '" + key + "': expected true/false, got '" + raw + "'");
}

inline std::vector<double> cfg_double_list(const RunConfig &config,
                                           const std::string &key) {
  const std::string &raw = cfg_string(config, key);
  std::vector<double> values;
  std::istringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = detail::strip(item);
    if (item.empty())
      throw Error("InvalidConfig", "key '" + key + "': empty list entry");
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw Error("InvalidConfig",
                  "key '" + key + "': bad list entry '" + item + "'");
    }
  }
  if (values.empty())
    throw Error("InvalidConfig", "key '" + key + "': empty list");
  return values;
}

/// Rows separated by ';', entries by ',': "0.9,0.1;0.1,0.9".
inline Eigen::MatrixXd cfg_matrix(const RunConfig &config,
                                  const std::string &key) {
  const std::string &raw = cfg_string(config, key);
  std::vector<std::vector<double>> rows;
  std::istringstream in(raw);
  std::string row_text;
  while (std::getline(in, row_text, ';')) {
    RunConfig shim{{key, row_text}};
    rows.push_back(cfg_double_list(shim, key));
    if (rows.back().size() != rows.front().size())
      throw Error("InvalidConfig", "key '" + key + "': ragged matrix rows");
  }
  if (rows.empty()) throw Error("InvalidConfig", "key '" + key + "': empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return m;
}

}  // namespace kinlab

#endif  // KINLAB_CONFIG_HPP
