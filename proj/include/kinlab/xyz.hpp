//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_XYZ_HPP
#define KINLAB_XYZ_HPP

#include <cctype>
#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "kinlab/error.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

/// Element table for the molecular systems we ingest; anything else is a
/// hard error rather than a guess.
inline int element_to_z(std::string_view symbol) {
  static const std::map<std::string, int, std::less<>> table = {
      {"H", 1}, {"C", 6},  {"N", 7},  {"O", 8},
      {"S", 16}, {"F", 9}, {"Cl", 17}};
  auto it = table.find(symbol);
  if (it == table.end())
    throw Error("UnknownElement", "unsupported element symbol '" +
                                      std::string(symbol) + "'");
  return it->second;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parse an extended-XYZ document: repeated blocks of
///   <atom count>
///   <comment line>
///   <symbol> <x> <y> <z>   (atom count times)
/// Frame order is preserved; composition must be constant across frames.
inline Trajectory parse_xyz(const std::string &text, double dt = 1.0,
                            std::string id = "") {
  std::istringstream in(text);
  Trajectory traj;
  traj.dt = dt;
  traj.id = std::move(id);

  std::string line;
  bool any_frame = false;
  while (std::getline(in, line)) {
    std::string_view head = detail::trim(line);
    if (head.empty()) {
      if (!any_frame) break;
      continue;  // stray blank lines between frames
    }
    long n_atoms = 0;
    auto [p, ec] =
        std::from_chars(head.data(), head.data() + head.size(), n_atoms);
    if (ec != std::errc() || p != head.data() + head.size() || n_atoms <= 0)
      throw Error("MalformedInput", "bad atom count line: '" + line + "'");

    if (!std::getline(in, line))
      throw Error("MalformedInput", "missing comment line");

    Eigen::MatrixX3d coords(n_atoms, 3);
    std::vector<int> numbers;
    numbers.reserve(static_cast<std::size_t>(n_atoms));
    for (long i = 0; i < n_atoms; ++i) {
      if (!std::getline(in, line))
        throw Error("MalformedInput", "truncated frame block");
      std::istringstream row(line);
      std::string symbol;
      double x, y, z;
      if (!(row >> symbol >> x >> y >> z))
        throw Error("MalformedInput", "bad atom line: '" + line + "'");
      numbers.push_back(element_to_z(symbol));
      coords.row(i) << x, y, z;
    }

    if (!any_frame) {
      traj.atomic_numbers = std::move(numbers);
      any_frame = true;
    } else if (numbers != traj.atomic_numbers) {
      throw Error("InconsistentFrames",
                  "atom count or composition changed between frames");
    }
    traj.frames.push_back(std::move(coords));
  }

  if (!any_frame) throw Error("MalformedInput", "empty XYZ document");
  traj.validate();
  return traj;
}

/// Inverse of parse_xyz for the supported element table.
inline std::string write_xyz(const Trajectory &traj) {
  static const std::map<int, std::string> symbols = {
      {1, "H"}, {6, "C"}, {7, "N"}, {8, "O"},
      {16, "S"}, {9, "F"}, {17, "Cl"}};
  std::ostringstream out;
  out.precision(17);
  for (const auto &frame : traj.frames) {
    out << traj.n_atoms() << "\n" << traj.id << "\n";
    for (Eigen::Index i = 0; i < frame.rows(); ++i) {
      auto it = symbols.find(traj.atomic_numbers[static_cast<std::size_t>(i)]);
      if (it == symbols.end())
        throw Error("UnknownElement", "atomic number outside element table");
      out << it->second << " " << frame(i, 0) << " " << frame(i, 1) << " "
          << frame(i, 2) << "\n";
    }
  }
  return out.str();
}

}  // namespace kinlab

#endif  // KINLAB_XYZ_HPP
