//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_ERROR_HPP
#define KINLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace kinlab {

/// All kinlab errors carry a stable machine-readable kind (e.g. "BadMagic")
/// plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}

  const std::string &kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace kinlab

#endif  // KINLAB_ERROR_HPP
