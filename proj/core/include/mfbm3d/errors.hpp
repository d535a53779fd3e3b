#pragma once

#include <stdexcept>
#include <string>

namespace mfbm3d {

/// File-system or codec failure (missing file, malformed header, unwritable path).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical invariant was violated at run time, e.g. an aggregation
/// pixel that received no contribution.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfbm3d
