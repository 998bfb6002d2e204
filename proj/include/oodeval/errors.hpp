// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace oodeval {

/// Malformed or inconsistent input data (bad files, dimension mismatches,
/// out-of-range labels). CLI exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerically degenerate configuration for which a statistic is undefined
/// (e.g. ViM's alpha with an empty residual space). CLI exit code 4.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oodeval
