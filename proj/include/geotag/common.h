// geotag/common.h

// Copyright 2026  The Geotag Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef GEOTAG_COMMON_H_
#define GEOTAG_COMMON_H_

#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace geotag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Columns are frames, rows are feature dimensions (d x n).
using FeatureMatrix = Eigen::MatrixXd;

/// Per-frame composition weights (n x k), elementwise nonnegative.
using WeightMatrix = Eigen::MatrixXd;

/// Bad input: malformed files, violated preconditions, inconsistent shapes.
/// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while doing otherwise valid work (I/O, numerical breakdown).
/// The CLI maps this to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

template <typename... Args>
std::string Concat(const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace internal

/// Messages at or below this level reach stderr (0 = warnings only).
int Verbosity();
void SetVerbosity(int level);
void EmitLog(int level, const std::string &message);

#define GEOTAG_WARN(...) \
  ::geotag::EmitLog(0, "WARNING: " + ::geotag::internal::Concat(__VA_ARGS__))
#define GEOTAG_LOG(...) \
  ::geotag::EmitLog(1, "LOG: " + ::geotag::internal::Concat(__VA_ARGS__))

#define GEOTAG_VALIDATE(cond, ...)                                       \
  do {                                                                   \
    if (!(cond))                                                         \
      throw ::geotag::ValidationError(::geotag::internal::Concat(__VA_ARGS__)); \
  } while (0)

}  // namespace geotag

#endif  // GEOTAG_COMMON_H_
