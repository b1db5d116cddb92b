// geotag/exact_sum.h

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


#ifndef GEOTAG_EXACT_SUM_H_
#define GEOTAG_EXACT_SUM_H_

#include <cmath>
#include <utility>
#include <vector>

#include "geotag/common.h"

namespace geotag {

/// Exactly rounded floating-point sum (Shewchuk partials, as in Python's
/// math.fsum). The result does not depend on summation order.
class ExactSum {
 public:
  void Add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  double Result() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // Round-half-even correction across the remaining partials.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

inline double ExactSumOf(const Vector &v) {
  ExactSum s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s.Add(v(i));
  return s.Result();
}

}  // namespace geotag

#endif  // GEOTAG_EXACT_SUM_H_
