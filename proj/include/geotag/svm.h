// geotag/svm.h

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

#ifndef GEOTAG_SVM_H_
#define GEOTAG_SVM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "geotag/common.h"
#include "geotag/kernels.h"

namespace geotag {

// C-SVM on a precomputed kernel. The dual
//
//   min_a  0.5 a^T Q a - sum_i a_i,   Q_ij = y_i y_j K_ij,
//   s.t.   0 <= a_i <= C,  sum_i y_i a_i = 0
//
// is solved by two-coordinate working-set descent with second-order pair
// selection. The decision function is f(x) = sum_i a_i y_i K(x, x_i) + b.

struct SvmOptions {
  /// Stop once the maximal KKT violation pair is below this, or below the
  /// rounding level of the gradient if that is larger.
  double tolerance = 1e-12;
  std::int64_t max_iters = 10000000;
};

struct SvmModel {
  std::vector<std::string> support_ids;
  std::vector<double> dual_coeffs;  // a_i * y_i, aligned with support_ids
  double bias = 0.0;
  double C = 1.0;
  std::string kernel_ref;

  bool operator==(const SvmModel &) const = default;
};

/// labels are +1 / -1 and aligned with kernel.row_ids.
SvmModel TrainSvm(const KernelMatrix &kernel, const std::vector<int> &labels,
                  double C, const SvmOptions &opts = {},
                  const std::string &kernel_ref = "");

/// Full dual vector (one a_i per training row, zeros included) recovered from
/// a model trained on `kernel`.
Vector DualVariables(const SvmModel &model, const KernelMatrix &kernel,
                     const std::vector<int> &labels);

/// 0.5 a^T Q a - sum a for the given dual vector.
double DualObjective(const KernelMatrix &kernel, const std::vector<int> &labels,
                     const Vector &alpha);

/// One score per kernel row. Every support id must appear in col_ids.
Vector DecisionValues(const SvmModel &model, const CrossKernel &kernel);

enum class SelectionMetric { kAveragePrecision, kAccuracy };

struct CvConfig {
  int folds = 5;
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
  std::uint64_t seed = 0;
  SelectionMetric metric = SelectionMetric::kAveragePrecision;

  void Check() const;
};

struct CvResult {
  double best_C = 0.0;
  std::vector<double> c_grid;             // ascending
  std::vector<std::vector<double>> fold_scores;  // [grid index][fold]
  std::vector<double> mean_scores;        // per grid value
  std::vector<int> fold_of;               // fold index of each training row
};

/// Stratified fold assignment: each class is shuffled with the seed and dealt
/// round-robin. Returns the fold index of each row.
std::vector<int> StratifiedFolds(const std::vector<int> &labels, int folds,
                                 std::uint64_t seed);

/// Picks C from the grid by k-fold cross-validation on the training kernel.
/// Ties go to the smaller C.
CvResult CrossValidateC(const KernelMatrix &kernel, const std::vector<int> &labels,
                        const CvConfig &cfg, const SvmOptions &opts = {});

}  // namespace geotag

#endif  // GEOTAG_SVM_H_
