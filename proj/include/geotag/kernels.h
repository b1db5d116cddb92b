// geotag/kernels.h

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

#ifndef GEOTAG_KERNELS_H_
#define GEOTAG_KERNELS_H_

#include <optional>
#include <string>
#include <vector>

#include "geotag/common.h"
#include "geotag/featurize.h"

namespace geotag {

/// Square Gram matrix over one set of recordings.
struct KernelMatrix {
  Matrix values;
  std::vector<std::string> row_ids;
  std::optional<double> gamma;

  Eigen::Index size() const { return values.rows(); }
};

/// Rectangular kernel between test rows and training columns.
struct CrossKernel {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::optional<double> gamma;
};

/// Views a square kernel as test-vs-train with identical id sets.
CrossKernel AsCrossKernel(const KernelMatrix &kernel);

/// 0.5 * sum_m (x_m - y_m)^2 / (x_m + y_m), skipping bins where both are 0.
double Chi2Distance(const Vector &x, const Vector &y);

/// Mean chi-squared distance over all unordered pairs.
double AveragePairwiseGamma(const std::vector<Histogram> &features);

/// K_ij = exp(-D(x_i, x_j) / gamma). ids default to "0", "1", ...
KernelMatrix ExpChi2Kernel(const std::vector<Histogram> &features, double gamma,
                           std::vector<std::string> ids = {});

/// K_ij = exp(-D(test_i, train_j) / gamma) with the training gamma.
CrossKernel CrossExpChi2(const std::vector<Histogram> &train,
                         const std::vector<Histogram> &test, double gamma,
                         std::vector<std::string> train_ids = {},
                         std::vector<std::string> test_ids = {});

KernelMatrix LinearKernel(const std::vector<Supervector> &features,
                          std::vector<std::string> ids = {});
CrossKernel CrossLinear(const std::vector<Supervector> &train,
                        const std::vector<Supervector> &test,
                        std::vector<std::string> train_ids = {},
                        std::vector<std::string> test_ids = {});

/// (1/L) sum_l K_l.
KernelMatrix FuseAverage(const std::vector<KernelMatrix> &kernels);
/// (1/L) prod_l K_l, elementwise.
KernelMatrix FuseProduct(const std::vector<KernelMatrix> &kernels);
CrossKernel FuseAverage(const std::vector<CrossKernel> &kernels);
CrossKernel FuseProduct(const std::vector<CrossKernel> &kernels);

}  // namespace geotag

#endif  // GEOTAG_KERNELS_H_
