// kernels.cc

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

#include "geotag/kernels.h"

#include <cmath>

namespace geotag {

namespace {

std::vector<std::string> DefaultIds(std::vector<std::string> ids, std::size_t n) {
  if (ids.empty()) {
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  GEOTAG_VALIDATE(ids.size() == n, "kernel: ", ids.size(), " ids for ", n,
                  " features");
  return ids;
}

}  // namespace

CrossKernel AsCrossKernel(const KernelMatrix &kernel) {
  return {kernel.values, kernel.row_ids, kernel.row_ids, kernel.gamma};
}

double Chi2Distance(const Vector &x, const Vector &y) {
  GEOTAG_VALIDATE(x.size() == y.size(), "chi2_distance: length mismatch ",
                  x.size(), " vs ", y.size());
  double d = 0.0;
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    GEOTAG_VALIDATE(x(m) >= 0.0 && y(m) >= 0.0,
                    "chi2_distance: negative histogram entry");
    const double s = x(m) + y(m);
    if (s == 0.0) continue;
    const double diff = x(m) - y(m);
    d += diff * diff / s;
  }
  return 0.5 * d;
}

double AveragePairwiseGamma(const std::vector<Histogram> &features) {
  const std::size_t n = features.size();
  GEOTAG_VALIDATE(n >= 2, "average_pairwise_gamma: need at least 2 features");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      total += Chi2Distance(features[i].values, features[j].values);
  const double gamma = total / (static_cast<double>(n) * (n - 1) / 2.0);
  GEOTAG_VALIDATE(gamma > 0.0,
                  "average_pairwise_gamma: degenerate feature set (all "
                  "pairwise distances are zero)");
  return gamma;
}

KernelMatrix ExpChi2Kernel(const std::vector<Histogram> &features, double gamma,
                           std::vector<std::string> ids) {
  GEOTAG_VALIDATE(gamma > 0.0, "exp_chi2_kernel: gamma must be > 0");
  const auto n = static_cast<Eigen::Index>(features.size());
  KernelMatrix k;
  k.row_ids = DefaultIds(std::move(ids), features.size());
  k.gamma = gamma;
  k.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v =
          std::exp(-Chi2Distance(features[i].values, features[j].values) / gamma);
      k.values(i, j) = v;
      k.values(j, i) = v;
    }
  }
  return k;
}

CrossKernel CrossExpChi2(const std::vector<Histogram> &train,
                         const std::vector<Histogram> &test, double gamma,
                         std::vector<std::string> train_ids,
                         std::vector<std::string> test_ids) {
  GEOTAG_VALIDATE(gamma > 0.0, "cross_exp_chi2: gamma must be > 0");
  CrossKernel k;
  k.col_ids = DefaultIds(std::move(train_ids), train.size());
  k.row_ids = DefaultIds(std::move(test_ids), test.size());
  k.gamma = gamma;
  k.values.resize(static_cast<Eigen::Index>(test.size()),
                  static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < test.size(); ++i)
    for (std::size_t j = 0; j < train.size(); ++j)
      k.values(i, j) = std::exp(-Chi2Distance(test[i].values, train[j].values) / gamma);
  return k;
}

namespace {

Matrix StackRows(const std::vector<Supervector> &features) {
  if (features.empty()) return Matrix(0, 0);
  const Eigen::Index dim = features[0].values.size();
  Matrix m(static_cast<Eigen::Index>(features.size()), dim);
  for (std::size_t i = 0; i < features.size(); ++i) {
    GEOTAG_VALIDATE(features[i].values.size() == dim,
                    "linear_kernel: supervector length mismatch");
    m.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  return m;
}

}  // namespace

KernelMatrix LinearKernel(const std::vector<Supervector> &features,
                          std::vector<std::string> ids) {
  KernelMatrix k;
  k.row_ids = DefaultIds(std::move(ids), features.size());
  const Matrix rows = StackRows(features);
  k.values = rows * rows.transpose();
  // Mirror the upper triangle so the Gram matrix is exactly symmetric.
  k.values = k.values.triangularView<Eigen::Upper>();
  k.values.triangularView<Eigen::StrictlyLower>() = k.values.transpose();
  return k;
}

CrossKernel CrossLinear(const std::vector<Supervector> &train,
                        const std::vector<Supervector> &test,
                        std::vector<std::string> train_ids,
                        std::vector<std::string> test_ids) {
  CrossKernel k;
  k.col_ids = DefaultIds(std::move(train_ids), train.size());
  k.row_ids = DefaultIds(std::move(test_ids), test.size());
  const Matrix a = StackRows(test), b = StackRows(train);
  GEOTAG_VALIDATE(a.size() == 0 || b.size() == 0 || a.cols() == b.cols(),
                  "cross_linear: supervector length mismatch");
  k.values = a * b.transpose();
  return k;
}

namespace {

template <typename K>
void CheckFusable(const std::vector<K> &kernels) {
  GEOTAG_VALIDATE(!kernels.empty(), "fuse: no kernels");
  for (const auto &k : kernels) {
    GEOTAG_VALIDATE(k.values.rows() == kernels[0].values.rows() &&
                        k.values.cols() == kernels[0].values.cols(),
                    "fuse: kernel shape mismatch");
    GEOTAG_VALIDATE(k.row_ids == kernels[0].row_ids, "fuse: row id mismatch");
    if constexpr (requires { k.col_ids; })
      GEOTAG_VALIDATE(k.col_ids == kernels[0].col_ids, "fuse: column id mismatch");
  }
}

template <typename K>
K Fuse(const std::vector<K> &kernels, bool product) {
  CheckFusable(kernels);
  K out = kernels[0];
  if (kernels.size() > 1) out.gamma.reset();
  for (std::size_t l = 1; l < kernels.size(); ++l) {
    if (product)
      out.values.array() *= kernels[l].values.array();
    else
      out.values += kernels[l].values;
  }
  out.values /= static_cast<double>(kernels.size());
  return out;
}

}  // namespace

KernelMatrix FuseAverage(const std::vector<KernelMatrix> &kernels) {
  return Fuse(kernels, false);
}
KernelMatrix FuseProduct(const std::vector<KernelMatrix> &kernels) {
  return Fuse(kernels, true);
}
CrossKernel FuseAverage(const std::vector<CrossKernel> &kernels) {
  return Fuse(kernels, false);
}
CrossKernel FuseProduct(const std::vector<CrossKernel> &kernels) {
  return Fuse(kernels, true);
}

}  // namespace geotag
