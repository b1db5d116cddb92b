// geotag/gmm.h

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

#ifndef GEOTAG_GMM_H_
#define GEOTAG_GMM_H_

#include <cstdint>
#include <vector>

#include "geotag/common.h"

namespace geotag {

// Diagonal-covariance Gaussian mixtures. Data sets are passed as matrices
// with one observation per ROW (N x D); callers holding frame-per-column
// feature matrices pass the transpose.

struct EmOptions {
  int max_iters = 100;
  double rel_tolerance = 1e-5;
  double variance_floor = 1e-4;
  std::uint64_t seed = 0;

  void Check() const;
};

struct GmmModel {
  Vector weights;    // G
  Matrix means;      // G x D
  Matrix variances;  // G x D, diagonal covariance entries

  Eigen::Index num_components() const { return weights.size(); }
  Eigen::Index dim() const { return means.cols(); }

  /// Throws ValidationError on inconsistent shapes, weights that are
  /// negative or do not sum to 1, or non-positive variances.
  void Check() const;

  bool operator==(const GmmModel &other) const {
    return weights == other.weights && means == other.means &&
           variances == other.variances;
  }
};

/// K-means initialized EM. If ll_trace is non-null it receives the data log
/// likelihood of every parameter set visited, starting with the initial one.
GmmModel FitGmm(const Matrix &data, int num_components, const EmOptions &opts,
                std::vector<double> *ll_trace = nullptr);

/// N x G matrix of log(lambda_g) + log N(x_t; mu_g, Sigma_g).
Matrix ComponentLogLikelihoods(const GmmModel &model, const Matrix &data);

/// N x G responsibilities Pr(g | x_t); each row sums to one.
Matrix Posteriors(const GmmModel &model, const Matrix &data);

/// Sum over rows of log sum_g lambda_g N(x_t; mu_g, Sigma_g).
double LogLikelihood(const GmmModel &model, const Matrix &data);

/// Mean-only MAP adaptation with the given relevance factor. Weights and
/// variances are copied from the prior model.
GmmModel MapAdaptMeans(const GmmModel &model, const Matrix &data,
                       double relevance);

}  // namespace geotag

#endif  // GEOTAG_GMM_H_
