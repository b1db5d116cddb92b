// featurize.cc

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

#include "geotag/featurize.h"

#include <cmath>
#include <vector>

#include "geotag/exact_sum.h"

namespace geotag {

namespace {

Vector PosteriorMass(const Matrix &rows, const GmmModel &model) {
  GEOTAG_VALIDATE(rows.rows() > 0, "featurize: no frames");
  const Matrix post = Posteriors(model, rows);
  return post.colwise().sum().transpose() / static_cast<double>(rows.rows());
}

}  // namespace

Histogram HFeature(const WeightMatrix &weights) {
  GEOTAG_VALIDATE(weights.rows() > 0 && weights.cols() > 0,
                  "h_feature: empty weight matrix");
  GEOTAG_VALIDATE(weights.allFinite() && (weights.array() >= 0.0).all(),
                  "h_feature: weights must be finite and nonnegative");
  const Eigen::Index n = weights.rows(), k = weights.cols();
  std::vector<ExactSum> sums(k);
  int zero_rows = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double row_sum = weights.row(t).sum();
    for (Eigen::Index j = 0; j < k; ++j) {
      sums[j].Add(row_sum > 0.0 ? weights(t, j) / row_sum
                                : 1.0 / static_cast<double>(k));
    }
    if (row_sum <= 0.0) ++zero_rows;
  }
  if (zero_rows > 0)
    GEOTAG_LOG("h_feature: ", zero_rows, " all-zero weight rows set uniform");
  Histogram h;
  h.tag = "h";
  h.values.resize(k);
  for (Eigen::Index j = 0; j < k; ++j)
    h.values(j) = sums[j].Result() / static_cast<double>(n);
  return h;
}

Histogram VFeature(const WeightMatrix &weights, const GmmModel &model) {
  GEOTAG_VALIDATE(weights.cols() == model.dim(), "v_feature: weights have ",
                  weights.cols(), " columns but the GMM has dimension ",
                  model.dim());
  return {PosteriorMass(weights, model), "v"};
}

Histogram BoawFeature(const FeatureMatrix &x, const GmmModel &background) {
  GEOTAG_VALIDATE(x.rows() == background.dim(), "boaw_feature: features have ",
                  x.rows(), " dimensions but the background GMM has ",
                  background.dim());
  return {PosteriorMass(x.transpose(), background), "boaw"};
}

Supervector SupervectorFeature(const FeatureMatrix &x, const GmmModel &background,
                               double relevance) {
  GEOTAG_VALIDATE(x.rows() == background.dim(),
                  "supervector_feature: features have ", x.rows(),
                  " dimensions but the background GMM has ", background.dim());
  const GmmModel adapted = MapAdaptMeans(background, x.transpose(), relevance);
  const Eigen::Index g_count = adapted.num_components(), d = adapted.dim();
  Supervector sv;
  sv.values.resize(g_count * d);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    const double scale = std::sqrt(adapted.weights(g));
    for (Eigen::Index j = 0; j < d; ++j) {
      sv.values(g * d + j) =
          scale * adapted.means(g, j) / std::sqrt(adapted.variances(g, j));
    }
  }
  return sv;
}

}  // namespace geotag
