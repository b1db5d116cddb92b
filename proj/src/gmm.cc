// gmm.cc

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

#include "geotag/gmm.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "geotag/exact_sum.h"
#include "geotag/random.h"

namespace geotag {

void EmOptions::Check() const {
  GEOTAG_VALIDATE(max_iters >= 1, "em: max_iters must be >= 1");
  GEOTAG_VALIDATE(rel_tolerance > 0.0, "em: rel_tolerance must be > 0");
  GEOTAG_VALIDATE(variance_floor > 0.0, "em: variance_floor must be > 0");
}

void GmmModel::Check() const {
  const Eigen::Index g = weights.size();
  GEOTAG_VALIDATE(g > 0, "gmm: no components");
  GEOTAG_VALIDATE(means.rows() == g && variances.rows() == g &&
                      variances.cols() == means.cols() && means.cols() > 0,
                  "gmm: inconsistent parameter shapes");
  GEOTAG_VALIDATE((weights.array() >= 0.0).all(), "gmm: negative weight");
  GEOTAG_VALIDATE(std::abs(weights.sum() - 1.0) <= 1e-9,
                  "gmm: weights sum to ", weights.sum());
  GEOTAG_VALIDATE(means.allFinite(), "gmm: non-finite means");
  GEOTAG_VALIDATE(variances.allFinite() && (variances.array() > 0.0).all(),
                  "gmm: non-positive variance");
}

Matrix ComponentLogLikelihoods(const GmmModel &model, const Matrix &data) {
  GEOTAG_VALIDATE(data.cols() == model.dim(), "gmm: data dimension ",
                  data.cols(), " does not match model dimension ", model.dim());
  const Eigen::Index g_count = model.num_components();
  const Matrix inv_var = model.variances.cwiseInverse();
  // log lambda_g - 0.5 * sum_d log(2 pi var_gd)
  Vector consts(g_count);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    consts(g) = std::log(model.weights(g)) -
                0.5 * (2.0 * std::numbers::pi * model.variances.row(g).array())
                          .log()
                          .sum();
  }
  Matrix out(data.rows(), g_count);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    out.col(g) = consts(g) -
                 0.5 * ((data.rowwise() - model.means.row(g)).cwiseAbs2() *
                        inv_var.row(g).transpose())
                           .array();
  }
  return out;
}

namespace {

// Row-wise log-sum-exp, with responsibilities written in place.
Vector NormalizeRows(Matrix *loglik) {
  Vector lse(loglik->rows());
  for (Eigen::Index t = 0; t < loglik->rows(); ++t) {
    auto row = loglik->row(t);
    const double mx = row.maxCoeff();
    if (!std::isfinite(mx)) {
      // Every component has zero weight or density; spread evenly.
      row.setConstant(1.0 / static_cast<double>(row.size()));
      lse(t) = -std::numeric_limits<double>::infinity();
      continue;
    }
    row = (row.array() - mx).exp();
    const double s = row.sum();
    row /= s;
    lse(t) = mx + std::log(s);
  }
  return lse;
}

}  // namespace

Matrix Posteriors(const GmmModel &model, const Matrix &data) {
  Matrix post = ComponentLogLikelihoods(model, data);
  NormalizeRows(&post);
  return post;
}

double LogLikelihood(const GmmModel &model, const Matrix &data) {
  Matrix ll = ComponentLogLikelihoods(model, data);
  return ExactSumOf(NormalizeRows(&ll));
}

namespace {

GmmModel KMeansInit(const Matrix &data, int num_components,
                    const EmOptions &opts) {
  const Eigen::Index n = data.rows(), d = data.cols();
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  Rng rng(opts.seed);
  rng.Shuffle(&order);
  Matrix centers(num_components, d);
  for (int g = 0; g < num_components; ++g) centers.row(g) = data.row(order[g]);

  constexpr int kLloydIters = 10;
  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < kLloydIters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int g = 0; g < num_components; ++g) {
        const double dist = (data.row(i) - centers.row(g)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = g;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(num_components, d);
    std::vector<int> counts(num_components, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += data.row(i);
      ++counts[assign[i]];
    }
    for (int g = 0; g < num_components; ++g)
      if (counts[g] > 0) centers.row(g) = sums.row(g) / counts[g];
  }

  const Vector global_mean = data.colwise().mean();
  const Vector global_var =
      ((data.rowwise() - global_mean.transpose()).array().square().colwise().sum() /
       static_cast<double>(n))
          .max(opts.variance_floor);

  GmmModel model;
  model.means = centers;
  model.variances.resize(num_components, d);
  model.weights.resize(num_components);
  Matrix sq = Matrix::Zero(num_components, d);
  std::vector<int> counts(num_components, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq.row(assign[i]) += (data.row(i) - centers.row(assign[i])).cwiseAbs2();
    ++counts[assign[i]];
  }
  for (int g = 0; g < num_components; ++g) {
    if (counts[g] >= 2) {
      model.variances.row(g) =
          (sq.row(g).array() / counts[g]).max(opts.variance_floor);
    } else {
      model.variances.row(g) = global_var.transpose();
    }
    // Empty clusters still get a little mass so EM can revive them.
    model.weights(g) = std::max(counts[g], 1);
  }
  model.weights /= model.weights.sum();
  return model;
}

}  // namespace

GmmModel FitGmm(const Matrix &data, int num_components, const EmOptions &opts,
                std::vector<double> *ll_trace) {
  opts.Check();
  GEOTAG_VALIDATE(num_components >= 1, "fit_gmm: need at least one component");
  GEOTAG_VALIDATE(data.rows() >= num_components, "fit_gmm: ", data.rows(),
                  " points is too few for ", num_components, " components");
  GEOTAG_VALIDATE(data.cols() >= 1, "fit_gmm: zero-dimensional data");
  GEOTAG_VALIDATE(data.allFinite(), "fit_gmm: non-finite data");

  const Eigen::Index n = data.rows();
  GmmModel model = KMeansInit(data, num_components, opts);
  if (ll_trace) ll_trace->clear();

  Matrix resp = ComponentLogLikelihoods(model, data);
  double ll = ExactSumOf(NormalizeRows(&resp));
  if (ll_trace) ll_trace->push_back(ll);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // M-step.
    const Vector occupancy = resp.colwise().sum().transpose();
    const Matrix first = resp.transpose() * data;               // G x D
    for (int g = 0; g < num_components; ++g) {
      const double occ = occupancy(g);
      model.weights(g) = occ / static_cast<double>(n);
      if (occ <= 1e-10) continue;  // dead component keeps its Gaussian
      const Eigen::RowVectorXd mean = first.row(g) / occ;
      const Eigen::RowVectorXd var =
          resp.col(g).transpose() * (data.rowwise() - mean).cwiseAbs2() / occ;
      model.means.row(g) = mean;
      model.variances.row(g) = var.array().max(opts.variance_floor);
    }
    model.weights /= model.weights.sum();

    // E-step.
    resp = ComponentLogLikelihoods(model, data);
    const double next_ll = ExactSumOf(NormalizeRows(&resp));
    if (ll_trace) ll_trace->push_back(next_ll);
    const double change = std::abs(next_ll - ll) / std::max(std::abs(ll), 1e-300);
    ll = next_ll;
    if (change < opts.rel_tolerance) break;
  }
  return model;
}

GmmModel MapAdaptMeans(const GmmModel &model, const Matrix &data,
                       double relevance) {
  GEOTAG_VALIDATE(relevance > 0.0, "map_adapt_means: relevance must be > 0");
  GEOTAG_VALIDATE(data.cols() == model.dim(), "map_adapt_means: data dimension ",
                  data.cols(), " does not match model dimension ", model.dim());
  GmmModel adapted = model;
  if (data.rows() == 0) return adapted;
  const Matrix post = Posteriors(model, data);
  const Vector occupancy = post.colwise().sum().transpose();
  const Matrix first = post.transpose() * data;  // G x D
  for (Eigen::Index g = 0; g < model.num_components(); ++g) {
    if (occupancy(g) == 0.0) continue;
    adapted.means.row(g) = (first.row(g) + relevance * model.means.row(g)) /
                           (occupancy(g) + relevance);
  }
  return adapted;
}

}  // namespace geotag
