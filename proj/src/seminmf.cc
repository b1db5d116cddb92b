// seminmf.cc

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

#include "geotag/seminmf.h"

#include <cmath>
#include <limits>

#include "geotag/random.h"

namespace geotag {

void FactorizationOptions::Check() const {
  GEOTAG_VALIDATE(max_iters >= 1, "factorization: max_iters must be >= 1");
  GEOTAG_VALIDATE(rel_tolerance > 0.0, "factorization: rel_tolerance must be > 0");
  GEOTAG_VALIDATE(epsilon > 0.0, "factorization: epsilon must be > 0");
}

FactorizationOptions FactorizationOptions::ForInference() {
  FactorizationOptions opts;
  opts.max_iters = 100;
  return opts;
}

std::pair<Matrix, Matrix> PosNegParts(const Matrix &z) {
  GEOTAG_VALIDATE(z.allFinite(), "PosNegParts: non-finite input");
  Matrix plus = (z.array().abs() + z.array()) / 2.0;
  Matrix minus = (z.array().abs() - z.array()) / 2.0;
  return {std::move(plus), std::move(minus)};
}

double Objective(const FeatureMatrix &x, const Matrix &basis,
                 const WeightMatrix &weights) {
  GEOTAG_VALIDATE(basis.rows() == x.rows() && weights.rows() == x.cols() &&
                      weights.cols() == basis.cols(),
                  "objective: shape mismatch X ", x.rows(), "x", x.cols(),
                  ", M ", basis.rows(), "x", basis.cols(), ", W ",
                  weights.rows(), "x", weights.cols());
  return (x - basis * weights.transpose()).squaredNorm();
}

Matrix UpdateBasis(const FeatureMatrix &x, const WeightMatrix &weights,
                   double eps) {
  GEOTAG_VALIDATE(weights.rows() == x.cols(), "update_basis: W has ",
                  weights.rows(), " rows but X has ", x.cols(), " columns");
  GEOTAG_VALIDATE(eps >= 0.0, "update_basis: negative eps");
  const Eigen::Index k = weights.cols();
  Matrix gram = weights.transpose() * weights;
  const Matrix xw = x * weights;  // d x k
  if (eps == 0.0) {
    Eigen::FullPivLU<Matrix> lu(gram);
    GEOTAG_VALIDATE(lu.rank() == k, "rank-deficient weights");
    return lu.solve(xw.transpose()).transpose();
  }
  gram.diagonal().array() += eps;
  // gram is symmetric positive definite; solve gram * M^T = (X W)^T.
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw RuntimeError("update_basis: Cholesky of W^T W + eps I failed");
  return llt.solve(xw.transpose()).transpose();
}

WeightMatrix UpdateWeights(const FeatureMatrix &x, const Matrix &basis,
                           const WeightMatrix &weights, double eps) {
  GEOTAG_VALIDATE(basis.rows() == x.rows() && weights.rows() == x.cols() &&
                      weights.cols() == basis.cols(),
                  "update_weights: shape mismatch");
  const Matrix xtm = x.transpose() * basis;   // n x k
  const Matrix mtm = basis.transpose() * basis;  // k x k
  const auto [xtm_pos, xtm_neg] = PosNegParts(xtm);
  const auto [mtm_pos, mtm_neg] = PosNegParts(mtm);
  const Matrix numer = xtm_pos + weights * mtm_neg;
  const Matrix denom = xtm_neg + weights * mtm_pos;
  WeightMatrix out(weights.rows(), weights.cols());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double w = weights(i, j);
      out(i, j) = w == 0.0 ? 0.0 : w * std::sqrt(numer(i, j) / (denom(i, j) + eps));
    }
  }
  return out;
}

namespace {

bool ColumnsEqual(const FeatureMatrix &x, Eigen::Index a, const Vector &c) {
  return x.col(a) == c;
}

}  // namespace

InitialFactors InitFactors(const FeatureMatrix &x, int k, std::uint64_t seed) {
  const Eigen::Index d = x.rows(), n = x.cols();
  GEOTAG_VALIDATE(k >= 1, "init_factors: k must be >= 1");
  GEOTAG_VALIDATE(k <= std::min(d, n), "init_factors: k = ", k,
                  " exceeds min(d, T) = ", std::min(d, n));
  GEOTAG_VALIDATE(x.allFinite(), "init_factors: non-finite features");

  // Initial centers: distinct columns in seeded random order.
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(&order);
  Matrix centers(d, k);
  int found = 0;
  for (Eigen::Index idx : order) {
    bool duplicate = false;
    for (int c = 0; c < found && !duplicate; ++c)
      duplicate = ColumnsEqual(x, idx, centers.col(c));
    if (duplicate) continue;
    centers.col(found++) = x.col(idx);
    if (found == k) break;
  }
  GEOTAG_VALIDATE(found == k, "init_factors: fewer than k = ", k,
                  " distinct columns (found ", found, ")");

  constexpr int kMaxLloydIters = 20;
  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < kMaxLloydIters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = (x.col(i) - centers.col(c)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(d, k);
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(assign[i]) += x.col(i);
      ++counts[assign[i]];
    }
    // Empty clusters keep their previous center.
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.col(c) = sums.col(c) / counts[c];
  }

  InitialFactors init;
  init.basis = std::move(centers);
  init.weights = WeightMatrix::Constant(n, k, 0.2);
  for (Eigen::Index i = 0; i < n; ++i) init.weights(i, assign[i]) += 1.0;
  return init;
}

namespace {

bool Converged(double prev, double cur, double rel_tolerance) {
  if (cur == 0.0) return true;
  if (prev <= 0.0) return true;
  return (prev - cur) / prev < rel_tolerance;
}

}  // namespace

BasisFit LearnBasis(const FeatureMatrix &x, int k,
                    const FactorizationOptions &opts,
                    const std::string &class_name) {
  opts.Check();
  InitialFactors init = InitFactors(x, k, opts.seed);
  BasisFit fit;
  fit.basis.class_name = class_name;
  fit.basis.values = std::move(init.basis);
  fit.weights = std::move(init.weights);
  fit.trace.push_back(Objective(x, fit.basis.values, fit.weights));
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    fit.basis.values = UpdateBasis(x, fit.weights, opts.epsilon);
    fit.weights = UpdateWeights(x, fit.basis.values, fit.weights, opts.epsilon);
    const double cur = Objective(x, fit.basis.values, fit.weights);
    const double prev = fit.trace.back();
    fit.trace.push_back(cur);
    if (!std::isfinite(cur))
      throw RuntimeError("learn_basis: objective became non-finite");
    if (Converged(prev, cur, opts.rel_tolerance)) break;
  }
  return fit;
}

WeightMatrix InferWeights(const FeatureMatrix &x, const Matrix &basis,
                          const FactorizationOptions &opts,
                          std::vector<double> *trace) {
  opts.Check();
  GEOTAG_VALIDATE(basis.rows() == x.rows(), "infer_weights: basis has ",
                  basis.rows(), " rows but features have ", x.rows());
  WeightMatrix weights = WeightMatrix::Constant(x.cols(), basis.cols(), 0.5);
  double prev = Objective(x, basis, weights);
  if (trace) {
    trace->clear();
    trace->push_back(prev);
  }
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    weights = UpdateWeights(x, basis, weights, opts.epsilon);
    const double cur = Objective(x, basis, weights);
    if (trace) trace->push_back(cur);
    if (Converged(prev, cur, opts.rel_tolerance)) break;
    prev = cur;
  }
  return weights;
}

}  // namespace geotag
