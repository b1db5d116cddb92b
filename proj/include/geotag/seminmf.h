// geotag/seminmf.h

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

#ifndef GEOTAG_SEMINMF_H_
#define GEOTAG_SEMINMF_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geotag/common.h"

namespace geotag {

// Semi-nonnegative matrix factorization X ~= M W^T.
//
// X is d x n with frames as columns and arbitrary sign. M (d x k) is the basis
// of one sound class, also unconstrained in sign. W (n x k) holds the
// per-frame activations and is kept elementwise nonnegative. Learning
// alternates a closed-form least-squares update of M with a multiplicative
// update of W built from the positive and negative parts of X^T M and M^T M.
// Both steps are non-increasing in ||X - M W^T||_F^2.
//
// Once M is learned for a class, the weights of any recording against that
// class are obtained by holding M fixed and running the W update alone.

struct FactorizationOptions {
  int max_iters = 200;
  /// Stop when (prev - cur) / prev drops below this.
  double rel_tolerance = 1e-5;
  /// Ridge added to W^T W and to the W-update denominator.
  double epsilon = 1e-9;
  std::uint64_t seed = 0;

  void Check() const;

  /// Same tolerance and stabilizer with the 100-iteration inference budget.
  static FactorizationOptions ForInference();
};

struct BasisMatrix {
  std::string class_name;
  Matrix values;  // d x k

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index k() const { return values.cols(); }
  bool operator==(const BasisMatrix &other) const {
    return class_name == other.class_name && values == other.values;
  }
};

/// Z+ = (|Z| + Z) / 2 and Z- = (|Z| - Z) / 2, so Z = Z+ - Z-.
std::pair<Matrix, Matrix> PosNegParts(const Matrix &z);

/// ||X - M W^T||_F^2.
double Objective(const FeatureMatrix &x, const Matrix &basis,
                 const WeightMatrix &weights);

/// M = X W (W^T W + eps I)^{-1}. With eps == 0 a singular W^T W raises
/// ValidationError("rank-deficient weights").
Matrix UpdateBasis(const FeatureMatrix &x, const WeightMatrix &weights,
                   double eps);

/// One multiplicative step
///   W_rs <- W_rs sqrt(((X^T M)+_rs + [W (M^T M)-]_rs) /
///                     ((X^T M)-_rs + [W (M^T M)+]_rs + eps)).
/// Zero entries stay zero.
WeightMatrix UpdateWeights(const FeatureMatrix &x, const Matrix &basis,
                           const WeightMatrix &weights, double eps);

struct InitialFactors {
  Matrix basis;          // k-means centers, d x k
  WeightMatrix weights;  // cluster indicators + 0.2, n x k
};

/// Seeded k-means (at most 20 Lloyd iterations) over the columns of X. The
/// initial centers are k distinct columns drawn uniformly at random.
InitialFactors InitFactors(const FeatureMatrix &x, int k, std::uint64_t seed);

struct BasisFit {
  BasisMatrix basis;
  WeightMatrix weights;
  /// Objective after initialization, then after every sweep.
  std::vector<double> trace;
};

/// Learns a k-column basis for X: InitFactors, then alternating
/// (UpdateBasis, UpdateWeights) sweeps until the relative decrease falls
/// below opts.rel_tolerance or opts.max_iters sweeps have run.
BasisFit LearnBasis(const FeatureMatrix &x, int k,
                    const FactorizationOptions &opts,
                    const std::string &class_name = "");

/// Weights of X against a fixed basis. Starts from W = 0.5 everywhere and
/// iterates UpdateWeights under the same stopping rule. If trace is non-null
/// it receives the objective after initialization and after every step.
WeightMatrix InferWeights(const FeatureMatrix &x, const Matrix &basis,
                          const FactorizationOptions &opts,
                          std::vector<double> *trace = nullptr);

}  // namespace geotag

#endif  // GEOTAG_SEMINMF_H_
