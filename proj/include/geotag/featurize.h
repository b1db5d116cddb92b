// geotag/featurize.h

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

#ifndef GEOTAG_FEATURIZE_H_
#define GEOTAG_FEATURIZE_H_

#include <string>

#include "geotag/common.h"
#include "geotag/gmm.h"

namespace geotag {

/// Clip-level nonnegative feature vector. tag records the featurizer and,
/// for per-class features, the sound class, e.g. "h/siren".
struct Histogram {
  Vector values;
  std::string tag;
};

struct Supervector {
  Vector values;
};

/// Rows of W normalized to sum to one (all-zero rows become uniform), then
/// averaged over frames.
Histogram HFeature(const WeightMatrix &weights);

/// GMM posterior mass over the raw rows of W, divided by the frame count.
Histogram VFeature(const WeightMatrix &weights, const GmmModel &model);

/// Soft-count bag of audio words: background-GMM posterior mass over the
/// frames (columns) of X, divided by the frame count.
Histogram BoawFeature(const FeatureMatrix &x, const GmmModel &background);

/// MAP-adapt the background means to X, then stack
/// sqrt(lambda_g) * Sigma_g^{-1/2} * mu'_g for g = 0..G-1.
Supervector SupervectorFeature(const FeatureMatrix &x, const GmmModel &background,
                               double relevance);

}  // namespace geotag

#endif  // GEOTAG_FEATURIZE_H_
