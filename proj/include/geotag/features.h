// geotag/features.h

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

#ifndef GEOTAG_FEATURES_H_
#define GEOTAG_FEATURES_H_

#include "geotag/common.h"
#include "geotag/dataset.h"

namespace geotag {

/// MFCC front end. Defaults give 20 coefficients over 30 ms Hamming windows
/// with a 15 ms hop, 40 HTK-spaced mel bands and a 1e-10 log floor.
struct MfccConfig {
  int n_coeffs = 20;
  double window_ms = 30.0;
  double hop_fraction = 0.5;
  int n_mels = 40;
  double fmin = 0.0;
  double fmax = 8000.0;
  double pre_emphasis = 0.97;
  int delta_width = 2;

  void Check(int sample_rate) const;
  int WindowLength(int sample_rate) const;
  int HopLength(int sample_rate) const;
};

constexpr double kLogEnergyFloor = 1e-10;

double HzToMel(double hz);
double MelToHz(double mel);

/// n_mels x (fft_size/2 + 1) triangular filter weights.
Matrix MelFilterbank(int n_mels, int fft_size, int sample_rate, double fmin,
                     double fmax);

/// Rows 0..n_keep-1 of the orthonormal DCT-II matrix of size n.
Matrix DctMatrix(int n, int n_keep);

/// Number of frames a clip of n_samples yields; 0 if shorter than a window.
int NumFrames(std::size_t n_samples, const MfccConfig &cfg, int sample_rate);

/// n_coeffs x n_frames cepstra. Throws ValidationError("insufficient
/// samples") for clips shorter than one window.
FeatureMatrix ComputeMfcc(const AudioClip &clip, const MfccConfig &cfg);

/// Regression deltas along time with edge replication; same shape as input.
FeatureMatrix ComputeDeltas(const FeatureMatrix &feats, int width);

/// [mfcc; delta; delta-delta], 3 * n_coeffs rows.
FeatureMatrix ExtractMfca(const AudioClip &clip, const MfccConfig &cfg);

}  // namespace geotag

#endif  // GEOTAG_FEATURES_H_
