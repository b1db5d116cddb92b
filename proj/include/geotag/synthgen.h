// geotag/synthgen.h

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


#ifndef GEOTAG_SYNTHGEN_H_
#define GEOTAG_SYNTHGEN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geotag/common.h"
#include "geotag/dataset.h"

namespace geotag {

// Synthetic feature-level data. Each sound class l has a planted basis M_l
// (d x k_true, standard normal entries). A frame of class l is M_l w + e with
// w uniform on [0, 1]^k_true and e ~ N(0, noise_sigma^2). A recording of city c
// draws the class of each frame from row c of city_mixing; frames are grouped
// by class.

struct SynthSpec {
  int n_classes = 6;
  int k_true = 4;
  int d = 20;
  int n_cities = 4;
  /// n_cities x n_classes, rows sum to 1.
  Matrix city_mixing;
  int clip_frames = 60;
  /// Frames generated per class for basis training.
  int class_frames = 400;
  int train_per_city = 40;
  int test_per_city = 40;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void Check() const;
};

/// 4 cities over 6 classes, 60 frames per clip. City c puts 0.3 on classes c
/// and c + 1 and 0.1 on the rest, so neighbouring cities share a class.
SynthSpec DefaultCitySpec(std::uint64_t seed = 0);

std::string ClassName(int l);
std::string CityName(int c);

struct SynthClass {
  std::string name;
  Matrix basis;          // d x k_true
  WeightMatrix weights;  // class_frames x k_true
  FeatureMatrix x;       // d x class_frames
};

std::vector<SynthClass> GenClassData(const SynthSpec &spec);

struct SynthRecording {
  std::string city;
  Split split = Split::kTrain;
  FeatureMatrix frames;
  std::vector<int> frame_class;
};

/// Uses the planted bases of `classes` to build city recordings, split
/// train/test per city.
std::vector<SynthRecording> GenCityDataset(const SynthSpec &spec,
                                           const std::vector<SynthClass> &classes);

struct SynthPaths {
  std::filesystem::path sound_class_manifest;
  std::filesystem::path city_manifest;
  std::filesystem::path config;
};

/// Writes frame archives, both manifests, metadata and a pipeline config
/// (featurizer h, product fusion, k = k_true) under `dir`.
SynthPaths WriteSynthDataset(const SynthSpec &spec, const std::filesystem::path &dir);

}  // namespace geotag

#endif  // GEOTAG_SYNTHGEN_H_
