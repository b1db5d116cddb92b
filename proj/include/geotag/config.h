// geotag/config.h

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


#ifndef GEOTAG_CONFIG_H_
#define GEOTAG_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "geotag/archive.h"
#include "geotag/features.h"
#include "geotag/gmm.h"
#include "geotag/seminmf.h"
#include "geotag/svm.h"

namespace geotag {

enum class Featurizer { kH, kV, kBoaw, kSupervector };
enum class Fusion { kAverage, kProduct, kNone };

const char *FeaturizerName(Featurizer f);
Featurizer ParseFeaturizer(const std::string &name);
const char *FusionName(Fusion f);
Fusion ParseFusion(const std::string &name);

struct PipelineConfig {
  std::filesystem::path sound_class_manifest;
  std::filesystem::path city_manifest;
  Featurizer featurizer = Featurizer::kH;
  Fusion fusion = Fusion::kProduct;
  int k = 20;
  int G = 64;
  MfccConfig mfcc;
  FactorizationOptions factorization;
  int inference_max_iters = 100;
  EmOptions em;
  CvConfig cv;
  double relevance = 16.0;
  /// Cities with fewer recordings than this are left out of evaluation.
  int min_examples = 1;
  std::filesystem::path output_dir = "geotag_out";
  std::uint64_t seed = 0;

  /// Throws ValidationError when k or G is not positive, featurizer and fusion
  /// do not match, or a nested block is invalid.
  void Check() const;

  FactorizationOptions InferenceOptions() const;
};

/// Reads a JSON config. Relative paths are taken relative to the file's
/// directory. Unknown keys are rejected.
PipelineConfig LoadConfig(const std::filesystem::path &path);
PipelineConfig ParseConfig(const Json &doc, const std::filesystem::path &base_dir = {});
Json ConfigToJson(const PipelineConfig &cfg);

/// Stable sub-seed for a named unit of work.
std::uint64_t DeriveSeed(std::uint64_t seed, const std::string &tag);

}  // namespace geotag

#endif  // GEOTAG_CONFIG_H_
