// geotag/pipeline.h

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


#ifndef GEOTAG_PIPELINE_H_
#define GEOTAG_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "geotag/archive.h"
#include "geotag/config.h"
#include "geotag/dataset.h"
#include "geotag/eval.h"
#include "geotag/kernels.h"
#include "geotag/seminmf.h"
#include "geotag/svm.h"

namespace geotag {

// Output layout under cfg.output_dir:
//
//   basis/<class>.json    one basis archive per sound class
//   gmm/<name>.json       v-feature GMMs per class, or gmm/background.json
//   features.json         feature table
//   kernels.json          fused training kernel and per-class gammas
//   svm/<city>.json       one model per city
//   report.json           EvalReport archive
//   report.txt            the same as a table
//
// Every archive records the digest of the configuration it came from. A stage
// reuses an archive whose digest still matches and recomputes otherwise.

/// Runs fn(0..n-1) on up to `jobs` threads. Each index must write only its own
/// output slot. The exception of the lowest failing index is rethrown.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

/// A manifest entry ending in ".json" names a features archive holding a d x n
/// frame matrix. Any other entry is decoded as WAV, resampled to 16 kHz and
/// turned into MFCA frames.
FeatureMatrix LoadRecordingFrames(const DatasetManifest &manifest,
                                  const ManifestEntry &entry, const MfccConfig &mfcc);

/// File name stem used for a class or city label.
std::string SafeName(const std::string &label);

std::string BasisDigest(const PipelineConfig &cfg);
std::string FeatureDigest(const PipelineConfig &cfg);
std::string EvalDigest(const PipelineConfig &cfg);
/// Human-readable description plus EvalDigest.
std::string ConfigDescription(const PipelineConfig &cfg);

struct ClassBasis {
  BasisMatrix basis;
  std::vector<double> trace;
  double data_norm_sq = 0.0;
  int frames = 0;
  bool reused = false;
};

std::vector<ClassBasis> RunTrainBasis(const PipelineConfig &cfg, int jobs = 1);
/// Loads the basis archives written by RunTrainBasis.
std::vector<BasisMatrix> LoadBases(const PipelineConfig &cfg);

struct FeaturizeResult {
  FeatureTable table;
  /// Per-class v-feature GMMs, or the single "background" GMM for the
  /// baselines. Empty for h.
  std::map<std::string, GmmModel> gmms;
};

/// Featurizes the city manifest. GMMs are fit on training-split recordings only.
FeaturizeResult Featurize(const PipelineConfig &cfg, const DatasetManifest &cities,
                          const std::vector<BasisMatrix> &bases, int jobs = 1);
FeaturizeResult RunFeaturize(const PipelineConfig &cfg, int jobs = 1);

struct TrainedModels {
  std::vector<std::string> train_ids;
  std::map<std::string, double> gammas;
  KernelMatrix train_kernel;
  std::map<std::string, CvResult> cv;
  std::map<std::string, SvmModel> models;
  std::vector<std::string> notes;
};

/// Kernels, C selection and SVMs from the training split alone.
TrainedModels TrainModels(const PipelineConfig &cfg, const DatasetManifest &cities,
                          const FeatureTable &table, int jobs = 1);

/// Scores the test split with the trained models.
EvalReport Evaluate(const PipelineConfig &cfg, const DatasetManifest &cities,
                    const FeatureTable &table, const TrainedModels &trained);

EvalReport RunTrainEval(const PipelineConfig &cfg, int jobs = 1);
EvalReport RunAll(const PipelineConfig &cfg, int jobs = 1);

}  // namespace geotag

#endif  // GEOTAG_PIPELINE_H_
