// geotag/eval.h

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


#ifndef GEOTAG_EVAL_H_
#define GEOTAG_EVAL_H_

#include <map>
#include <string>
#include <vector>

#include "geotag/common.h"
#include "geotag/kernels.h"
#include "geotag/svm.h"

namespace geotag {

/// Items sorted by descending score; equal scores are ordered by id.
struct RankedList {
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::vector<bool> relevant;
};

RankedList RankItems(const Vector &scores, const std::vector<bool> &relevant,
                     const std::vector<std::string> &ids);

/// Mean of precision@r over the ranks r that hold a relevant item.
/// Throws ValidationError("undefined AP ...") when nothing is relevant.
double AveragePrecision(const Vector &scores, const std::vector<bool> &relevant,
                        const std::vector<std::string> &ids);

/// Ties are broken by position.
double AveragePrecision(const Vector &scores, const std::vector<bool> &relevant);

double AveragePrecision(const RankedList &ranked);

double MeanAveragePrecision(const std::map<std::string, double> &per_city);

struct EvalReport {
  std::map<std::string, double> per_city_ap;
  double map = 0.0;
  std::string config_digest;
  std::map<std::string, double> best_C;
  /// Recordings or cities left out, with the reason.
  std::vector<std::string> notes;

  bool operator==(const EvalReport &) const = default;
};

/// Test recordings of one city: ids aligned with relevance flags.
struct CityTestSet {
  CrossKernel kernel;
  std::vector<bool> relevant;
};

EvalReport BuildReport(const std::map<std::string, SvmModel> &models,
                       const std::map<std::string, CityTestSet> &test_sets,
                       const std::string &config_digest);

/// Plain-text table: one row per city, then MAP.
std::string FormatReportTable(const EvalReport &report);

}  // namespace geotag

#endif  // GEOTAG_EVAL_H_
