// eval.cc

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


#include "geotag/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace geotag {

namespace {

template <typename Less>
RankedList Rank(const Vector &scores, const std::vector<bool> &relevant,
                const std::vector<std::string> &ids, Less tie_less) {
  const std::size_t n = relevant.size();
  GEOTAG_VALIDATE(static_cast<std::size_t>(scores.size()) == n,
                  "average_precision: ", scores.size(), " scores for ", n,
                  " relevance labels");
  GEOTAG_VALIDATE(scores.allFinite(), "average_precision: non-finite score");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return tie_less(a, b);
  });
  RankedList ranked;
  for (std::size_t i : order) {
    if (!ids.empty()) ranked.ids.push_back(ids[i]);
    ranked.scores.push_back(scores(i));
    ranked.relevant.push_back(relevant[i]);
  }
  return ranked;
}

}  // namespace

RankedList RankItems(const Vector &scores, const std::vector<bool> &relevant,
                     const std::vector<std::string> &ids) {
  GEOTAG_VALIDATE(ids.size() == relevant.size(), "rank: ", ids.size(),
                  " ids for ", relevant.size(), " items");
  return Rank(scores, relevant, ids,
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
}

double AveragePrecision(const RankedList &ranked) {
  double total = 0.0;
  int hits = 0;
  for (std::size_t r = 0; r < ranked.relevant.size(); ++r) {
    if (!ranked.relevant[r]) continue;
    ++hits;
    total += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  GEOTAG_VALIDATE(hits > 0, "undefined AP: no relevant items");
  return total / hits;
}

double AveragePrecision(const Vector &scores, const std::vector<bool> &relevant,
                        const std::vector<std::string> &ids) {
  return AveragePrecision(RankItems(scores, relevant, ids));
}

double AveragePrecision(const Vector &scores, const std::vector<bool> &relevant) {
  return AveragePrecision(
      Rank(scores, relevant, {}, [](std::size_t a, std::size_t b) { return a < b; }));
}

double MeanAveragePrecision(const std::map<std::string, double> &per_city) {
  GEOTAG_VALIDATE(!per_city.empty(), "mean_average_precision: no cities");
  double total = 0.0;
  for (const auto &[city, ap] : per_city) total += ap;
  return total / static_cast<double>(per_city.size());
}

EvalReport BuildReport(const std::map<std::string, SvmModel> &models,
                       const std::map<std::string, CityTestSet> &test_sets,
                       const std::string &config_digest) {
  EvalReport report;
  report.config_digest = config_digest;
  for (const auto &[city, model] : models) {
    auto it = test_sets.find(city);
    GEOTAG_VALIDATE(it != test_sets.end(), "build_report: no test set for city '",
                    city, "'");
    const CityTestSet &test = it->second;
    GEOTAG_VALIDATE(test.kernel.row_ids.size() == test.relevant.size() &&
                        static_cast<std::size_t>(test.kernel.values.rows()) ==
                            test.relevant.size(),
                    "build_report: identifier mismatch between kernel and labels "
                    "for city '", city, "'");
    const Vector scores = DecisionValues(model, test.kernel);
    report.per_city_ap[city] =
        AveragePrecision(scores, test.relevant, test.kernel.row_ids);
    report.best_C[city] = model.C;
  }
  report.map = MeanAveragePrecision(report.per_city_ap);
  return report;
}

std::string FormatReportTable(const EvalReport &report) {
  std::size_t width = 4;
  for (const auto &[city, ap] : report.per_city_ap) width = std::max(width, city.size());
  std::string out;
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s  %8s\n", static_cast<int>(width), "City",
                "AP");
  out += line;
  out += std::string(width + 10, '-') + "\n";
  for (const auto &[city, ap] : report.per_city_ap) {
    std::snprintf(line, sizeof(line), "%-*s  %8.4f\n", static_cast<int>(width),
                  city.c_str(), ap);
    out += line;
  }
  out += std::string(width + 10, '-') + "\n";
  std::snprintf(line, sizeof(line), "%-*s  %8.4f\n", static_cast<int>(width), "MAP",
                report.map);
  out += line;
  if (!report.config_digest.empty()) out += "config: " + report.config_digest + "\n";
  return out;
}

}  // namespace geotag
