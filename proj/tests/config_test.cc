// config_test.cc

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


#include "doctest.h"

#include <set>

#include "geotag/archive.h"
#include "geotag/config.h"
#include "test_util.h"

namespace geotag {
namespace {

using testing::Contains;
using testing::ErrorOf;
using testing::TempDir;

Json Minimal() { return {{"sound_class_manifest", "classes.csv"}, {"city_manifest", "cities.csv"}}; }

TEST_CASE("defaults") {
  const PipelineConfig cfg = ParseConfig(Minimal());
  CHECK(cfg.featurizer == Featurizer::kH);
  CHECK(cfg.fusion == Fusion::kProduct);
  CHECK(cfg.k == 20);
  CHECK(cfg.G == 64);
  CHECK(cfg.relevance == 16.0);
  CHECK(cfg.cv.folds == 5);
  CHECK(cfg.cv.c_grid == std::vector<double>{0.01, 0.1, 1.0, 10.0, 100.0});
  CHECK(cfg.cv.metric == SelectionMetric::kAveragePrecision);
  CHECK(cfg.factorization.max_iters == 200);
  CHECK(cfg.factorization.rel_tolerance == 1e-5);
  CHECK(cfg.factorization.epsilon == 1e-9);
  CHECK(cfg.inference_max_iters == 100);
  CHECK(cfg.em.variance_floor == 1e-4);
  CHECK(cfg.InferenceOptions().max_iters == 100);
}

TEST_CASE("unknown keys are rejected at every level") {
  Json doc = Minimal();
  doc["kk"] = 3;
  CHECK(Contains(ErrorOf<ValidationError>([&] { ParseConfig(doc); }), "unknown key 'kk'"));
  for (const char *block : {"mfcc", "factorization", "em", "cv"}) {
    doc = Minimal();
    doc[block] = {{"bogus", 1}};
    CHECK(Contains(ErrorOf<ValidationError>([&] { ParseConfig(doc); }), "bogus"));
  }
  doc = Minimal();
  doc["k"] = "twenty";
  CHECK(!ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
}

TEST_CASE("featurizer and fusion compatibility") {
  const std::vector<std::pair<std::string, std::string>> good = {
      {"h", "average"}, {"h", "product"}, {"v", "average"},
      {"v", "product"}, {"boaw", "none"}, {"supervector", "none"}};
  for (const auto &[f, u] : good) {
    Json doc = Minimal();
    doc["featurizer"] = f;
    doc["fusion"] = u;
    CHECK(ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
  }
  const std::vector<std::pair<std::string, std::string>> bad = {
      {"h", "none"}, {"v", "none"}, {"boaw", "product"}, {"supervector", "average"}};
  for (const auto &[f, u] : bad) {
    Json doc = Minimal();
    doc["featurizer"] = f;
    doc["fusion"] = u;
    CHECK(!ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
  }
  Json doc = Minimal();
  doc["featurizer"] = "mfcc";
  CHECK(Contains(ErrorOf<ValidationError>([&] { ParseConfig(doc); }), "featurizer"));
  for (const char *key : {"k", "G"}) {
    doc = Minimal();
    doc[key] = 0;
    CHECK(!ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
  }
  doc = Minimal();
  doc["cv"] = {{"folds", 1}};
  CHECK(!ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
  doc = Minimal();
  doc["cv"] = {{"metric", "f1"}};
  CHECK(!ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
  doc = Minimal();
  doc.erase("city_manifest");
  CHECK(!ErrorOf<ValidationError>([&] { ParseConfig(doc); }).empty());
}

TEST_CASE("paths resolve against the config file") {
  TempDir dir("config");
  Json doc = Minimal();
  doc["city_manifest"] = "/abs/cities.csv";
  doc["output_dir"] = "out";
  doc["seed"] = 42;
  doc["cv"] = {{"metric", "accuracy"}, {"c_grid", {1, 2}}};
  WriteFileAtomic(dir.path() / "cfg.json", doc.dump());
  const PipelineConfig cfg = LoadConfig(dir.path() / "cfg.json");
  CHECK(cfg.sound_class_manifest == dir.path() / "classes.csv");
  CHECK(cfg.city_manifest == "/abs/cities.csv");
  CHECK(cfg.output_dir == dir.path() / "out");
  CHECK(cfg.seed == 42);
  CHECK(cfg.cv.seed == 42);
  CHECK(cfg.em.seed == 42);
  CHECK(cfg.factorization.seed == 42);
  CHECK(cfg.cv.metric == SelectionMetric::kAccuracy);

  // Serializing and parsing again is the identity.
  const PipelineConfig again = ParseConfig(ConfigToJson(cfg));
  CHECK(ConfigToJson(again) == ConfigToJson(cfg));

  WriteFileAtomic(dir.path() / "broken.json", "{\"k\": ");
  CHECK(Contains(ErrorOf<ValidationError>([&] { LoadConfig(dir.path() / "broken.json"); }),
                 "cannot parse"));
}

TEST_CASE("derived seeds") {
  CHECK(DeriveSeed(7, "basis/dog") == DeriveSeed(7, "basis/dog"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : {0, 1, 2})
    for (const char *tag : {"basis/dog", "basis/siren", "gmm/dog", "gmm/background", "cv/paris"})
      seen.insert(DeriveSeed(s, tag));
  CHECK(seen.size() == 15);
}

}  // namespace
}  // namespace geotag
