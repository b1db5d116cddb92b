// config.cc

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


#include "geotag/config.h"

#include <set>

namespace geotag {

namespace {

void RejectUnknown(const Json &obj, const std::set<std::string> &known,
                   const std::string &where) {
  GEOTAG_VALIDATE(obj.is_object(), "config: '", where, "' must be an object");
  for (const auto &[key, value] : obj.items())
    GEOTAG_VALIDATE(known.count(key), "config: unknown key '", key, "' in ", where);
}

template <typename T>
void Read(const Json &obj, const char *key, T *out) {
  if (obj.contains(key)) *out = obj.at(key).get<T>();
}

}  // namespace

const char *FeaturizerName(Featurizer f) {
  switch (f) {
    case Featurizer::kH: return "h";
    case Featurizer::kV: return "v";
    case Featurizer::kBoaw: return "boaw";
    case Featurizer::kSupervector: return "supervector";
  }
  return "?";
}

Featurizer ParseFeaturizer(const std::string &name) {
  for (Featurizer f : {Featurizer::kH, Featurizer::kV, Featurizer::kBoaw,
                       Featurizer::kSupervector})
    if (name == FeaturizerName(f)) return f;
  throw ValidationError("config: unknown featurizer '" + name + "'");
}

const char *FusionName(Fusion f) {
  switch (f) {
    case Fusion::kAverage: return "average";
    case Fusion::kProduct: return "product";
    case Fusion::kNone: return "none";
  }
  return "?";
}

Fusion ParseFusion(const std::string &name) {
  for (Fusion f : {Fusion::kAverage, Fusion::kProduct, Fusion::kNone})
    if (name == FusionName(f)) return f;
  throw ValidationError("config: unknown fusion '" + name + "'");
}

void PipelineConfig::Check() const {
  GEOTAG_VALIDATE(k > 0, "config: k must be positive");
  GEOTAG_VALIDATE(G > 0, "config: G must be positive");
  const bool per_class = featurizer == Featurizer::kH || featurizer == Featurizer::kV;
  GEOTAG_VALIDATE(per_class == (fusion != Fusion::kNone), "config: featurizer '",
                  FeaturizerName(featurizer), "' cannot be used with fusion '",
                  FusionName(fusion), "'");
  GEOTAG_VALIDATE(relevance > 0.0, "config: relevance must be > 0");
  GEOTAG_VALIDATE(inference_max_iters > 0, "config: inference_max_iters must be > 0");
  GEOTAG_VALIDATE(min_examples >= 1, "config: min_examples must be >= 1");
  GEOTAG_VALIDATE(!city_manifest.empty(), "config: city_manifest is required");
  GEOTAG_VALIDATE(!per_class || !sound_class_manifest.empty(),
                  "config: sound_class_manifest is required for featurizer '",
                  FeaturizerName(featurizer), "'");
  factorization.Check();
  em.Check();
  cv.Check();
}

FactorizationOptions PipelineConfig::InferenceOptions() const {
  FactorizationOptions opts = factorization;
  opts.max_iters = inference_max_iters;
  return opts;
}

PipelineConfig ParseConfig(const Json &doc, const std::filesystem::path &base_dir) {
  PipelineConfig cfg;
  try {
    RejectUnknown(doc,
                  {"sound_class_manifest", "city_manifest", "featurizer", "fusion", "k",
                   "G", "mfcc", "factorization", "em", "cv", "relevance",
                   "min_examples", "output_dir", "seed"},
                  "config");
    auto path = [&](const char *key, std::filesystem::path *out) {
      if (!doc.contains(key)) return;
      std::filesystem::path p = doc.at(key).get<std::string>();
      *out = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    };
    path("sound_class_manifest", &cfg.sound_class_manifest);
    path("city_manifest", &cfg.city_manifest);
    path("output_dir", &cfg.output_dir);
    if (doc.contains("featurizer"))
      cfg.featurizer = ParseFeaturizer(doc.at("featurizer").get<std::string>());
    if (doc.contains("fusion"))
      cfg.fusion = ParseFusion(doc.at("fusion").get<std::string>());
    Read(doc, "k", &cfg.k);
    Read(doc, "G", &cfg.G);
    Read(doc, "relevance", &cfg.relevance);
    Read(doc, "min_examples", &cfg.min_examples);
    Read(doc, "seed", &cfg.seed);

    if (doc.contains("mfcc")) {
      const Json &m = doc.at("mfcc");
      RejectUnknown(m,
                    {"n_coeffs", "window_ms", "hop_fraction", "n_mels", "fmin", "fmax",
                     "pre_emphasis", "delta_width"},
                    "mfcc");
      Read(m, "n_coeffs", &cfg.mfcc.n_coeffs);
      Read(m, "window_ms", &cfg.mfcc.window_ms);
      Read(m, "hop_fraction", &cfg.mfcc.hop_fraction);
      Read(m, "n_mels", &cfg.mfcc.n_mels);
      Read(m, "fmin", &cfg.mfcc.fmin);
      Read(m, "fmax", &cfg.mfcc.fmax);
      Read(m, "pre_emphasis", &cfg.mfcc.pre_emphasis);
      Read(m, "delta_width", &cfg.mfcc.delta_width);
    }
    if (doc.contains("factorization")) {
      const Json &f = doc.at("factorization");
      RejectUnknown(f, {"max_iters", "rel_tolerance", "epsilon", "inference_max_iters"},
                    "factorization");
      Read(f, "max_iters", &cfg.factorization.max_iters);
      Read(f, "rel_tolerance", &cfg.factorization.rel_tolerance);
      Read(f, "epsilon", &cfg.factorization.epsilon);
      Read(f, "inference_max_iters", &cfg.inference_max_iters);
    }
    if (doc.contains("em")) {
      const Json &e = doc.at("em");
      RejectUnknown(e, {"max_iters", "rel_tolerance", "variance_floor"}, "em");
      Read(e, "max_iters", &cfg.em.max_iters);
      Read(e, "rel_tolerance", &cfg.em.rel_tolerance);
      Read(e, "variance_floor", &cfg.em.variance_floor);
    }
    if (doc.contains("cv")) {
      const Json &c = doc.at("cv");
      RejectUnknown(c, {"folds", "c_grid", "metric"}, "cv");
      Read(c, "folds", &cfg.cv.folds);
      Read(c, "c_grid", &cfg.cv.c_grid);
      if (c.contains("metric")) {
        const std::string metric = c.at("metric").get<std::string>();
        if (metric == "average_precision")
          cfg.cv.metric = SelectionMetric::kAveragePrecision;
        else if (metric == "accuracy")
          cfg.cv.metric = SelectionMetric::kAccuracy;
        else
          throw ValidationError("config: unknown cv metric '" + metric + "'");
      }
    }
  } catch (const Json::exception &e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.factorization.seed = cfg.seed;
  cfg.em.seed = cfg.seed;
  cfg.cv.seed = cfg.seed;
  cfg.Check();
  return cfg;
}

PipelineConfig LoadConfig(const std::filesystem::path &path) {
  Json doc;
  try {
    doc = Json::parse(ReadFile(path));
  } catch (const Json::exception &e) {
    throw ValidationError("config: cannot parse " + path.string() + ": " + e.what());
  }
  return ParseConfig(doc, path.parent_path());
}

Json ConfigToJson(const PipelineConfig &cfg) {
  return {
      {"sound_class_manifest", cfg.sound_class_manifest.string()},
      {"city_manifest", cfg.city_manifest.string()},
      {"featurizer", FeaturizerName(cfg.featurizer)},
      {"fusion", FusionName(cfg.fusion)},
      {"k", cfg.k},
      {"G", cfg.G},
      {"mfcc",
       {{"n_coeffs", cfg.mfcc.n_coeffs},
        {"window_ms", cfg.mfcc.window_ms},
        {"hop_fraction", cfg.mfcc.hop_fraction},
        {"n_mels", cfg.mfcc.n_mels},
        {"fmin", cfg.mfcc.fmin},
        {"fmax", cfg.mfcc.fmax},
        {"pre_emphasis", cfg.mfcc.pre_emphasis},
        {"delta_width", cfg.mfcc.delta_width}}},
      {"factorization",
       {{"max_iters", cfg.factorization.max_iters},
        {"rel_tolerance", cfg.factorization.rel_tolerance},
        {"epsilon", cfg.factorization.epsilon},
        {"inference_max_iters", cfg.inference_max_iters}}},
      {"em",
       {{"max_iters", cfg.em.max_iters},
        {"rel_tolerance", cfg.em.rel_tolerance},
        {"variance_floor", cfg.em.variance_floor}}},
      {"cv",
       {{"folds", cfg.cv.folds},
        {"c_grid", cfg.cv.c_grid},
        {"metric", cfg.cv.metric == SelectionMetric::kAccuracy ? "accuracy"
                                                               : "average_precision"}}},
      {"relevance", cfg.relevance},
      {"min_examples", cfg.min_examples},
      {"output_dir", cfg.output_dir.string()},
      {"seed", cfg.seed}};
}

std::uint64_t DeriveSeed(std::uint64_t seed, const std::string &tag) {
  std::uint64_t h = Fnv1a(tag, Fnv1a(std::to_string(seed)));
  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace geotag
