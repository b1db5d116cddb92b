// pipeline.cc

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


#include "geotag/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <optional>
#include <set>
#include <thread>

#include "geotag/features.h"
#include "geotag/featurize.h"
#include "geotag/gmm.h"

namespace geotag {

namespace fs = std::filesystem;

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

FeatureMatrix LoadRecordingFrames(const DatasetManifest &manifest,
                                  const ManifestEntry &entry, const MfccConfig &mfcc) {
  const fs::path path = manifest.Resolve(entry.path);
  if (path.extension() == ".json") return FramesFromArchive(LoadArchive(path));
  return ExtractMfca(ResampleTo16k(DecodeWav(path)), mfcc);
}

std::string SafeName(const std::string &label) {
  std::string out;
  for (unsigned char c : label)
    out += (std::isalnum(c) || c == '.' || c == '-' || c == '_') ? static_cast<char>(c) : '_';
  if (out.empty() || out[0] == '.') out = "_" + out;
  return out;
}

namespace {

std::string HashJson(const Json &j) { return HexDigest(Fnv1a(j.dump())); }

Json MfccJson(const PipelineConfig &cfg) { return ConfigToJson(cfg).at("mfcc"); }

fs::path BasisPath(const PipelineConfig &cfg, const std::string &cls) {
  return cfg.output_dir / "basis" / (SafeName(cls) + ".json");
}
fs::path GmmPath(const PipelineConfig &cfg, const std::string &name) {
  return cfg.output_dir / "gmm" / (SafeName(name) + ".json");
}
fs::path FeaturesPath(const PipelineConfig &cfg) {
  return cfg.output_dir / "features.json";
}

bool PerClass(const PipelineConfig &cfg) {
  return cfg.featurizer == Featurizer::kH || cfg.featurizer == Featurizer::kV;
}

std::vector<std::string> CheckedLabels(const DatasetManifest &manifest,
                                       const char *what) {
  std::vector<std::string> labels = manifest.Labels();
  std::set<std::string> names;
  for (const auto &l : labels)
    GEOTAG_VALIDATE(names.insert(SafeName(l)).second, what, " labels '", l,
                    "' collide after file-name sanitizing");
  return labels;
}

Matrix StackRows(const std::vector<const Matrix *> &parts) {
  Eigen::Index rows = 0, cols = parts.empty() ? 0 : parts[0]->cols();
  for (const Matrix *p : parts) rows += p->rows();
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Matrix *p : parts) {
    out.middleRows(at, p->rows()) = *p;
    at += p->rows();
  }
  return out;
}

}  // namespace

std::string BasisDigest(const PipelineConfig &cfg) {
  const Json cfg_json = ConfigToJson(cfg);
  Json j = {{"stage", "basis"},
            {"manifest", ReadFile(cfg.sound_class_manifest)},
            {"k", cfg.k},
            {"mfcc", MfccJson(cfg)},
            {"factorization", cfg_json.at("factorization")},
            {"seed", cfg.seed}};
  return HashJson(j);
}

std::string FeatureDigest(const PipelineConfig &cfg) {
  const Json cfg_json = ConfigToJson(cfg);
  Json j = {{"stage", "features"},
            {"basis", PerClass(cfg) ? BasisDigest(cfg) : ""},
            {"manifest", ReadFile(cfg.city_manifest)},
            {"featurizer", FeaturizerName(cfg.featurizer)},
            {"G", cfg.G},
            {"mfcc", MfccJson(cfg)},
            {"factorization", cfg_json.at("factorization")},
            {"em", cfg_json.at("em")},
            {"relevance", cfg.relevance},
            {"seed", cfg.seed}};
  return HashJson(j);
}

std::string EvalDigest(const PipelineConfig &cfg) {
  const Json cfg_json = ConfigToJson(cfg);
  Json j = {{"stage", "eval"},
            {"features", FeatureDigest(cfg)},
            {"fusion", FusionName(cfg.fusion)},
            {"cv", cfg_json.at("cv")},
            {"min_examples", cfg.min_examples},
            {"seed", cfg.seed}};
  return HashJson(j);
}

std::string ConfigDescription(const PipelineConfig &cfg) {
  std::string d = std::string("featurizer=") + FeaturizerName(cfg.featurizer) +
                  " fusion=" + FusionName(cfg.fusion);
  if (PerClass(cfg)) d += " k=" + std::to_string(cfg.k);
  if (cfg.featurizer != Featurizer::kH) d += " G=" + std::to_string(cfg.G);
  d += " seed=" + std::to_string(cfg.seed);
  return d + " digest=" + EvalDigest(cfg);
}

std::vector<ClassBasis> RunTrainBasis(const PipelineConfig &cfg, int jobs) {
  cfg.Check();
  GEOTAG_VALIDATE(!cfg.sound_class_manifest.empty(),
                  "train-basis: sound_class_manifest is not set");
  const DatasetManifest manifest = LoadManifest(cfg.sound_class_manifest);
  const std::vector<std::string> classes = CheckedLabels(manifest, "sound class");
  GEOTAG_VALIDATE(!classes.empty(), "train-basis: the sound class manifest is empty");
  const std::string digest = BasisDigest(cfg);

  std::vector<ClassBasis> out(classes.size());
  ParallelFor(classes.size(), jobs, [&](std::size_t c) {
    const std::string &cls = classes[c];
    ClassBasis &result = out[c];
    ModelArchive existing;
    if (TryLoadCurrent(BasisPath(cfg, cls), ArchiveKind::kBasis, digest, &existing)) {
      result.basis = BasisFromJson(existing.payload, &result.trace);
      result.data_norm_sq = existing.payload.at("data_norm_sq").get<double>();
      result.frames = existing.payload.at("frames").get<int>();
      result.reused = true;
      return;
    }
    std::vector<FeatureMatrix> parts;
    Eigen::Index total = 0;
    for (const ManifestEntry &e : manifest.entries) {
      if (e.label != cls) continue;
      try {
        parts.push_back(LoadRecordingFrames(manifest, e, cfg.mfcc));
        total += parts.back().cols();
      } catch (const std::exception &err) {
        GEOTAG_WARN("train-basis: skipping ", e.path, ": ", err.what());
      }
    }
    GEOTAG_VALIDATE(!parts.empty(), "train-basis: class '", cls,
                    "' has no decodable recordings");
    const Eigen::Index d = parts[0].rows();
    FeatureMatrix x(d, total);
    Eigen::Index at = 0;
    for (const FeatureMatrix &p : parts) {
      GEOTAG_VALIDATE(p.rows() == d, "train-basis: class '", cls,
                      "' mixes feature dimensions ", d, " and ", p.rows());
      x.middleCols(at, p.cols()) = p;
      at += p.cols();
    }
    FactorizationOptions opts = cfg.factorization;
    opts.seed = DeriveSeed(cfg.seed, "basis/" + cls);
    BasisFit fit = LearnBasis(x, cfg.k, opts, cls);
    result.basis = std::move(fit.basis);
    result.trace = std::move(fit.trace);
    result.data_norm_sq = x.squaredNorm();
    result.frames = static_cast<int>(x.cols());

    ModelArchive a;
    a.kind = ArchiveKind::kBasis;
    a.digest = digest;
    a.payload = BasisToJson(result.basis, result.trace);
    a.payload["data_norm_sq"] = result.data_norm_sq;
    a.payload["frames"] = result.frames;
    a.payload["options"] = ConfigToJson(cfg).at("factorization");
    a.payload["options"]["seed"] = opts.seed;
    SaveArchive(a, BasisPath(cfg, cls));
  });
  return out;
}

std::vector<BasisMatrix> LoadBases(const PipelineConfig &cfg) {
  const DatasetManifest manifest = LoadManifest(cfg.sound_class_manifest);
  const std::string digest = BasisDigest(cfg);
  std::vector<BasisMatrix> bases;
  for (const std::string &cls : CheckedLabels(manifest, "sound class")) {
    const fs::path path = BasisPath(cfg, cls);
    GEOTAG_VALIDATE(fs::exists(path), "missing basis for class '", cls, "' (",
                    path.string(), "); run train-basis first");
    const ModelArchive a = LoadArchive(path);
    GEOTAG_VALIDATE(a.kind == ArchiveKind::kBasis, path.string(),
                    " is not a basis archive");
    GEOTAG_VALIDATE(a.digest == digest, "basis for class '", cls,
                    "' was trained under a different configuration; rerun train-basis");
    bases.push_back(BasisFromJson(a.payload));
  }
  return bases;
}

FeaturizeResult Featurize(const PipelineConfig &cfg, const DatasetManifest &cities,
                          const std::vector<BasisMatrix> &bases, int jobs) {
  cfg.Check();
  const std::size_t n = cities.entries.size();
  GEOTAG_VALIDATE(n > 0, "featurize: the city manifest is empty");
  const bool per_class = PerClass(cfg);
  GEOTAG_VALIDATE(!per_class || !bases.empty(), "featurize: no basis matrices");

  std::vector<FeatureMatrix> frames(n);
  std::vector<std::string> failure(n);
  ParallelFor(n, jobs, [&](std::size_t i) {
    try {
      frames[i] = LoadRecordingFrames(cities, cities.entries[i], cfg.mfcc);
      if (per_class)
        for (const BasisMatrix &b : bases)
          GEOTAG_VALIDATE(frames[i].rows() == b.dim(), "feature dimension ",
                          frames[i].rows(), " does not match basis '", b.class_name,
                          "' of dimension ", b.dim());
    } catch (const std::exception &e) {
      failure[i] = e.what();
    }
  });

  FeaturizeResult result;
  FeatureTable &table = result.table;
  table.featurizer = FeaturizerName(cfg.featurizer);
  for (std::size_t i = 0; i < n; ++i) {
    if (failure[i].empty()) continue;
    GEOTAG_WARN("featurize: skipping ", cities.entries[i].path, ": ", failure[i]);
    table.skipped.push_back(cities.entries[i].path + ": " + failure[i]);
  }
  auto usable = [&](std::size_t i) { return failure[i].empty(); };
  auto is_train = [&](std::size_t i) {
    return usable(i) && cities.entries[i].split == Split::kTrain;
  };

  std::vector<std::vector<Vector>> feats(n);
  if (per_class) {
    for (const BasisMatrix &b : bases) table.channels.push_back(b.class_name);
    const std::size_t L = bases.size();
    std::vector<std::vector<WeightMatrix>> weights(n, std::vector<WeightMatrix>(L));
    ParallelFor(n, jobs, [&](std::size_t i) {
      if (!usable(i)) return;
      for (std::size_t l = 0; l < L; ++l)
        weights[i][l] = InferWeights(frames[i], bases[l].values, cfg.InferenceOptions());
    });
    if (cfg.featurizer == Featurizer::kH) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!usable(i)) continue;
        for (std::size_t l = 0; l < L; ++l)
          feats[i].push_back(HFeature(weights[i][l]).values);
      }
    } else {
      std::vector<GmmModel> gmms(L);
      ParallelFor(L, jobs, [&](std::size_t l) {
        std::vector<const Matrix *> parts;
        for (std::size_t i = 0; i < n; ++i)
          if (is_train(i)) parts.push_back(&weights[i][l]);
        GEOTAG_VALIDATE(!parts.empty(), "featurize: no training recordings");
        EmOptions em = cfg.em;
        em.seed = DeriveSeed(cfg.seed, "gmm/" + bases[l].class_name);
        gmms[l] = FitGmm(StackRows(parts), cfg.G, em);
      });
      for (std::size_t l = 0; l < L; ++l) result.gmms[bases[l].class_name] = gmms[l];
      ParallelFor(n, jobs, [&](std::size_t i) {
        if (!usable(i)) return;
        for (std::size_t l = 0; l < L; ++l)
          feats[i].push_back(VFeature(weights[i][l], gmms[l]).values);
      });
    }
  } else {
    table.channels.push_back(table.featurizer);
    std::vector<Matrix> transposed;
    std::vector<const Matrix *> parts;
    for (std::size_t i = 0; i < n; ++i)
      if (is_train(i)) transposed.push_back(frames[i].transpose());
    for (const Matrix &m : transposed) parts.push_back(&m);
    GEOTAG_VALIDATE(!parts.empty(), "featurize: no training recordings");
    for (const Matrix *p : parts)
      GEOTAG_VALIDATE(p->cols() == parts[0]->cols(),
                      "featurize: recordings have different feature dimensions");
    EmOptions em = cfg.em;
    em.seed = DeriveSeed(cfg.seed, "gmm/background");
    const GmmModel background = FitGmm(StackRows(parts), cfg.G, em);
    transposed.clear();
    result.gmms["background"] = background;
    ParallelFor(n, jobs, [&](std::size_t i) {
      if (!usable(i)) return;
      GEOTAG_VALIDATE(frames[i].rows() == background.dim(),
                      "featurize: recording ", cities.entries[i].path,
                      " has feature dimension ", frames[i].rows(), ", expected ",
                      background.dim());
      if (cfg.featurizer == Featurizer::kBoaw)
        feats[i].push_back(BoawFeature(frames[i], background).values);
      else
        feats[i].push_back(SupervectorFeature(frames[i], background, cfg.relevance).values);
    });
  }
  for (std::size_t i = 0; i < n; ++i)
    if (usable(i)) table.features[cities.entries[i].path] = std::move(feats[i]);
  return result;
}

FeaturizeResult RunFeaturize(const PipelineConfig &cfg, int jobs) {
  cfg.Check();
  const std::string digest = FeatureDigest(cfg);
  ModelArchive existing;
  if (TryLoadCurrent(FeaturesPath(cfg), ArchiveKind::kFeatures, digest, &existing)) {
    FeaturizeResult r;
    r.table = FeatureTableFromJson(existing.payload);
    bool complete = true;
    if (cfg.featurizer != Featurizer::kH) {
      std::vector<std::string> names;
      if (cfg.featurizer == Featurizer::kV)
        names = r.table.channels;
      else
        names = {"background"};
      for (const std::string &name : names) {
        ModelArchive g;
        if (!TryLoadCurrent(GmmPath(cfg, name), ArchiveKind::kGmm, digest, &g)) {
          complete = false;
          break;
        }
        r.gmms[name] = GmmFromJson(g.payload);
      }
    }
    if (complete) {
      GEOTAG_LOG("featurize: reusing ", FeaturesPath(cfg).string());
      return r;
    }
  }

  std::vector<BasisMatrix> bases;
  if (PerClass(cfg)) bases = LoadBases(cfg);
  const DatasetManifest cities = LoadManifest(cfg.city_manifest);
  FeaturizeResult r = Featurize(cfg, cities, bases, jobs);
  for (const auto &[name, gmm] : r.gmms) {
    ModelArchive g;
    g.kind = ArchiveKind::kGmm;
    g.digest = digest;
    g.payload = GmmToJson(gmm);
    SaveArchive(g, GmmPath(cfg, name));
  }
  ModelArchive a;
  a.kind = ArchiveKind::kFeatures;
  a.digest = digest;
  a.payload = FeatureTableToJson(r.table);
  SaveArchive(a, FeaturesPath(cfg));
  return r;
}

namespace {

struct Recording {
  std::string id;
  std::string city;
};

struct SplitView {
  std::vector<std::string> cities;
  std::vector<Recording> train, test;
  std::vector<std::string> notes;
};

SplitView SelectRecordings(const PipelineConfig &cfg, const DatasetManifest &manifest,
                           const FeatureTable &table) {
  GEOTAG_VALIDATE(table.featurizer == FeaturizerName(cfg.featurizer),
                  "feature table was built with featurizer '", table.featurizer,
                  "' but the config asks for '", FeaturizerName(cfg.featurizer), "'");
  SplitView view;
  std::map<std::string, int> count;
  for (const ManifestEntry &e : manifest.entries)
    if (table.features.count(e.path)) ++count[e.label];
  for (const auto &[city, c] : count) {
    if (c >= cfg.min_examples) {
      view.cities.push_back(city);
    } else {
      view.notes.push_back("city " + city + " excluded: " + std::to_string(c) +
                           " recordings < min_examples " +
                           std::to_string(cfg.min_examples));
      GEOTAG_WARN(view.notes.back());
    }
  }
  const std::set<std::string> kept(view.cities.begin(), view.cities.end());
  for (const ManifestEntry &e : manifest.entries) {
    if (!table.features.count(e.path) || !kept.count(e.label)) continue;
    (e.split == Split::kTrain ? view.train : view.test).push_back({e.path, e.label});
  }
  return view;
}

std::vector<Histogram> Channel(const FeatureTable &table,
                               const std::vector<Recording> &recs, std::size_t c) {
  std::vector<Histogram> out;
  for (const Recording &r : recs) out.push_back({table.features.at(r.id)[c], ""});
  return out;
}

std::vector<Supervector> SupervectorChannel(const FeatureTable &table,
                                            const std::vector<Recording> &recs) {
  std::vector<Supervector> out;
  for (const Recording &r : recs) out.push_back({table.features.at(r.id)[0]});
  return out;
}

std::vector<std::string> Ids(const std::vector<Recording> &recs) {
  std::vector<std::string> ids;
  for (const Recording &r : recs) ids.push_back(r.id);
  return ids;
}

template <typename K>
K FuseKernels(Fusion fusion, const std::vector<K> &kernels) {
  if (fusion == Fusion::kProduct) return FuseProduct(kernels);
  return FuseAverage(kernels);
}

std::string KernelRef(const PipelineConfig &cfg) {
  return std::string(FeaturizerName(cfg.featurizer)) + "/" + FusionName(cfg.fusion) +
         "/" + EvalDigest(cfg);
}

}  // namespace

TrainedModels TrainModels(const PipelineConfig &cfg, const DatasetManifest &cities,
                          const FeatureTable &table, int jobs) {
  cfg.Check();
  const SplitView view = SelectRecordings(cfg, cities, table);
  TrainedModels out;
  out.notes = view.notes;
  out.train_ids = Ids(view.train);
  GEOTAG_VALIDATE(view.train.size() >= 2, "train-eval: fewer than 2 training recordings");

  if (cfg.featurizer == Featurizer::kSupervector) {
    out.train_kernel = LinearKernel(SupervectorChannel(table, view.train), out.train_ids);
  } else {
    std::vector<KernelMatrix> per_channel(table.channels.size());
    std::vector<double> gammas(table.channels.size());
    ParallelFor(table.channels.size(), jobs, [&](std::size_t c) {
      const std::vector<Histogram> h = Channel(table, view.train, c);
      gammas[c] = AveragePairwiseGamma(h);
      per_channel[c] = ExpChi2Kernel(h, gammas[c], out.train_ids);
    });
    for (std::size_t c = 0; c < table.channels.size(); ++c)
      out.gammas[table.channels[c]] = gammas[c];
    out.train_kernel = FuseKernels(cfg.fusion, per_channel);
  }

  const std::size_t n_cities = view.cities.size();
  std::vector<std::optional<std::pair<CvResult, SvmModel>>> fitted(n_cities);
  std::vector<std::string> city_notes(n_cities);
  const std::string ref = KernelRef(cfg);
  ParallelFor(n_cities, jobs, [&](std::size_t c) {
    const std::string &city = view.cities[c];
    std::vector<int> y;
    int pos = 0;
    for (const Recording &r : view.train) {
      y.push_back(r.city == city ? 1 : -1);
      pos += y.back() > 0;
    }
    if (pos == 0 || pos == static_cast<int>(y.size())) {
      city_notes[c] = "city " + city + " excluded: training split lacks " +
                      (pos == 0 ? "positives" : "negatives");
      return;
    }
    CvConfig cv = cfg.cv;
    cv.seed = DeriveSeed(cfg.seed, "cv/" + city);
    CvResult cvr;
    try {
      cvr = CrossValidateC(out.train_kernel, y, cv);
    } catch (const ValidationError &e) {
      city_notes[c] = "city " + city + " excluded: " + e.what();
      return;
    }
    SvmModel model = TrainSvm(out.train_kernel, y, cvr.best_C, {}, ref);
    fitted[c].emplace(std::move(cvr), std::move(model));
  });
  for (std::size_t c = 0; c < n_cities; ++c) {
    if (!city_notes[c].empty()) {
      GEOTAG_WARN(city_notes[c]);
      out.notes.push_back(city_notes[c]);
    }
    if (fitted[c]) {
      out.cv[view.cities[c]] = std::move(fitted[c]->first);
      out.models[view.cities[c]] = std::move(fitted[c]->second);
    }
  }
  return out;
}

EvalReport Evaluate(const PipelineConfig &cfg, const DatasetManifest &cities,
                    const FeatureTable &table, const TrainedModels &trained) {
  const SplitView view = SelectRecordings(cfg, cities, table);
  GEOTAG_VALIDATE(Ids(view.train) == trained.train_ids,
                  "evaluate: training recordings differ from the trained models");
  const std::vector<std::string> test_ids = Ids(view.test);
  std::vector<std::string> notes = trained.notes;

  CrossKernel cross;
  if (!view.test.empty()) {
    if (cfg.featurizer == Featurizer::kSupervector) {
      cross = CrossLinear(SupervectorChannel(table, view.train),
                          SupervectorChannel(table, view.test), trained.train_ids,
                          test_ids);
    } else {
      std::vector<CrossKernel> per_channel;
      for (std::size_t c = 0; c < table.channels.size(); ++c)
        per_channel.push_back(CrossExpChi2(Channel(table, view.train, c),
                                           Channel(table, view.test, c),
                                           trained.gammas.at(table.channels[c]),
                                           trained.train_ids, test_ids));
      cross = FuseKernels(cfg.fusion, per_channel);
    }
  }

  std::map<std::string, SvmModel> models;
  std::map<std::string, CityTestSet> tests;
  for (const auto &[city, model] : trained.models) {
    CityTestSet t{cross, {}};
    bool any = false;
    for (const Recording &r : view.test) {
      t.relevant.push_back(r.city == city);
      any |= r.city == city;
    }
    if (!any) {
      notes.push_back("city " + city + " excluded: absent from the test split");
      GEOTAG_WARN(notes.back());
      continue;
    }
    models[city] = model;
    tests[city] = std::move(t);
  }
  GEOTAG_VALIDATE(!models.empty(),
                  "train-eval: no city has recordings in both the training and test "
                  "splits");
  EvalReport report = BuildReport(models, tests, ConfigDescription(cfg));
  for (const std::string &s : table.skipped) report.notes.push_back("skipped " + s);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  return report;
}

EvalReport RunTrainEval(const PipelineConfig &cfg, int jobs) {
  cfg.Check();
  const std::string digest = EvalDigest(cfg);
  const fs::path report_path = cfg.output_dir / "report.json";
  ModelArchive existing;
  if (TryLoadCurrent(report_path, ArchiveKind::kReport, digest, &existing) &&
      fs::exists(cfg.output_dir / "report.txt")) {
    GEOTAG_LOG("train-eval: reusing ", report_path.string());
    return ReportFromJson(existing.payload);
  }

  const fs::path features_path = FeaturesPath(cfg);
  GEOTAG_VALIDATE(fs::exists(features_path), "train-eval: missing ",
                  features_path.string(), "; run featurize first");
  const ModelArchive features = LoadArchive(features_path);
  GEOTAG_VALIDATE(features.kind == ArchiveKind::kFeatures &&
                      features.digest == FeatureDigest(cfg),
                  "train-eval: ", features_path.string(),
                  " was produced under a different configuration; rerun featurize");
  const FeatureTable table = FeatureTableFromJson(features.payload);
  const DatasetManifest cities = LoadManifest(cfg.city_manifest);

  const TrainedModels trained = TrainModels(cfg, cities, table, jobs);
  ModelArchive k;
  k.kind = ArchiveKind::kKernel;
  k.digest = digest;
  k.payload = KernelToJson(trained.train_kernel, trained.gammas);
  SaveArchive(k, cfg.output_dir / "kernels.json");
  for (const auto &[city, model] : trained.models) {
    ModelArchive m;
    m.kind = ArchiveKind::kSvm;
    m.digest = digest;
    m.payload = SvmToJson(model);
    SaveArchive(m, cfg.output_dir / "svm" / (SafeName(city) + ".json"));
  }

  const EvalReport report = Evaluate(cfg, cities, table, trained);
  WriteFileAtomic(cfg.output_dir / "report.txt", FormatReportTable(report));
  ModelArchive r;
  r.kind = ArchiveKind::kReport;
  r.digest = digest;
  r.payload = ReportToJson(report);
  SaveArchive(r, report_path);
  return report;
}

EvalReport RunAll(const PipelineConfig &cfg, int jobs) {
  if (PerClass(cfg)) RunTrainBasis(cfg, jobs);
  RunFeaturize(cfg, jobs);
  return RunTrainEval(cfg, jobs);
}

}  // namespace geotag
