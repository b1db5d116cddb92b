// synthgen.cc

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


#include "geotag/synthgen.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include "geotag/archive.h"
#include "geotag/config.h"
#include "geotag/random.h"

namespace geotag {

namespace fs = std::filesystem;

void SynthSpec::Check() const {
  GEOTAG_VALIDATE(n_classes >= 1 && k_true >= 1 && d >= 1 && n_cities >= 1,
                  "synth: counts must be positive");
  GEOTAG_VALIDATE(clip_frames >= 1 && class_frames >= k_true,
                  "synth: too few frames");
  GEOTAG_VALIDATE(train_per_city >= 1 && test_per_city >= 0,
                  "synth: bad recordings per city");
  GEOTAG_VALIDATE(noise_sigma >= 0.0, "synth: noise_sigma must be >= 0");
  GEOTAG_VALIDATE(city_mixing.rows() == n_cities && city_mixing.cols() == n_classes,
                  "synth: city_mixing must be ", n_cities, "x", n_classes);
  for (Eigen::Index c = 0; c < city_mixing.rows(); ++c) {
    GEOTAG_VALIDATE((city_mixing.row(c).array() >= 0.0).all(),
                    "synth: negative mixing weight");
    GEOTAG_VALIDATE(std::abs(city_mixing.row(c).sum() - 1.0) <= 1e-9,
                    "synth: mixing row ", c, " does not sum to 1");
  }
}

SynthSpec DefaultCitySpec(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.city_mixing.resize(4, 6);
  spec.clip_frames = 60;
  spec.city_mixing.resize(4, 6);
  spec.city_mixing << 0.3, 0.3, 0.1, 0.1, 0.1, 0.1,
                      0.1, 0.3, 0.3, 0.1, 0.1, 0.1,
                      0.1, 0.1, 0.3, 0.3, 0.1, 0.1,
                      0.1, 0.1, 0.1, 0.3, 0.3, 0.1;
  return spec;
}

std::string ClassName(int l) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "class%02d", l);
  return buf;
}

std::string CityName(int c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "city%02d", c);
  return buf;
}

namespace {

Vector Frame(const Matrix &basis, double noise_sigma, Rng *rng, Vector *w_out = nullptr) {
  Vector w(basis.cols());
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng->Uniform();
  Vector x = basis * w;
  if (noise_sigma > 0.0)
    for (Eigen::Index r = 0; r < x.size(); ++r) x(r) += noise_sigma * rng->Normal();
  if (w_out) *w_out = w;
  return x;
}

}  // namespace

std::vector<SynthClass> GenClassData(const SynthSpec &spec) {
  spec.Check();
  std::vector<SynthClass> classes(spec.n_classes);
  for (int l = 0; l < spec.n_classes; ++l) {
    SynthClass &c = classes[l];
    c.name = ClassName(l);
    Rng rng(DeriveSeed(spec.seed, "synth/" + c.name));
    c.basis.resize(spec.d, spec.k_true);
    for (Eigen::Index j = 0; j < c.basis.cols(); ++j)
      for (Eigen::Index r = 0; r < c.basis.rows(); ++r) c.basis(r, j) = rng.Normal();
    c.weights.resize(spec.class_frames, spec.k_true);
    c.x.resize(spec.d, spec.class_frames);
    for (int t = 0; t < spec.class_frames; ++t) {
      Vector w;
      c.x.col(t) = Frame(c.basis, spec.noise_sigma, &rng, &w);
      c.weights.row(t) = w.transpose();
    }
  }
  return classes;
}

std::vector<SynthRecording> GenCityDataset(const SynthSpec &spec,
                                           const std::vector<SynthClass> &classes) {
  spec.Check();
  GEOTAG_VALIDATE(static_cast<int>(classes.size()) == spec.n_classes,
                  "synth: expected ", spec.n_classes, " classes");
  std::vector<SynthRecording> out;
  for (int c = 0; c < spec.n_cities; ++c) {
    Rng rng(DeriveSeed(spec.seed, "synth/" + CityName(c)));
    const int total = spec.train_per_city + spec.test_per_city;
    for (int r = 0; r < total; ++r) {
      SynthRecording rec;
      rec.city = CityName(c);
      rec.split = r < spec.train_per_city ? Split::kTrain : Split::kTest;
      for (int t = 0; t < spec.clip_frames; ++t) {
        double u = rng.Uniform(), acc = 0.0;
        int l = spec.n_classes - 1;
        for (int j = 0; j < spec.n_classes; ++j) {
          acc += spec.city_mixing(c, j);
          if (u < acc) {
            l = j;
            break;
          }
        }
        rec.frame_class.push_back(l);
      }
      std::sort(rec.frame_class.begin(), rec.frame_class.end());
      rec.frames.resize(spec.d, spec.clip_frames);
      for (int t = 0; t < spec.clip_frames; ++t)
        rec.frames.col(t) = Frame(classes[rec.frame_class[t]].basis, spec.noise_sigma, &rng);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

SynthPaths WriteSynthDataset(const SynthSpec &spec, const fs::path &dir) {
  const std::vector<SynthClass> classes = GenClassData(spec);
  const std::vector<SynthRecording> recordings = GenCityDataset(spec, classes);

  DatasetManifest sound;
  for (const SynthClass &c : classes) {
    for (int start = 0, clip = 0; start < spec.class_frames;
         start += spec.clip_frames, ++clip) {
      const int len = std::min(spec.clip_frames, spec.class_frames - start);
      char name[64];
      std::snprintf(name, sizeof(name), "clip%03d.json", clip);
      const std::string rel = "classes/" + c.name + "/" + name;
      SaveArchive(FrameArchive(c.x.middleCols(start, len)), dir / rel);
      sound.entries.push_back({rel, c.name, Split::kTrain});
    }
  }

  DatasetManifest cities;
  std::map<std::string, int> counter;
  for (const SynthRecording &r : recordings) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%03d.json", SplitName(r.split),
                  counter[r.city + SplitName(r.split)]++);
    const std::string rel = "recordings/" + r.city + "/" + name;
    SaveArchive(FrameArchive(r.frames), dir / rel);
    cities.entries.push_back({rel, r.city, r.split});
  }

  SynthPaths paths{dir / "classes.csv", dir / "cities.csv", dir / "config.json"};
  WriteManifest(sound, paths.sound_class_manifest);
  WriteManifest(cities, paths.city_manifest);

  Json mixing = Json::array();
  for (Eigen::Index c = 0; c < spec.city_mixing.rows(); ++c) {
    Json row = Json::array();
    for (Eigen::Index l = 0; l < spec.city_mixing.cols(); ++l)
      row.push_back(spec.city_mixing(c, l));
    mixing.push_back(std::move(row));
  }
  Json meta = {{"n_classes", spec.n_classes},     {"k_true", spec.k_true},
               {"d", spec.d},                     {"n_cities", spec.n_cities},
               {"city_mixing", mixing},           {"clip_frames", spec.clip_frames},
               {"class_frames", spec.class_frames},
               {"train_per_city", spec.train_per_city},
               {"test_per_city", spec.test_per_city},
               {"noise_sigma", spec.noise_sigma}, {"seed", spec.seed}};
  WriteFileAtomic(dir / "synth.json", meta.dump(1) + "\n");

  Json config = {{"sound_class_manifest", "classes.csv"},
                 {"city_manifest", "cities.csv"},
                 {"featurizer", "h"},
                 {"fusion", "product"},
                 {"k", spec.k_true},
                 {"G", 16},
                 {"output_dir", "out"},
                 {"seed", spec.seed}};
  WriteFileAtomic(paths.config, config.dump(1) + "\n");
  return paths;
}

}  // namespace geotag
