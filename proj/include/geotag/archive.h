// geotag/archive.h

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


#ifndef GEOTAG_ARCHIVE_H_
#define GEOTAG_ARCHIVE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "geotag/common.h"
#include "geotag/eval.h"
#include "geotag/gmm.h"
#include "geotag/kernels.h"
#include "geotag/seminmf.h"
#include "geotag/svm.h"

namespace geotag {

using Json = nlohmann::json;

// On-disk artifacts share one envelope:
//
//   {"format": "geotag-archive", "kind": ..., "version": 1,
//    "digest": ..., "checksum": ..., "payload": {...}}
//
// Matrices are stored as {"rows", "cols", "data"} with data row-major.
// The checksum is FNV-1a over kind, version, digest and the serialized payload.

enum class ArchiveKind { kBasis, kGmm, kSvm, kKernel, kFeatures, kReport };

constexpr int kArchiveVersion = 1;

const char *ArchiveKindName(ArchiveKind kind);
ArchiveKind ParseArchiveKind(const std::string &name);

struct ModelArchive {
  ArchiveKind kind = ArchiveKind::kBasis;
  int version = kArchiveVersion;
  /// Digest of the configuration that produced the payload.
  std::string digest;
  Json payload;

  bool operator==(const ModelArchive &) const = default;
};

std::uint64_t Fnv1a(const std::string &bytes, std::uint64_t hash = 14695981039346656037ULL);
std::string HexDigest(std::uint64_t hash);

std::string SerializeArchive(const ModelArchive &archive);
/// Throws ValidationError on checksum failure, unsupported version or a
/// payload that does not match the schema of its kind.
ModelArchive ParseArchive(const std::string &text, const std::string &source = "<memory>");

/// Writes to a temporary sibling and renames it into place.
void SaveArchive(const ModelArchive &archive, const std::filesystem::path &path);
ModelArchive LoadArchive(const std::filesystem::path &path);
/// Loads `path` if it is a valid archive of `kind` produced under `digest`.
bool TryLoadCurrent(const std::filesystem::path &path, ArchiveKind kind,
                    const std::string &digest, ModelArchive *out);

/// Writes text atomically.
void WriteFileAtomic(const std::filesystem::path &path, const std::string &text);
std::string ReadFile(const std::filesystem::path &path);

Json MatrixToJson(const Matrix &m);
Matrix MatrixFromJson(const Json &j);
Json VectorToJson(const Vector &v);
Vector VectorFromJson(const Json &j);

Json BasisToJson(const BasisMatrix &basis, const std::vector<double> &trace = {});
BasisMatrix BasisFromJson(const Json &j, std::vector<double> *trace = nullptr);

Json GmmToJson(const GmmModel &model);
GmmModel GmmFromJson(const Json &j);

Json SvmToJson(const SvmModel &model);
SvmModel SvmFromJson(const Json &j);

/// Square kernels keep the lower triangle row by row. Extra named scalars
/// (e.g. per-class gammas) ride along in "components".
Json KernelToJson(const KernelMatrix &kernel,
                  const std::map<std::string, double> &components = {});
KernelMatrix KernelFromJson(const Json &j,
                            std::map<std::string, double> *components = nullptr);

Json ReportToJson(const EvalReport &report);
EvalReport ReportFromJson(const Json &j);

/// Per-recording feature vectors produced by the featurizer. `channels` names
/// the slots of each entry: the sound classes for h and v, a single slot for
/// the baselines.
struct FeatureTable {
  std::string featurizer;
  std::vector<std::string> channels;
  std::map<std::string, std::vector<Vector>> features;
  /// Recordings that could not be featurized, with the reason.
  std::vector<std::string> skipped;

  bool operator==(const FeatureTable &) const = default;
};

Json FeatureTableToJson(const FeatureTable &table);
FeatureTable FeatureTableFromJson(const Json &j);

/// A single recording's frames (d x n) stored as a features archive with
/// layout "matrix". This is how precomputed features enter the pipeline.
ModelArchive FrameArchive(const FeatureMatrix &frames);
FeatureMatrix FramesFromArchive(const ModelArchive &archive);

}  // namespace geotag

#endif  // GEOTAG_ARCHIVE_H_
